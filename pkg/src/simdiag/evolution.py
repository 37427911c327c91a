"""Trotterized time evolution: per-term baseline, grouped-diagonal driver, dense oracle."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from .diagonalizer import DiagonalGroup, diagonalize_group
from .hamiltonian import Hamiltonian, greedy_partition
from .statevec import StateVector, neighbour_masks

EXACT_MAX_QUBITS = 12
DEFAULT_DT = 0.01
TABLE_MAX_RANK = 12
FUSE_MAX_QUBITS = 22


@dataclass(frozen=True)
class EvolutionPlan:
    total_time: float
    n_steps: int
    method: str = "grouped"
    term_order: str = "input"

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not math.isfinite(self.total_time):
            raise ValueError("total_time must be finite")
        if self.method not in ("baseline", "grouped"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.term_order not in ("input", "group_major"):
            raise ValueError(f"unknown term order {self.term_order!r}")

    @property
    def dt(self) -> float:
        return self.total_time / self.n_steps

    @classmethod
    def from_dt(cls, dt: float, n_steps: int, **kw) -> "EvolutionPlan":
        return cls(dt * n_steps, n_steps, **kw)


def _check(n_h: int, psi: StateVector):
    if n_h != psi.n_qubits:
        raise ValueError(f"Hamiltonian has {n_h} qubits, state has {psi.n_qubits}")


def ordered_terms(h: Hamiltonian, term_order: str = "input"):
    if term_order == "input":
        return list(h.terms)
    return [t for g in greedy_partition(h) for t in g.terms]


class RotationProgram:
    """Flattened per-term rotations for the baseline driver."""

    def __init__(self, terms, dt: float):
        self.xs = np.array([t.pauli.x_mask for t in terms], dtype=np.int64)
        self.zs = np.array([t.pauli.z_mask for t in terms], dtype=np.int64)
        self.nys = np.array([t.pauli.phase_exp for t in terms], dtype=np.int64)
        self.thetas = np.array([t.coeff * dt for t in terms], dtype=np.float64)

    def run(self, psi: StateVector, n_steps: int = 1):
        K.run_rotations(psi.amplitudes, self.xs, self.zs, self.nys, self.thetas, n_steps)


def _span_basis(z_masks: Sequence[int]) -> tuple[list[int], list[int]]:
    """Echelon basis of the z-mask span and each mask's coordinates in it."""
    pivots: dict[int, int] = {}
    for z in z_masks:
        v = z
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                break
            v ^= pivots[top]
    tops = list(pivots)
    basis = [pivots[t] for t in tops]
    coords = []
    for z in z_masks:
        v, c = z, 0
        while v:
            j = tops.index(v.bit_length() - 1)
            v ^= basis[j]
            c |= 1 << j
        coords.append(c)
    return basis, coords


def _parities(masks: Sequence[int], values: np.ndarray) -> np.ndarray:
    """Bit j of the result is ``parity(masks[j] & v)``."""
    out = np.zeros(len(values), dtype=np.int64)
    for j, m in enumerate(masks):
        out |= (np.bitwise_count(values & m).astype(np.int64) & 1) << j
    return out


def phase_table(n: int, z_masks: Sequence[int], coeffs: Sequence[float], dt: float):
    """``exp(-i dt Lambda)`` tabulated over the span of the z masks.

    Returns ``(ylo, yhi, table)`` with ``Lambda(hi | lo)`` indexed by
    ``yhi[hi >> L] ^ ylo[lo]``, or ``None`` if the span exceeds
    ``TABLE_MAX_RANK`` dimensions.
    """
    basis, coords = _span_basis(z_masks)
    r = len(basis)
    if r > TABLE_MAX_RANK:
        return None
    y = np.arange(1 << r, dtype=np.int64)
    theta = np.zeros(1 << r)
    for c, cf in zip(coords, coeffs):
        theta += cf * (1 - 2 * (np.bitwise_count(y & c).astype(np.int64) & 1))
    nlo = min(n, K.WHT_BLOCK_BITS)
    ylo = _parities(basis, np.arange(1 << nlo, dtype=np.int64))
    yhi = _parities(basis, np.arange(1 << (n - nlo), dtype=np.int64) << nlo)
    return ylo, yhi, np.exp(-1j * dt * theta)


def diag_opcode(n: int, n_terms: int) -> int:
    """Per-term evaluation for small groups, blocked transform otherwise."""
    return K.OP_DIAG_WHT if n_terms > min(n, K.WHT_BLOCK_BITS) else K.OP_DIAG


def _linear_map(v: np.ndarray, batches, reverse: bool = False) -> np.ndarray:
    """Image of basis indices under the CNOT batches (each batch is an involution)."""
    v = v.copy()
    for ctrl, tmask in (reversed(batches) if reverse else batches):
        v ^= ((v >> ctrl) & 1) * tmask
    return v


def _phase_exponent(v: np.ndarray, smask: int, sign: int, czs) -> np.ndarray:
    k = sign * np.bitwise_count(v & smask).astype(np.int64)
    for a, b in czs:
        k += 2 * ((v >> a) & (v >> b) & 1)
    return k & 3


def middle_tables(n: int, circ, inverse: bool = False) -> list[np.ndarray]:
    """Tables for the CNOT + S/CZ section of ``circ`` as one ``permute_phase`` op.

    Forward: ``out[b] = i^k(b) in[A^-1 b]``; inverse: ``out[b] = i^-k(Ab) in[A b]``,
    where ``A`` is the CNOT layer's action on basis indices and ``i^k`` the
    phase layer. Returns ``[plo, phi, klo, khi, mhi]``.
    """
    batches = [(ctrl, sum(1 << t for t in ts)) for ctrl, ts in circ.cnot_batches()]
    smask = sum(1 << q for q in circ.s_layer)
    nlo = min(n, K.WHT_BLOCK_BITS)
    if inverse:
        def perm(v):
            return _linear_map(v, batches)

        def kappa(v):
            return (-_phase_exponent(_linear_map(v, batches), smask, 1, circ.czs)) & 3
    else:
        def perm(v):
            return _linear_map(v, batches, reverse=True)

        def kappa(v):
            return _phase_exponent(v, smask, 1, circ.czs)
    lo = np.arange(1 << nlo, dtype=np.int64)
    hi = np.arange(1 << (n - nlo), dtype=np.int64) << nlo
    khi = kappa(hi)
    mhi = np.zeros(len(hi), dtype=np.int64)
    for a in range(nlo):
        e = np.int64(1 << a)
        bit = ((kappa(hi | e) - khi - kappa(np.array([e]))) & 3) >> 1
        mhi |= bit << a
    return [perm(lo), perm(hi), kappa(lo), khi, mhi]


class GroupedProgram:
    """``prod_j C_j^dag exp(-i dt Lambda_j) C_j`` compiled to an op list.

    With ``tables`` the diagonal factor of a group whose z masks span at most
    ``TABLE_MAX_RANK`` dimensions is precomputed once for the fixed ``dt``;
    otherwise the per-term kernel is used. With ``fuse`` the CNOT and S/CZ
    layers of each circuit become one out-of-place permute-and-phase pass
    (needs a second state-sized buffer); otherwise one pass per CNOT batch
    plus one phase pass.
    """

    def __init__(self, groups: Sequence[DiagonalGroup], dt: float, tables: bool = True,
                 fuse: bool | None = None):
        ops, ints, reals, table = [], [], [], []
        n = groups[0].n_qubits if groups else 1
        if fuse is None:
            fuse = n <= FUSE_MAX_QUBITS
        t_off = 0

        def middle(circ, inverse):
            batches = [(ctrl, sum(1 << t for t in ts)) for ctrl, ts in circ.cnot_batches()]
            if not (batches or circ.s_layer or circ.czs):
                return
            if fuse:
                ops.append((K.OP_PERM, len(ints), 1 << min(n, K.WHT_BLOCK_BITS), 0))
                for arr in middle_tables(n, circ, inverse):
                    ints.extend(arr.tolist())
                return
            if not inverse:
                ops.extend((K.OP_CNOT, ctrl, m, 0) for ctrl, m in batches)
            if circ.s_layer or circ.czs:
                smask = sum(1 << q for q in circ.s_layer)
                ops.append((K.OP_PHASE, smask, -1 if inverse else 1, len(ints)))
                ints.extend(neighbour_masks(n, circ.czs).tolist())
            if inverse:
                ops.extend((K.OP_CNOT, ctrl, m, 0) for ctrl, m in reversed(batches))

        for g in groups:
            c = g.circuit
            ops += [(K.OP_H, q, 0, 0) for q in c.h_pre]
            middle(c, False)
            ops += [(K.OP_H, q, 0, 0) for q in c.h_post]
            tab = phase_table(n, g.z_masks, g.signed_coeffs, dt) if tables else None
            if tab is None:
                ops.append((diag_opcode(n, len(g)), len(ints), len(g), 0))
                ints.extend(g.z_masks)
                reals.extend([0.0] * (len(ints) - len(g) - len(reals)))
                reals.extend(g.signed_coeffs)
            else:
                ylo, yhi, values = tab
                ops.append((K.OP_DIAG_TABLE, len(ints), len(ylo), t_off))
                ints.extend(ylo.tolist())
                ints.extend(yhi.tolist())
                table.append(values)
                t_off += len(values)
            ops += [(K.OP_H, q, 0, 0) for q in c.h_post]
            middle(c, True)
            ops += [(K.OP_H, q, 0, 0) for q in c.h_pre]
        reals.extend([0.0] * (len(ints) - len(reals)))
        self.dt = dt
        self.n_qubits = n
        self.ops = np.array(ops, dtype=np.int64).reshape(-1, 4)
        self.ints = np.array(ints, dtype=np.int64)
        self.reals = np.array(reals, dtype=np.float64)
        self.table = np.concatenate(table) if table else np.zeros(1, dtype=np.complex128)
        self.needs_scratch = bool(len(self.ops)) and bool((self.ops[:, 0] == K.OP_PERM).any())
        self._scratch = None

    def __len__(self):
        return len(self.ops)

    def run(self, psi: StateVector, n_steps: int = 1):
        amp = psi.amplitudes
        if self.needs_scratch:
            if self._scratch is None or len(self._scratch) != len(amp):
                self._scratch = np.empty_like(amp)
            scratch = self._scratch
        else:
            scratch = amp[:0]
        K.run_program(amp, scratch, self.ops, self.ints, self.reals, self.table, self.dt, n_steps)


def diagonalize_hamiltonian(h: Hamiltonian) -> list[DiagonalGroup]:
    return [diagonalize_group(g) for g in greedy_partition(h)]


def evolve_baseline(h: Hamiltonian, psi: StateVector, plan: EvolutionPlan) -> StateVector:
    """Apply ``(prod_k exp(-i c_k P_k dt))^n_steps`` in place."""
    _check(h.n_qubits, psi)
    RotationProgram(ordered_terms(h, plan.term_order), plan.dt).run(psi, plan.n_steps)
    return psi


def evolve_grouped(groups: Sequence[DiagonalGroup], psi: StateVector, plan: EvolutionPlan,
                   tables: bool = True) -> StateVector:
    """Apply ``(prod_j C_j^dag exp(-i Lambda_j dt) C_j)^n_steps`` in place."""
    if groups:
        _check(groups[0].n_qubits, psi)
    GroupedProgram(groups, plan.dt, tables).run(psi, plan.n_steps)
    return psi


def evolve(h: Hamiltonian, psi: StateVector, plan: EvolutionPlan) -> StateVector:
    if plan.method == "baseline":
        return evolve_baseline(h, psi, plan)
    return evolve_grouped(diagonalize_hamiltonian(h), psi, plan)


def exact_evolve(h: Hamiltonian, psi: StateVector, t: float) -> StateVector:
    """``expm(-i H t) psi`` via Hermitian eigendecomposition (n <= 12)."""
    _check(h.n_qubits, psi)
    if h.n_qubits > EXACT_MAX_QUBITS:
        raise ValueError(f"exact evolution limited to {EXACT_MAX_QUBITS} qubits, got {h.n_qubits}")
    evals, evecs = np.linalg.eigh(h.to_matrix())
    coeffs = evecs.conj().T @ psi.amplitudes
    return StateVector(psi.n_qubits, evecs @ (np.exp(-1j * t * evals) * coeffs))


class ImaginaryEnergyWarning(RuntimeWarning):
    pass


def expectation(h: Hamiltonian, psi: StateVector, imag_tol: float = 1e-9) -> float:
    """``<psi|H|psi>``; warns if the imaginary residue exceeds ``imag_tol``."""
    _check(h.n_qubits, psi)
    total = 0j
    for t in h.terms:
        p = t.pauli
        total += t.coeff * K.pauli_expectation(psi.amplitudes, p.x_mask, p.z_mask, p.phase_exp)
    if abs(total.imag) > imag_tol:
        warnings.warn(f"expectation has imaginary part {total.imag:.3g}", ImaginaryEnergyWarning)
    return float(total.real)
