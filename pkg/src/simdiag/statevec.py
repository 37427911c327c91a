"""Dense state vector and the gate / fused-layer operations on it."""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .diagonalizer import CliffordCircuit, DiagonalGroup
from .pauli import WeightedTerm

UNITARY_TOL = 1e-10


class PassCounter:
    """Per-amplitude read/write tallies for instrumented kernel calls."""

    def __init__(self, n_qubits: int):
        self.counts = np.zeros((2, 1 << n_qubits), dtype=np.int64)

    @property
    def reads(self) -> np.ndarray:
        return self.counts[0]

    @property
    def writes(self) -> np.ndarray:
        return self.counts[1]

    def reset(self):
        self.counts[:] = 0


def _counts(counter: PassCounter | None):
    return K.NO_COUNTS if counter is None else counter.counts


def _mask(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def neighbour_masks(n: int, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    """Per-qubit mask of higher-indexed CZ partners (for the phase kernel)."""
    nbr = np.zeros(n, dtype=np.int64)
    for a, b in pairs:
        lo, hi = min(a, b), max(a, b)
        nbr[lo] ^= 1 << hi
    return nbr


class StateVector:
    """``2**n`` complex amplitudes; basis index bit ``q`` is qubit ``q``."""

    def __init__(self, n_qubits: int, amplitudes: np.ndarray | None = None):
        if n_qubits < 1 or n_qubits > 40:
            raise ValueError("n_qubits out of range")
        self.n_qubits = n_qubits
        if amplitudes is None:
            amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
            amplitudes[0] = 1.0
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << n_qubits,):
            raise ValueError(f"expected {1 << n_qubits} amplitudes, got {amplitudes.shape}")
        self.amplitudes = amplitudes

    # -- construction ---------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        return cls(n)

    @classmethod
    def basis(cls, n: int, index: int) -> "StateVector":
        amp = np.zeros(1 << n, dtype=np.complex128)
        amp[index] = 1.0
        return cls(n, amp)

    @classmethod
    def plus(cls, n: int) -> "StateVector":
        return cls(n, np.full(1 << n, 1 / math.sqrt(1 << n), dtype=np.complex128))

    @classmethod
    def random(cls, n: int, seed=None) -> "StateVector":
        rng = np.random.default_rng(seed)
        amp = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        return cls(n, amp / np.linalg.norm(amp))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def __len__(self):
        return len(self.amplitudes)

    # -- raw dump ---------------------------------------------------------------

    def save(self, path):
        """Little-endian (re, im) float64 pairs, index = basis bitstring."""
        self.amplitudes.astype("<c16").tofile(path)

    @classmethod
    def load(cls, path) -> "StateVector":
        amp = np.fromfile(path, dtype="<c16")
        n = int(round(math.log2(len(amp))))
        if len(amp) != 1 << n:
            raise ValueError("state file length is not a power of two")
        return cls(n, amp.astype(np.complex128))

    # -- checks -----------------------------------------------------------------

    def _check_qubit(self, *qs: int):
        for q in qs:
            if not 0 <= q < self.n_qubits:
                raise IndexError(f"qubit {q} out of range for {self.n_qubits} qubits")
        if len(set(qs)) != len(qs):
            raise ValueError("qubits must be distinct")

    @staticmethod
    def _check_unitary(u: np.ndarray):
        if not np.allclose(u.conj().T @ u, np.eye(len(u)), atol=UNITARY_TOL):
            raise ValueError("matrix is not unitary")

    # -- generic gates ------------------------------------------------------------

    def apply_single_qubit(self, u, q: int):
        u = np.asarray(u, dtype=np.complex128)
        self._check_qubit(q)
        self._check_unitary(u)
        K.single_qubit(self.amplitudes, u, q)

    def apply_two_qubit(self, u, q0: int, q1: int):
        """``u`` acts on the local index ``b_q0 + 2 * b_q1`` (``q0`` is the low bit)."""
        u = np.asarray(u, dtype=np.complex128)
        self._check_qubit(q0, q1)
        self._check_unitary(u)
        K.two_qubit(self.amplitudes, u, q0, q1)

    def apply_h(self, q: int):
        self._check_qubit(q)
        K.hadamard(self.amplitudes, q)

    # -- fused kernels --------------------------------------------------------------

    def apply_batched_cnot(self, control: int, targets: Iterable[int], counter: PassCounter | None = None):
        targets = sorted(set(targets))
        if not targets:
            raise ValueError("need at least one target")
        if control in targets:
            raise ValueError("control qubit is also a target")
        self._check_qubit(control, *targets)
        K.cnot_batch(self.amplitudes, control, _mask(targets), _counts(counter))

    def apply_phase_layer(self, s_targets: Iterable[int] = (), cz_pairs: Iterable[tuple[int, int]] = (),
                          dagger: bool = False, counter: PassCounter | None = None):
        """All S (or S^dagger) and CZ gates of a layer in one pass."""
        s_targets, cz_pairs = list(s_targets), list(cz_pairs)
        self._check_qubit(*set(s_targets))
        for a, b in cz_pairs:
            self._check_qubit(a, b)
        K.phase_layer(self.amplitudes, _mask(s_targets), -1 if dagger else 1,
                      neighbour_masks(self.n_qubits, cz_pairs), _counts(counter))

    def apply_diagonal_exp(self, d: DiagonalGroup | Sequence[tuple[float, int]], dt: float,
                           counter: PassCounter | None = None):
        """Multiply by ``exp(-i dt Lambda)`` for the group's diagonal operator."""
        if not math.isfinite(dt):
            raise ValueError("dt must be finite")
        if isinstance(d, DiagonalGroup):
            zm, cf = d.z_masks, d.signed_coeffs
        else:
            cf, zm = zip(*d) if d else ((), ())
        kernel = K.diag_wht if len(zm) > min(self.n_qubits, K.WHT_BLOCK_BITS) else K.diag_exp
        kernel(self.amplitudes, np.asarray(zm, dtype=np.int64), np.asarray(cf, dtype=np.float64),
               float(dt), _counts(counter))

    def apply_pauli_rotation(self, term: WeightedTerm, dt: float):
        """``exp(-i coeff dt P)`` as one paired-amplitude pass."""
        p = term.pauli
        if p.n_qubits != self.n_qubits:
            raise ValueError("term size does not match state")
        K.pauli_rotation(self.amplitudes, p.x_mask, p.z_mask, p.phase_exp, term.coeff * dt)

    def apply_clifford(self, c: CliffordCircuit):
        """H layer, one batched CNOT per control, one S/CZ pass, H layer."""
        for q in c.h_pre:
            K.hadamard(self.amplitudes, q)
        for ctrl, ts in c.cnot_batches():
            K.cnot_batch(self.amplitudes, ctrl, _mask(ts), K.NO_COUNTS)
        if c.s_layer or c.czs:
            self.apply_phase_layer(c.s_layer, c.czs)
        for q in c.h_post:
            K.hadamard(self.amplitudes, q)

    def apply_clifford_inverse(self, c: CliffordCircuit):
        """``C^dagger``: layers reversed, S replaced by S^dagger."""
        for q in c.h_post:
            K.hadamard(self.amplitudes, q)
        if c.s_layer or c.czs:
            self.apply_phase_layer(c.s_layer, c.czs, dagger=True)
        for ctrl, ts in reversed(c.cnot_batches()):
            K.cnot_batch(self.amplitudes, ctrl, _mask(ts), K.NO_COUNTS)
        for q in c.h_pre:
            K.hadamard(self.amplitudes, q)

    # -- measures -----------------------------------------------------------------

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def norm(a: StateVector) -> float:
    return a.norm()


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|`` (insensitive to global phase)."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("state dimension mismatch")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))
