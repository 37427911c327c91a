"""Clifford synthesis that simultaneously diagonalizes a commuting group.

The circuit has the fixed layer structure ``H -> CNOT -> CZ/S -> H``. It is
found on a square tableau of independent group members and then replayed on
every member to read off the signed Z strings.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .hamiltonian import CommutingGroup
from .pauli import PauliString, WeightedTerm
from .tableau import BinaryTableau, gf2_rank, independent_subset


class SynthesisError(RuntimeError):
    """The synthesized circuit failed to diagonalize the group."""


@dataclass(frozen=True)
class CliffordCircuit:
    """Layered Clifford ``C``; gates act in the order listed by :meth:`gates`."""

    n_qubits: int
    h_pre: tuple[int, ...] = ()
    cnots: tuple[tuple[int, int], ...] = ()
    czs: tuple[tuple[int, int], ...] = ()
    s_layer: tuple[int, ...] = ()
    h_post: tuple[int, ...] = ()

    def __post_init__(self):
        if list(self.cnots) != sorted(self.cnots):
            raise ValueError("CNOTs must be sorted by (control, target)")
        if any(c == t for c, t in self.cnots):
            raise ValueError("CNOT with control == target")
        if any(a >= b for a, b in self.czs) or list(self.czs) != sorted(set(self.czs)):
            raise ValueError("CZ pairs must be sorted (low, high) and unique")

    @property
    def is_identity(self) -> bool:
        return not (self.h_pre or self.cnots or self.czs or self.s_layer or self.h_post)

    def gate_count(self) -> dict[str, int]:
        return {"h": len(self.h_pre) + len(self.h_post), "cnot": len(self.cnots),
                "cz": len(self.czs), "s": len(self.s_layer)}

    def gates(self) -> Iterator[tuple[str, tuple[int, ...]]]:
        """Flat gate list in application order."""
        for q in self.h_pre:
            yield "h", (q,)
        for c, t in self.cnots:
            yield "cnot", (c, t)
        for a, b in self.czs:
            yield "cz", (a, b)
        for q in self.s_layer:
            yield "s", (q,)
        for q in self.h_post:
            yield "h", (q,)

    def cnot_batches(self) -> list[tuple[int, tuple[int, ...]]]:
        """CNOTs grouped by control, controls ascending."""
        out: dict[int, list[int]] = {}
        for c, t in self.cnots:
            out.setdefault(c, []).append(t)
        return [(c, tuple(ts)) for c, ts in out.items()]

    def apply_to_tableau(self, tab: BinaryTableau):
        for name, qs in self.gates():
            tab.apply_gate(name, *qs)

    def to_matrix(self):
        """Dense unitary (small n; oracle use)."""
        from . import gates

        u = np.eye(1 << self.n_qubits, dtype=complex)
        for name, qs in self.gates():
            u = gates.embed(gates.MATRICES[name], qs, self.n_qubits) @ u
        return u

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "h_pre": list(self.h_pre),
                "cnots": [list(p) for p in self.cnots], "czs": [list(p) for p in self.czs],
                "s_layer": list(self.s_layer), "h_post": list(self.h_post)}

    @classmethod
    def from_dict(cls, d: dict) -> "CliffordCircuit":
        return cls(d["n_qubits"], tuple(d["h_pre"]), tuple(map(tuple, d["cnots"])),
                   tuple(map(tuple, d["czs"])), tuple(d["s_layer"]), tuple(d["h_post"]))


@dataclass
class DiagonalGroup:
    """``C P_k C^dag = sign_k * Z^{z_k}`` for each source term ``k``."""

    group_index: int
    n_qubits: int
    z_masks: list[int]
    signed_coeffs: list[float]
    circuit: CliffordCircuit
    source: list[WeightedTerm] = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.z_masks)

    def diagonal_terms(self) -> list[tuple[float, PauliString]]:
        return [(c, PauliString(self.n_qubits, 0, z)) for c, z in zip(self.signed_coeffs, self.z_masks)]

    def to_dict(self) -> dict:
        width = max(1, (self.n_qubits + 3) // 4)
        return {"group_index": self.group_index,
                "terms": [str(t.pauli) for t in self.source],
                "z_masks": [f"0x{z:0{width}x}" for z in self.z_masks],
                "signed_coeffs": list(self.signed_coeffs),
                "circuit": self.circuit.to_dict()}


# -- qubit classification ------------------------------------------------------

ZI_ONLY, XI_ONLY, GENERAL = "ZI", "XI", "general"


def skip_trivial_columns(paulis: Sequence[PauliString]) -> list[str]:
    """Classify each qubit as Z/I-only, X/I-only or general over the group."""
    n = paulis[0].n_qubits
    xs = zs = 0
    for p in paulis:
        xs |= p.x_mask
        zs |= p.z_mask
    out = []
    for q in range(n):
        if not (xs >> q) & 1:
            out.append(ZI_ONLY)
        elif not (zs >> q) & 1:
            out.append(XI_ONLY)
        else:
            out.append(GENERAL)
    return out


# -- synthesis steps -------------------------------------------------------------

def _x_rank_after_h(tab: BinaryTableau, q: int) -> int:
    bit = np.uint64(1 << q)
    x = (tab.x & ~bit) | (tab.z & bit)
    return gf2_rank(int(v) for v in x)


def maximize_x_rank(tab: BinaryTableau, repeat: bool = True) -> list[int]:
    """Apply H(q) wherever it strictly raises the X-block rank.

    Qubits are scanned from the highest index down. With ``repeat`` the scan
    is repeated until no H helps, which guarantees full X rank for a set of
    independent commuting rows. Returns the qubits whose H was kept.
    """
    applied: list[int] = []
    changed = True
    while changed:
        changed = False
        for q in reversed(range(tab.n_qubits)):
            if _x_rank_after_h(tab, q) > tab.rank_x_block():
                tab.apply_h(q)
                applied.append(q)
                changed = True
        if not repeat:
            break
    return applied


def clear_upper_x(tab: BinaryTableau) -> list[tuple[int, int]]:
    """CNOTs zeroing the strictly upper triangle of the X block.

    Row swaps are bookkeeping only. When a column has no pivot left (the
    independent set is smaller than ``n``) a zero padding row is parked in
    that position so every nonzero row keeps its pivot on the diagonal.
    """
    gates = []
    n = tab.n_qubits
    for i in range(n):
        if not tab.x_bit(i, i):
            j = next((j for j in range(i + 1, tab.rows) if tab.x_bit(j, i)), None)
            if j is None:
                # no pivot for column i: park a zero padding row here
                j = next((j for j in range(i + 1, tab.rows)
                          if not (tab.x[j] or tab.z[j])), None)
                if j is not None and (tab.x[i] or tab.z[i]):
                    tab.swap_rows(i, j)
                continue
            tab.swap_rows(i, j)
        for j in range(i + 1, n):
            if tab.x_bit(i, j):
                tab.apply_cnot(i, j)
                gates.append((i, j))
    return gates


def clear_z_block(tab: BinaryTableau) -> tuple[list[tuple[int, int]], list[int]]:
    """CZ gates for off-diagonal and S gates for diagonal Z-block ones."""
    czs, ss = [], []
    n = tab.n_qubits
    for i in range(n):
        for j in range(n):
            if j != i and tab.z_bit(i, j):
                tab.apply_cz(i, j)
                czs.append((i, j))
        if tab.z_bit(i, i):
            tab.apply_s(i)
            ss.append(i)
    return czs, ss


def x_to_z(tab: BinaryTableau) -> list[int]:
    """H on every qubit whose X column is nonzero."""
    cols = 0
    for v in tab.x:
        cols |= int(v)
    qs = [q for q in range(tab.n_qubits) if (cols >> q) & 1]
    for q in qs:
        tab.apply_h(q)
    return qs


def _restrict(p: PauliString, qubits: Sequence[int]) -> PauliString:
    x = z = 0
    for k, q in enumerate(qubits):
        x |= ((p.x_mask >> q) & 1) << k
        z |= ((p.z_mask >> q) & 1) << k
    return PauliString(len(qubits), x, z)


def find_clifford(group: CommutingGroup | Sequence[PauliString]) -> CliffordCircuit:
    """Synthesize the layered Clifford for a commuting group."""
    paulis = group.paulis if isinstance(group, CommutingGroup) else list(group)
    if not paulis:
        raise ValueError("empty group")
    n = paulis[0].n_qubits
    kinds = skip_trivial_columns(paulis)
    general = [q for q in range(n) if kinds[q] == GENERAL]
    h_post = {q for q in range(n) if kinds[q] == XI_ONLY}
    if not general:
        return CliffordCircuit(n, h_post=tuple(sorted(h_post)))

    sub = [_restrict(p, general) for p in paulis]
    idx = independent_subset(sub)
    if len(idx) > len(general):
        raise SynthesisError("more independent terms than qubits; group is not mutually commuting")
    tab = BinaryTableau.from_terms([sub[k] for k in idx]).pad_to_square()

    h1 = maximize_x_rank(tab)
    cx = clear_upper_x(tab)
    cz, ss = clear_z_block(tab)
    h2 = x_to_z(tab)
    if not tab.x_block_is_zero():
        raise SynthesisError("X block not cleared; group is not mutually commuting?\n" + tab.dump())

    g = general
    h_pre = set()
    for q in h1:
        h_pre ^= {g[q]}
    cz_set: set[tuple[int, int]] = set()
    for a, b in cz:
        cz_set ^= {(min(g[a], g[b]), max(g[a], g[b]))}
    return CliffordCircuit(
        n,
        h_pre=tuple(sorted(h_pre)),
        cnots=tuple((g[c], g[t]) for c, t in cx),
        czs=tuple(sorted(cz_set)),
        s_layer=tuple(sorted(g[q] for q in ss)),
        h_post=tuple(sorted(h_post | {g[q] for q in h2})),
    )


def diagonalize_group(group: CommutingGroup, circuit: CliffordCircuit | None = None) -> DiagonalGroup:
    """Synthesize ``C`` and replay it on every term of the group."""
    if circuit is None:
        circuit = find_clifford(group)
    tab = BinaryTableau.from_terms(group.paulis)
    circuit.apply_to_tableau(tab)
    if not tab.x_block_is_zero():
        raise SynthesisError(f"group {group.group_index} not simultaneously diagonalized")
    coeffs = [t.coeff * (-1.0 if s else 1.0) for t, s in zip(group.terms, tab.sign)]
    return DiagonalGroup(group.group_index, tab.n_qubits, [int(v) for v in tab.z],
                         coeffs, circuit, list(group.terms))


def dumps_groups(groups: Sequence[DiagonalGroup]) -> str:
    return json.dumps({"groups": [g.to_dict() for g in groups]}, indent=1)
