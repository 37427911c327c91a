"""Hamiltonian container, text I/O and greedy commuting partition."""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .pauli import PauliParseError, PauliString, WeightedTerm, commutes, parse_pauli

DROP_TOLERANCE = 1e-12


class HamiltonianLoadError(ValueError):
    """Malformed Hamiltonian input; message carries the line number."""


@dataclass(frozen=True)
class Hamiltonian:
    n_qubits: int
    terms: tuple[WeightedTerm, ...]

    def __post_init__(self):
        for t in self.terms:
            if t.pauli.n_qubits != self.n_qubits:
                raise ValueError("all terms must act on n_qubits qubits")

    @property
    def m(self) -> int:
        return len(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[float, PauliString | str]],
                   drop_tolerance: float = DROP_TOLERANCE) -> "Hamiltonian":
        """Build with duplicate merging; first-seen order is kept."""
        acc: dict[PauliString, float] = {}
        for coeff, p in terms:
            if isinstance(p, str):
                p = parse_pauli(p, n_qubits)
            WeightedTerm(coeff, p)  # validates the coefficient
            acc[p] = acc.get(p, 0.0) + float(coeff)
        kept = tuple(WeightedTerm(c, p) for p, c in acc.items() if abs(c) > drop_tolerance)
        return cls(n_qubits, kept)

    def to_matrix(self):
        """Dense matrix for small systems.

        ``P`` maps ``|b>`` to ``i^ny (-1)^{|b & z|} |b ^ x>``, one entry per column.
        """
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim, dtype=np.int64)
        for t in self.terms:
            p = t.pauli
            sign = 1 - 2 * (np.bitwise_count(cols & p.z_mask).astype(np.int64) & 1)
            out[cols ^ p.x_mask, cols] += t.coeff * 1j ** p.phase_exp * sign
        return out

    def dumps(self) -> str:
        return "".join(f"{t.coeff!r} {t.pauli}\n" for t in self.terms)

    def save(self, path: str | os.PathLike):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())


def load(source, drop_tolerance: float = DROP_TOLERANCE) -> Hamiltonian:
    """Read ``<coeff> <pauli>`` lines from a path or text stream.

    ``#`` starts a comment. The qubit count comes from the first data line.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return load(fh, drop_tolerance)
    n = None
    raw = []
    for lineno, line in enumerate(source, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise HamiltonianLoadError(f"line {lineno}: expected '<coeff> <pauli>', got {line!r}")
        try:
            coeff = float(parts[0])
        except ValueError:
            raise HamiltonianLoadError(f"line {lineno}: coefficient {parts[0]!r} is not a real number") from None
        if not math.isfinite(coeff):
            raise HamiltonianLoadError(f"line {lineno}: coefficient must be finite")
        if n is None:
            n = len(parts[1])
        try:
            p = parse_pauli(parts[1], n)
        except PauliParseError as exc:
            raise HamiltonianLoadError(f"line {lineno}: {exc}") from None
        raw.append((coeff, p))
    if n is None:
        raise HamiltonianLoadError("no terms found")
    return Hamiltonian.from_terms(n, raw, drop_tolerance)


def loads(text: str, drop_tolerance: float = DROP_TOLERANCE) -> Hamiltonian:
    return load(io.StringIO(text), drop_tolerance)


@dataclass
class CommutingGroup:
    group_index: int
    terms: list[WeightedTerm] = field(default_factory=list)

    def __len__(self):
        return len(self.terms)

    @property
    def paulis(self) -> list[PauliString]:
        return [t.pauli for t in self.terms]


def greedy_partition(h: Hamiltonian | Sequence[WeightedTerm]) -> list[CommutingGroup]:
    """First-fit partition into mutually commuting groups.

    Terms are scanned in order; each goes to the earliest group all of whose
    members commute with it, otherwise it opens a new group.
    """
    groups: list[CommutingGroup] = []
    # per group: list of (x, z) masks for a cheap inner loop
    masks: list[list[tuple[int, int]]] = []
    for term in h:
        px, pz = term.pauli.x_mask, term.pauli.z_mask
        for g, gm in zip(groups, masks):
            if all(((px & oz).bit_count() + (pz & ox).bit_count()) & 1 == 0 for ox, oz in gm):
                g.terms.append(term)
                gm.append((px, pz))
                break
        else:
            groups.append(CommutingGroup(len(groups), [term]))
            masks.append([(px, pz)])
    return groups


class PartitionStats(NamedTuple):
    m: int
    n_groups: int
    max_group_size: int
    predicted_speedup: float


def partition_stats(groups: Sequence[CommutingGroup], n_qubits: int) -> PartitionStats:
    """Term count, group count and the ``m / (n * n_g)`` speedup estimate."""
    m = sum(len(g) for g in groups)
    ng = len(groups)
    if ng == 0 or n_qubits == 0:
        return PartitionStats(m, ng, 0, 0.0)
    return PartitionStats(m, ng, max(len(g) for g in groups), m / (n_qubits * ng))


def is_commuting(paulis: Sequence[PauliString]) -> bool:
    return all(commutes(a, b) for i, a in enumerate(paulis) for b in paulis[i + 1:])
