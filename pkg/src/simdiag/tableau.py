"""Binary symplectic tableau with sign tracking under Clifford conjugation.

Row ``k`` stores the x/z masks of one Pauli string and a sign bit ``r_k``;
after applying gates ``U1, U2, ...`` the row represents
``(-1)**r_k * (... U2 U1) P (U1^dag U2^dag ...)``.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .pauli import PauliString

MAX_QUBITS = 64
_ONE = np.uint64(1)


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank over GF(2) of integers viewed as bit vectors."""
    pivots: dict[int, int] = {}  # leading bit -> basis vector
    for v in rows:
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                break
            v ^= pivots[top]
    return len(pivots)


class BinaryTableau:
    """m x (2n + 1) bit matrix: X block | Z block | sign column."""

    def __init__(self, n_qubits: int, x, z, sign=None):
        if not 0 < n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}")
        self.n_qubits = n_qubits
        self.x = np.asarray(x, dtype=np.uint64).copy()
        self.z = np.asarray(z, dtype=np.uint64).copy()
        if sign is None:
            sign = np.zeros(len(self.x), dtype=np.uint8)
        self.sign = np.asarray(sign, dtype=np.uint8).copy()
        if not (self.x.shape == self.z.shape == self.sign.shape) or self.x.ndim != 1:
            raise ValueError("inconsistent tableau dimensions")

    @classmethod
    def from_terms(cls, terms: Sequence[PauliString]) -> "BinaryTableau":
        if not terms:
            raise ValueError("cannot build a tableau from zero terms")
        n = terms[0].n_qubits
        if any(t.n_qubits != n for t in terms):
            raise ValueError("all terms must share n_qubits")
        return cls(n, [t.x_mask for t in terms], [t.z_mask for t in terms])

    @property
    def rows(self) -> int:
        return len(self.x)

    def copy(self) -> "BinaryTableau":
        return BinaryTableau(self.n_qubits, self.x, self.z, self.sign)

    def row_pauli(self, k: int) -> tuple[PauliString, int]:
        """Row ``k`` as ``(pauli, sign_bit)``."""
        return PauliString(self.n_qubits, int(self.x[k]), int(self.z[k])), int(self.sign[k])

    def _check(self, *qubits):
        for q in qubits:
            if not 0 <= q < self.n_qubits:
                raise IndexError(f"qubit {q} out of range for {self.n_qubits} qubits")
        if len(set(qubits)) != len(qubits):
            raise ValueError("two-qubit gate needs distinct qubits")

    def _col(self, block, q):
        return (block >> np.uint64(q)) & _ONE

    # -- Clifford updates -------------------------------------------------

    def apply_h(self, t: int):
        self._check(t)
        xt, zt = self._col(self.x, t), self._col(self.z, t)
        self.sign ^= (xt & zt).astype(np.uint8)
        flip = (xt ^ zt) << np.uint64(t)
        self.x ^= flip
        self.z ^= flip

    def apply_s(self, t: int):
        self._check(t)
        xt, zt = self._col(self.x, t), self._col(self.z, t)
        self.sign ^= (xt & zt).astype(np.uint8)
        self.z ^= xt << np.uint64(t)

    def apply_cnot(self, c: int, t: int):
        self._check(c, t)
        xc, zc = self._col(self.x, c), self._col(self.z, c)
        xt, zt = self._col(self.x, t), self._col(self.z, t)
        self.sign ^= (xc & zt & (xt ^ zc ^ _ONE)).astype(np.uint8)
        self.x ^= xc << np.uint64(t)
        self.z ^= zt << np.uint64(c)

    def apply_cz(self, c: int, t: int):
        self._check(c, t)
        xc, zc = self._col(self.x, c), self._col(self.z, c)
        xt, zt = self._col(self.x, t), self._col(self.z, t)
        self.sign ^= (xc & xt & (zt ^ zc)).astype(np.uint8)
        self.z ^= (xc << np.uint64(t)) | (xt << np.uint64(c))

    def apply_gate(self, name: str, *qubits: int):
        getattr(self, "apply_" + name.lower())(*qubits)

    def swap_rows(self, i: int, j: int):
        for arr in (self.x, self.z, self.sign):
            arr[[i, j]] = arr[[j, i]]

    # -- queries ----------------------------------------------------------

    def x_bit(self, row: int, q: int) -> int:
        return int(self.x[row] >> np.uint64(q)) & 1

    def z_bit(self, row: int, q: int) -> int:
        return int(self.z[row] >> np.uint64(q)) & 1

    def rank_x_block(self) -> int:
        return gf2_rank(int(v) for v in self.x)

    def x_block_is_zero(self) -> bool:
        return not self.x.any()

    def pad_to_square(self) -> "BinaryTableau":
        """Copy with all-zero rows appended up to ``n_qubits`` rows."""
        n, m = self.n_qubits, self.rows
        if m > n:
            raise ValueError(f"tableau has {m} rows, more than n_qubits={n}")
        pad = np.zeros(n - m, dtype=np.uint64)
        return BinaryTableau(n, np.concatenate([self.x, pad]), np.concatenate([self.z, pad]),
                             np.concatenate([self.sign, pad.astype(np.uint8)]))

    def dump(self) -> str:
        """One line per row: x bits | z bits | r, qubit 0 leftmost."""
        n = self.n_qubits
        lines = []
        for k in range(self.rows):
            xs = "".join(str(self.x_bit(k, q)) for q in range(n))
            zs = "".join(str(self.z_bit(k, q)) for q in range(n))
            lines.append(f"{xs}|{zs}|{int(self.sign[k])}")
        return "\n".join(lines)

    def __repr__(self):
        return f"BinaryTableau(n_qubits={self.n_qubits}, rows={self.rows})\n{self.dump()}"


def independent_subset(terms: Sequence[PauliString]) -> list[int]:
    """Indices of a maximal GF(2)-independent subset of ``terms``.

    Row-swap and forward XOR elimination over the 2n columns (x bits of
    qubits 0..n-1, then z bits). Returned indices point into ``terms`` and are
    ordered as the surviving rows of the reduced tableau.
    """
    if not terms:
        return []
    n = terms[0].n_qubits
    rows = [t.x_mask | (t.z_mask << n) for t in terms]
    origin = list(range(len(terms)))
    n_rows, n_cols = len(rows), 2 * n
    ir = ic = 0
    while ir < n_rows and ic < n_cols:
        bit = 1 << ic
        if not rows[ir] & bit:
            j = next((j for j in range(ir + 1, n_rows) if rows[j] & bit), None)
            if j is None:
                ic += 1
                continue
            rows[ir], rows[j] = rows[j], rows[ir]
            origin[ir], origin[j] = origin[j], origin[ir]
        for k in range(ir + 1, n_rows):
            if rows[k] & bit:
                rows[k] ^= rows[ir]
        ir += 1
        ic += 1
    return [origin[k] for k in range(n_rows) if rows[k]]
