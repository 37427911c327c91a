"""Pauli strings in binary symplectic form.

Qubit convention used throughout the package: qubit ``q`` (0-based) is the
``q``-th character of the text form counted from the left, bit ``q`` of the
x/z masks, and bit ``q`` of a state-vector basis index.
"""
from __future__ import annotations

from dataclasses import dataclass

_CHARS = "IXZY"  # index = x | (z << 1)


class PauliParseError(ValueError):
    """Raised for malformed Pauli text."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """Hermitian Pauli operator ``i**phase_exp * prod_q X^x_q Z^z_q``.

    ``phase_exp`` always equals the number of Y factors mod 4, so the
    operator is exactly the literal tensor product of I/X/Y/Z.
    """

    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        full = (1 << self.n_qubits) - 1
        if self.n_qubits < 0 or self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask has bits beyond n_qubits")

    @property
    def phase_exp(self) -> int:
        return _popcount(self.x_mask & self.z_mask) % 4

    @property
    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    def is_diagonal(self) -> bool:
        return self.x_mask == 0

    def char(self, q: int) -> str:
        return _CHARS[((self.x_mask >> q) & 1) | (((self.z_mask >> q) & 1) << 1)]

    def __str__(self) -> str:
        return "".join(self.char(q) for q in range(self.n_qubits))

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def to_matrix(self):
        """Dense ``2**n x 2**n`` matrix (small n only, used by oracles)."""
        import numpy as np

        mats = {
            "I": np.eye(2, dtype=complex),
            "X": np.array([[0, 1], [1, 0]], dtype=complex),
            "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
            "Z": np.array([[1, 0], [0, -1]], dtype=complex),
        }
        out = np.ones((1, 1), dtype=complex)
        # basis index bit q is qubit q, so qubit 0 is the least significant factor
        for q in range(self.n_qubits):
            out = np.kron(mats[self.char(q)], out)
        return out

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)


def parse_pauli(text: str, n: int | None = None) -> PauliString:
    """Parse a string over ``{I,X,Y,Z}``; the leftmost character is qubit 0."""
    text = text.strip()
    if n is not None and len(text) != n:
        raise PauliParseError(f"expected {n} Pauli characters, got {len(text)} in {text!r}")
    x = z = 0
    for q, ch in enumerate(text.upper()):
        code = _CHARS.find(ch)
        if code < 0:
            raise PauliParseError(f"invalid Pauli character {ch!r} at position {q + 1}")
        x |= (code & 1) << q
        z |= (code >> 1) << q
    return PauliString(len(text), x, z)


def _check_dims(a: PauliString, b: PauliString):
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")


def commutes(a: PauliString, b: PauliString) -> bool:
    """Symplectic commutation test."""
    _check_dims(a, b)
    return (_popcount(a.x_mask & b.z_mask) + _popcount(a.z_mask & b.x_mask)) % 2 == 0


def multiply(a: PauliString, b: PauliString) -> tuple[PauliString, int]:
    """Return ``(c, k)`` with ``a @ b == 1j**k * c`` and ``c`` canonical."""
    _check_dims(a, b)
    c = PauliString(a.n_qubits, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask)
    # moving Z^za past X^xb costs (-1)^{za.xb}
    k = a.phase_exp + b.phase_exp + 2 * _popcount(a.z_mask & b.x_mask) - c.phase_exp
    return c, k % 4


@dataclass(frozen=True)
class WeightedTerm:
    coeff: float
    pauli: PauliString

    def __post_init__(self):
        import math

        if isinstance(self.coeff, complex) or not math.isfinite(self.coeff):
            raise ValueError(f"coefficient must be finite and real, got {self.coeff!r}")
