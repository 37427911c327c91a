"""Dense gate matrices and embedding helpers (small-n oracles)."""
from __future__ import annotations

import numpy as np

SQ2 = 1 / np.sqrt(2)
H = np.array([[1, 1], [1, -1]], dtype=complex) * SQ2
S = np.diag([1, 1j])
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0 + 0j, -1.0])
# two-qubit matrices in the basis |q1 q0> with q0 = first listed qubit (control)
CNOT = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)

MATRICES = {"h": H, "s": S, "x": X, "y": Y, "z": Z, "cnot": CNOT, "cz": CZ}


def embed(u: np.ndarray, qubits, n: int) -> np.ndarray:
    """Full ``2**n`` matrix of ``u`` acting on ``qubits``.

    Local index bit ``k`` of ``u`` corresponds to ``qubits[k]``.
    """
    k = len(qubits)
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        loc = 0
        for j, q in enumerate(qubits):
            loc |= ((col >> q) & 1) << j
        base = col
        for q in qubits:
            base &= ~(1 << q)
        for row_loc in range(1 << k):
            amp = u[row_loc, loc]
            if amp == 0:
                continue
            row = base
            for j, q in enumerate(qubits):
                row |= ((row_loc >> j) & 1) << q
            out[row, col] += amp
    return out
