"""Dense reference implementations, built only from numpy primitives."""
from __future__ import annotations

import random
from functools import reduce

import numpy as np
from scipy.linalg import expm

from simdiag.pauli import PauliString
from simdiag.tableau import BinaryTableau

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
H1 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S1 = np.diag([1, 1j])
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)

# Fixtures from the worked examples.
WORKED_GROUP = "YIXI IXIY XZYZ YZXZ XIYI IYIX ZXZY ZYZX".split()
WORKED_DIAGONAL = [(-1, "ZIII"), (1, "IZII"), (-1, "ZIZI"), (-1, "ZIIZ"),
                   (-1, "ZIZZ"), (1, "IZIZ"), (1, "IZZZ"), (1, "IZZI")]
EIGHT_TERM_GROUP = "ZYXI ZXYI IYXZ IXYZ YIZX YZIX XIZY XZIY".split()


def kron_qubits(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    """Tensor product with qubit 0 as the least significant factor."""
    return reduce(np.kron, [ops.get(q, I2) for q in reversed(range(n))], np.eye(1, dtype=complex))


def pauli_matrix(text: str) -> np.ndarray:
    return kron_qubits({q: PAULI[ch] for q, ch in enumerate(text)}, len(text))


def gate_matrix(name: str, qubits, n: int) -> np.ndarray:
    if name == "h":
        return kron_qubits({qubits[0]: H1}, n)
    if name == "s":
        return kron_qubits({qubits[0]: S1}, n)
    c, t = qubits
    if name == "cnot":
        return kron_qubits({c: P0}, n) + kron_qubits({c: P1, t: PAULI["X"]}, n)
    if name == "cz":
        return kron_qubits({c: P0}, n) + kron_qubits({c: P1, t: PAULI["Z"]}, n)
    raise ValueError(name)


def circuit_matrix(circuit) -> np.ndarray:
    n = circuit.n_qubits
    u = np.eye(1 << n, dtype=complex)
    for name, qs in circuit.gates():
        u = gate_matrix(name, qs, n) @ u
    return u


def hamiltonian_matrix(h) -> np.ndarray:
    return sum(t.coeff * pauli_matrix(str(t.pauli)) for t in h.terms)


def evolve_dense(h, psi: np.ndarray, t: float) -> np.ndarray:
    return expm(-1j * t * hamiltonian_matrix(h)) @ psi


def trotter_dense(terms, psi: np.ndarray, dt: float, steps: int) -> np.ndarray:
    """Product of per-term dense exponentials, ``steps`` times."""
    step = np.eye(len(psi), dtype=complex)
    for c, text in terms:
        step = expm(-1j * c * dt * pauli_matrix(text)) @ step
    return np.linalg.matrix_power(step, steps) @ psi


def deficit(a: np.ndarray, b: np.ndarray) -> float:
    return 1.0 - abs(np.vdot(a, b))


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def random_pauli_text(rng: random.Random, n: int) -> str:
    return "".join(rng.choice("IXYZ") for _ in range(n))


def random_commuting_group(rng: random.Random, n: int, n_gen: int | None = None, extra: int = 4):
    """Random commuting Pauli set: products of random Z strings, conjugated by a random Clifford word."""
    n_gen = rng.randint(1, n) if n_gen is None else n_gen
    zs = [rng.randrange(1, 1 << n) for _ in range(n_gen)]
    for _ in range(extra):
        v = 0
        for z in zs:
            if rng.random() < 0.5:
                v ^= z
        if v:
            zs.append(v)
    tab = BinaryTableau(n, [0] * len(zs), zs)
    for _ in range(rng.randrange(0, 4 * n * n + 1)):
        g = rng.choice(["h", "s", "cnot", "cz"] if n > 1 else ["h", "s"])
        if g in ("h", "s"):
            tab.apply_gate(g, rng.randrange(n))
        else:
            tab.apply_gate(g, *rng.sample(range(n), 2))
    return list(dict.fromkeys(tab.row_pauli(i)[0] for i in range(tab.rows)))


def pauli_from_text(text: str) -> PauliString:
    x = z = 0
    for q, ch in enumerate(text):
        if ch in "XY":
            x |= 1 << q
        if ch in "ZY":
            z |= 1 << q
    return PauliString(len(text), x, z)


def random_hamiltonian(rng: random.Random, n: int, m: int):
    """Commuting clusters plus loose random strings, unit-scale coefficients."""
    from simdiag.hamiltonian import Hamiltonian

    terms = []
    while len(terms) < m:
        if rng.random() < 0.5:
            terms += [(rng.uniform(-1, 1), p) for p in random_commuting_group(rng, n)]
        else:
            terms.append((rng.uniform(-1, 1), PauliString(n, rng.randrange(1 << n), rng.randrange(1 << n))))
    return Hamiltonian.from_terms(n, terms[:m])
