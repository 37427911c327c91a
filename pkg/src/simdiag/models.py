"""Benchmark Hamiltonians: fully connected TFIM and the q=4 SYK model."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .hamiltonian import DROP_TOLERANCE, Hamiltonian
from .pauli import PauliString, multiply

_MODEL_IDS = {"tfim": 1, "syk": 2}


class ModelError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    n_qubits: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _MODEL_IDS:
            raise ValueError(f"unknown model {self.kind!r}")
        if self.n_qubits < 2:
            raise ValueError("models need at least 2 qubits")

    def build(self) -> Hamiltonian:
        return gen_tfim(self.n_qubits, self.seed) if self.kind == "tfim" else gen_syk(self.n_qubits, self.seed)


def _rng(seed: int, model: str, *index: int) -> np.random.Generator:
    """Independent stream per (seed, model, index tuple)."""
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), _MODEL_IDS[model], *index]))


def gen_tfim(n: int, seed: int = 0) -> Hamiltonian:
    """``sum_{i<j} J_ij Z_i Z_j + sum_i h_i X_i`` with couplings U(-1, 1)."""
    if n < 2:
        raise ValueError("TFIM needs n >= 2")
    terms = []
    for i, j in itertools.combinations(range(n), 2):
        terms.append((_rng(seed, "tfim", 0, i, j).uniform(-1, 1), PauliString(n, 0, (1 << i) | (1 << j))))
    for i in range(n):
        terms.append((_rng(seed, "tfim", 1, i).uniform(-1, 1), PauliString(n, 1 << i, 0)))
    return Hamiltonian.from_terms(n, terms)


def majorana(mu: int, n: int) -> PauliString:
    """Jordan-Wigner Majorana ``c_mu`` (0-based, ``0 <= mu < 2n``).

    ``c_{2q} = Z_0 ... Z_{q-1} X_q`` and ``c_{2q+1} = Z_0 ... Z_{q-1} Y_q``.
    """
    if not 0 <= mu < 2 * n:
        raise IndexError(f"Majorana index {mu} out of range for {n} qubits")
    q = mu // 2
    tail = (1 << q) - 1
    if mu % 2 == 0:
        return PauliString(n, 1 << q, tail)
    return PauliString(n, 1 << q, tail | (1 << q))


def _product(paulis) -> tuple[PauliString, int]:
    acc, phase = paulis[0], 0
    for p in paulis[1:]:
        acc, k = multiply(acc, p)
        phase += k
    return acc, phase % 4


def _orbit(a, b, c, d):
    """Orderings tied to (a, b, c, d) by J_ijkl = -J_jikl = -J_ijlk = J*_lkji.

    Yields ``(ordering, sign, conjugate)`` with J_ordering = sign * (J or J*).
    """
    for rev in (False, True):
        base = (d, c, b, a) if rev else (a, b, c, d)
        for s1 in (False, True):
            for s2 in (False, True):
                p = list(base)
                sign = 1
                if s1:
                    p[0], p[1] = p[1], p[0]
                    sign = -sign
                if s2:
                    p[2], p[3] = p[3], p[2]
                    sign = -sign
                yield tuple(p), sign, rev


def syk_variance(n: int) -> float:
    """Variance of the real and imaginary coupling parts: 3! / N^3, N = 2n modes."""
    return 6.0 / (2 * n) ** 3


def gen_syk(n: int, seed: int = 0, *, stats: dict | None = None) -> Hamiltonian:
    """SYK Hamiltonian over ``2n`` Majorana modes mapped to ``n`` qubits.

    For each 4-subset, one complex Gaussian coupling is drawn per pairing
    class (ijkl, ikjl, iljk); the other orderings follow from the symmetry
    relations. All operator products go through :func:`multiply`, and the
    summed coefficient of every Pauli string must come out real.
    """
    if n < 2:
        raise ValueError("SYK needs n >= 2")
    sigma = math.sqrt(syk_variance(n))
    modes = [majorana(mu, n) for mu in range(2 * n)]
    acc: dict[PauliString, complex] = {}
    order: list[PauliString] = []
    n_quads = 0
    for i, j, k, l in itertools.combinations(range(2 * n), 4):
        n_quads += 1
        for rep in ((i, j, k, l), (i, k, j, l), (i, l, j, k)):
            re, im = _rng(seed, "syk", *rep).normal(0.0, sigma, size=2)
            coupling = complex(re, im)
            for perm, sign, conj in _orbit(*rep):
                jv = sign * (coupling.conjugate() if conj else coupling)
                p, phase = _product([modes[m] for m in perm])
                if p not in acc:
                    acc[p] = 0j
                    order.append(p)
                acc[p] += jv * 1j ** phase
    terms = []
    worst = 0.0
    for p in order:
        c = acc[p]
        worst = max(worst, abs(c.imag))
        terms.append((c.real, p))
    if worst > 1e-9:
        raise ModelError(f"SYK coefficients not real (imaginary residue {worst:.3g})")
    h = Hamiltonian.from_terms(n, terms, DROP_TOLERANCE)
    if stats is not None:
        stats.update(quadruples=n_quads, distinct_strings=len(order), collisions=n_quads - len(order),
                     terms=h.m, max_imag_residue=worst)
    return h
