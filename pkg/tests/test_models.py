import itertools
import math

import numpy as np
import pytest

from simdiag.hamiltonian import greedy_partition, is_commuting, partition_stats
from simdiag.models import ModelSpec, gen_syk, gen_tfim, majorana, syk_variance
from simdiag.pauli import PauliString, multiply


def test_tfim_counts():
    assert gen_tfim(30, 0).m == 465
    h = gen_tfim(2, 0)
    assert [str(t.pauli) for t in h.terms] == ["ZZ", "XI", "IX"]


def test_tfim_deterministic_and_ranged():
    a, b = gen_tfim(7, 42), gen_tfim(7, 42)
    assert a == b
    assert a != gen_tfim(7, 43)
    assert all(-1 <= t.coeff <= 1 for t in a.terms)


def test_tfim_partition():
    for n in (2, 5, 12):
        assert len(greedy_partition(gen_tfim(n, 1))) == 2


def test_majorana_examples():
    assert str(majorana(0, 3)) == "XII"
    assert str(majorana(1, 3)) == "YII"
    assert str(majorana(2, 3)) == "ZXI"
    assert str(majorana(5, 3)) == "ZZY"
    with pytest.raises(IndexError):
        majorana(6, 3)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_majorana_anticommutation(n):
    ident = PauliString(n, 0, 0)
    for a, b in itertools.product(range(2 * n), repeat=2):
        pa, pb = majorana(a, n), majorana(b, n)
        ab, kab = multiply(pa, pb)
        ba, kba = multiply(pb, pa)
        assert ab == ba
        anti = 1j ** kab + 1j ** kba
        if a == b:
            assert ab == ident and anti == 2
        else:
            assert anti == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_syk_hermitian(n):
    h = gen_syk(n, 7)
    mat = h.to_matrix()
    np.testing.assert_allclose(mat, mat.conj().T, atol=1e-12)
    assert all(isinstance(t.coeff, float) for t in h.terms)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_syk_term_count(n):
    stats = {}
    h = gen_syk(n, 1, stats=stats)
    assert stats["quadruples"] == math.comb(2 * n, 4)
    assert stats["collisions"] == stats["quadruples"] - stats["distinct_strings"]
    assert h.m == stats["terms"] <= stats["distinct_strings"]


def test_syk_mode_convention():
    # 28 qubits -> 56 modes; the term count follows from the mode count alone
    assert math.comb(56, 4) == 367_290
    assert math.comb(28, 4) == 20_475


def test_syk_groups_commute():
    h = gen_syk(6, 2)
    for g in greedy_partition(h):
        assert is_commuting(g.paulis)
    s = partition_stats(greedy_partition(h), 6)
    assert s.m == h.m


def test_syk_deterministic():
    assert gen_syk(5, 3) == gen_syk(5, 3)
    assert gen_syk(5, 3) != gen_syk(5, 4)


def test_syk_variance_constant():
    assert syk_variance(4) == pytest.approx(6 / 512)


def test_model_spec():
    assert ModelSpec("tfim", 4, 9).build() == gen_tfim(4, 9)
    assert ModelSpec("syk", 3, 9).build() == gen_syk(3, 9)
    with pytest.raises(ValueError):
        ModelSpec("ising", 4)
    with pytest.raises(ValueError):
        ModelSpec("tfim", 1)
