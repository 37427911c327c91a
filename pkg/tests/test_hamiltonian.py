import io
import itertools
import random

import pytest

from oracles import WORKED_GROUP
from simdiag.hamiltonian import (Hamiltonian, HamiltonianLoadError, greedy_partition, is_commuting, load,
                                 loads, partition_stats)
from simdiag.models import gen_syk, gen_tfim
from simdiag.pauli import commutes, parse_pauli


def test_load_basic():
    h = loads("0.5 ZZ\n-0.3 XI\n")
    assert (h.m, h.n_qubits) == (2, 2)
    assert [t.coeff for t in h] == [0.5, -0.3]


def test_load_merges_duplicates_in_first_seen_order():
    h = loads("1.0 ZI\n2.0 XX\n0.5 ZI\n")
    assert [(str(t.pauli), t.coeff) for t in h] == [("ZI", 1.5), ("XX", 2.0)]


def test_load_drops_zero():
    assert loads("0.0 XX\n1.0 ZZ\n").m == 1
    assert loads("1.0 ZZ\n-1.0 ZZ\n0.2 XI").m == 1


def test_load_comments_and_stream():
    h = load(io.StringIO("# header\n\n  0.25 XYZ  # trailing\n"))
    assert str(h.terms[0].pauli) == "XYZ"


@pytest.mark.parametrize("text, msg", [
    ("1.0 ZZ\nabc XX\n", "line 2"),
    ("1.0 ZZ\nnan XX\n", "line 2"),
    ("1.0 ZZ\n1.0 ZZZ\n", "line 2"),
    ("1.0 ZQ\n", "line 1"),
    ("1.0 ZZ extra\n", "line 1"),
    ("# only a comment\n", "no terms"),
])
def test_load_errors(text, msg):
    with pytest.raises(HamiltonianLoadError, match=msg):
        loads(text)


def test_save_load_round_trip(tmp_path):
    h = gen_tfim(4, seed=3)
    h.save(tmp_path / "h.txt")
    assert load(tmp_path / "h.txt") == h


def test_partition_tfim_two_groups():
    for n in (2, 5, 9):
        groups = greedy_partition(gen_tfim(n, seed=n))
        assert len(groups) == 2
        assert all(t.pauli.x_mask == 0 for t in groups[0].terms)
        assert all(t.pauli.z_mask == 0 for t in groups[1].terms)


def test_partition_worked_group_is_single():
    h = Hamiltonian.from_terms(4, [(1.0, s) for s in WORKED_GROUP])
    assert len(greedy_partition(h)) == 1


def test_partition_single_term():
    groups = greedy_partition(loads("1.0 XY\n"))
    assert len(groups) == 1 and len(groups[0]) == 1


def test_partition_is_first_fit():
    # ZI opens group 0, XI cannot join it, IZ joins group 0, XZ joins group 1
    groups = greedy_partition(loads("1 ZI\n1 XI\n1 IZ\n1 XZ\n"))
    assert [[str(t.pauli) for t in g.terms] for g in groups] == [["ZI", "IZ"], ["XI", "XZ"]]


def test_partition_properties_random():
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randint(2, 16)
        m = rng.randint(1, 200)
        terms = [(rng.uniform(-1, 1), "".join(rng.choice("IXYZ") for _ in range(n))) for _ in range(m)]
        h = Hamiltonian.from_terms(n, terms)
        groups = greedy_partition(h)
        flat = [t for g in groups for t in g.terms]
        assert sorted(flat, key=lambda t: str(t.pauli)) == sorted(h.terms, key=lambda t: str(t.pauli))
        for g in groups:
            assert all(commutes(a.pauli, b.pauli) for a, b in itertools.combinations(g.terms, 2))
        assert [len(g) for g in greedy_partition(h)] == [len(g) for g in groups]


def test_partition_syk_groups_commute():
    h = gen_syk(6, seed=1)
    for g in greedy_partition(h):
        assert is_commuting(g.paulis)


def test_partition_stats():
    h = gen_tfim(30, seed=0)
    st = partition_stats(greedy_partition(h), 30)
    assert (st.m, st.n_groups, st.max_group_size) == (465, 2, 435)
    assert st.predicted_speedup == pytest.approx(465 / 60)
    assert tuple(partition_stats([], 4)) == (0, 0, 0, 0.0)


def test_is_commuting():
    assert is_commuting([parse_pauli(s) for s in WORKED_GROUP])
    assert not is_commuting([parse_pauli("X"), parse_pauli("Z")])
