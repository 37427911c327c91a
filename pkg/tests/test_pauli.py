import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import pauli_matrix
from simdiag.pauli import PauliParseError, PauliString, WeightedTerm, commutes, multiply, parse_pauli

pauli_text = st.integers(1, 12).flatmap(lambda n: st.text("IXYZ", min_size=n, max_size=n))


@pytest.mark.parametrize("text, x, z, ph", [
    ("XYZ", 0b011, 0b110, 1),  # leftmost char is bit 0
    ("III", 0, 0, 0),
    ("YY", 0b11, 0b11, 2),
])
def test_parse_examples(text, x, z, ph):
    p = parse_pauli(text, len(text))
    assert (p.x_mask, p.z_mask, p.phase_exp) == (x, z, ph)


def test_parse_errors_name_position():
    with pytest.raises(PauliParseError, match="position 3"):
        parse_pauli("XIQ", 3)
    with pytest.raises(PauliParseError, match="expected 4"):
        parse_pauli("XIZ", 4)


@given(pauli_text)
def test_round_trip(text):
    p = parse_pauli(text)
    assert str(p) == text
    assert parse_pauli(str(p)) == p


@pytest.mark.parametrize("a, b, expected", [
    ("XI", "IX", True),
    ("X", "Z", False),
    ("YIXI", "XZYZ", True),
])
def test_commutes_examples(a, b, expected):
    assert commutes(parse_pauli(a), parse_pauli(b)) is expected


def test_commutes_dimension_mismatch():
    with pytest.raises(ValueError):
        commutes(parse_pauli("X"), parse_pauli("XX"))


@pytest.mark.parametrize("a, b, c, k", [
    ("X", "Z", "Y", 3),
    ("ZX", "XX", "YI", 1),
    ("XYZ", "XYZ", "III", 0),
])
def test_multiply_examples(a, b, c, k):
    assert multiply(parse_pauli(a), parse_pauli(b)) == (parse_pauli(c), k)


@given(pauli_text, st.data())
def test_commutes_symmetric_and_reflexive(text, data):
    other = data.draw(st.text("IXYZ", min_size=len(text), max_size=len(text)))
    a, b = parse_pauli(text), parse_pauli(other)
    assert commutes(a, b) == commutes(b, a)
    assert commutes(a, a)


def test_dense_oracle_1000_pairs():
    rng = random.Random(7)
    for _ in range(1000):
        n = rng.randint(1, 4)
        ta = "".join(rng.choice("IXYZ") for _ in range(n))
        tb = "".join(rng.choice("IXYZ") for _ in range(n))
        ma, mb = pauli_matrix(ta), pauli_matrix(tb)
        a, b = parse_pauli(ta), parse_pauli(tb)
        assert commutes(a, b) == bool(np.allclose(ma @ mb, mb @ ma, atol=1e-12))
        c, k = multiply(a, b)
        np.testing.assert_allclose(ma @ mb, 1j ** k * pauli_matrix(str(c)), atol=1e-12)


def test_to_matrix_matches_oracle():
    for text in ("XYZ", "ZIY", "YX"):
        np.testing.assert_array_equal(parse_pauli(text).to_matrix(), pauli_matrix(text))


def test_mask_validation():
    with pytest.raises(ValueError):
        PauliString(2, 0b100, 0)


@pytest.mark.parametrize("coeff", [float("nan"), float("inf"), 1j])
def test_weighted_term_rejects_non_real(coeff):
    with pytest.raises(ValueError):
        WeightedTerm(coeff, parse_pauli("X"))
