import cmath
import math

import pytest
from hypothesis import given, strategies as st

from siegel_lambert.characters import (DirichletCharacter, character_from_label,
                                       enumerate_characters, gauss_sum, principal_character,
                                       square_character)
from siegel_lambert.errors import CharacterError


def brute_force_mod5():
    """Characters of the cyclic group (Z/5)* = <2> written out by hand."""
    logs = {1: 0, 2: 1, 4: 2, 3: 3}
    tables = []
    for j in range(4):
        vals = [0j] * 5
        for a, e in logs.items():
            vals[a] = cmath.exp(2j * math.pi * j * e / 4)
        tables.append(vals)
    return tables


def test_modulus_one():
    chars = enumerate_characters(1)
    assert len(chars) == 1
    assert all(chars[0](m) == 1 for m in range(1, 20))
    assert chars[0].label == "1.0"


def test_modulus_five_matches_brute_force():
    chars = enumerate_characters(5)
    assert len(chars) == 4
    expected = brute_force_mod5()
    for chi in chars:
        assert any(all(abs(chi(a) - t[a]) < 1e-12 for a in range(5)) for t in expected)
    quartic = [c for c in chars if c.order == 4]
    assert len(quartic) == 2
    assert character_from_label("5.1")(2) == 1j


def test_modulus_four():
    chars = enumerate_characters(4)
    assert len(chars) == 2
    odd = chars[1]
    assert odd(3) == -1 and odd.parity_epsilon == 1 and odd.primitive


@pytest.mark.parametrize("N", [1, 2, 3, 7, 8, 12, 15, 16, 45, 60, 97])
def test_count_is_totient(N):
    phi = sum(1 for a in range(1, N + 1) if math.gcd(a, N) == 1)
    assert len(enumerate_characters(N)) == phi
    assert enumerate_characters(N)[0].is_principal


@pytest.mark.parametrize("N", [3, 4, 5, 7, 8, 9, 12, 15, 16, 20, 21])
def test_orthogonality(N):
    chars = enumerate_characters(N)
    for i, a in enumerate(chars):
        for j, b in enumerate(chars):
            s = sum(a(m) * b(m).conjugate() for m in range(N))
            phi = len(chars)
            assert abs(s - (phi if i == j else 0)) < 1e-9


@given(st.sampled_from([5, 7, 8, 12, 13, 16, 21, 35]), st.integers(0, 40),
       st.integers(0, 400), st.integers(0, 400))
def test_multiplicative_and_periodic(N, j, a, b):
    chars = enumerate_characters(N)
    chi = chars[j % len(chars)]
    assert abs(chi(a * b) - chi(a) * chi(b)) < 1e-9
    assert chi(a) == chi(a + N)
    assert (abs(chi(a)) > 0.5) == (math.gcd(a, N) == 1)


def test_square_of_quartic():
    sq = square_character(character_from_label("5.1"))
    assert sq.label == "5.2"
    assert sq.primitive and sq.parity_epsilon == 0 and sq.is_real and sq.order == 2


def test_square_of_trivial():
    assert square_character(principal_character(1)).is_principal


def test_square_mod_four_is_not_primitive():
    sq = square_character(character_from_label("4.1"))
    assert sq.is_principal and not sq.primitive and sq.conductor == 1


def test_conjugate():
    chi = character_from_label("5.1")
    assert chi.conjugate().label == "5.3"
    assert chi.conjugate().conjugate() == chi


def test_gauss_sum_quadratic():
    assert abs(gauss_sum(character_from_label("5.2")) - math.sqrt(5)) < 1e-12


def test_gauss_sum_trivial():
    assert gauss_sum(principal_character(1)) == 1


@pytest.mark.parametrize("N", [3, 4, 5, 7, 8, 11, 13, 16])
def test_gauss_sum_modulus(N):
    for chi in enumerate_characters(N):
        if chi.primitive:
            assert abs(abs(gauss_sum(chi)) - math.sqrt(N)) < 1e-12


def test_labels_round_trip():
    for chi in enumerate_characters(21):
        assert character_from_label(chi.label) is chi


@pytest.mark.parametrize("label", ["5", "5.9", "x.y", "0.0", "-3.0"])
def test_bad_labels(label):
    with pytest.raises(CharacterError):
        character_from_label(label)


def test_inconsistent_table():
    with pytest.raises(CharacterError):
        DirichletCharacter(3, (1, 1, 1))


def test_table():
    chi = character_from_label("4.1")
    assert list(chi.table(4)) == [1, 0, -1, 0]
