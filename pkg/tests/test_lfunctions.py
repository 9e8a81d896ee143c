import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from siegel_lambert.characters import character_from_label, enumerate_characters
from siegel_lambert.errors import CharacterError, PoleError
from siegel_lambert.lfunctions import (L_derivative, completed_L, dirichlet_L, hurwitz_zeta,
                                       hurwitz_zeta_derivative, riemann_zeta, root_number)
from siegel_lambert.lfunctions.dirichlet import _character_sum, _cutoff

mp.mp.dps = 30
CATALAN = 0.915965594177219015054603514932


def rel(a, b):
    return abs(complex(a) - complex(b)) / abs(complex(b))


def oracle_L(s, chi):
    return complex(mp.dirichlet(s, [complex(v) for v in chi.values]))


def strip_points(count, seed):
    rng = np.random.default_rng(seed)
    return [complex(x, y) for x, y in zip(rng.uniform(-2, 3, count), rng.uniform(-40, 40, count))]


class TestHurwitz:
    def test_basel(self):
        assert rel(hurwitz_zeta(2, 1.0).value, math.pi ** 2 / 6) < 1e-14

    def test_half_shift(self):
        assert rel(hurwitz_zeta(3, 0.5).value, (2 ** 3 - 1) * riemann_zeta(3).value) < 1e-12

    def test_first_zero(self):
        assert abs(hurwitz_zeta(complex(0.5, 14.134725141734693), 1.0).value) < 1e-6

    def test_pole(self):
        with pytest.raises(PoleError):
            hurwitz_zeta(1, 0.3)

    def test_bad_parameter(self):
        with pytest.raises(ValueError):
            hurwitz_zeta(2, 1.5)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(-3, 4), st.floats(-200, 200), st.floats(0.05, 1.0))
    def test_against_mpmath(self, x, y, a):
        s = complex(x, y)
        if abs(s - 1) < 1e-3:
            return
        got = hurwitz_zeta(s, a)
        want = complex(mp.zeta(s, a))
        assert abs(got.value - want) <= got.abs_error_bound + 1e-15 * abs(want)
        if x >= -1:
            assert abs(got.value - want) <= 1e-12 * max(1.0, abs(want))

    def test_derivative_against_mpmath(self):
        for s, a in [(0.5 + 14j, 1.0), (-1.5 + 3j, 0.25), (2.5 - 60j, 0.8)]:
            got = hurwitz_zeta_derivative(s, a).value
            assert rel(got, complex(mp.zeta(s, a, 1))) < 1e-11


class TestDirichletL:
    def test_zeta_values(self):
        assert rel(riemann_zeta(2).value, math.pi ** 2 / 6) < 1e-14
        assert rel(riemann_zeta(-1).value, -1 / 12) < 1e-13

    def test_catalan(self):
        assert abs(dirichlet_L(2, character_from_label("4.1")).value - CATALAN) < 1e-12

    def test_regular_at_one_for_nonprincipal(self):
        val = dirichlet_L(1, character_from_label("5.2")).value
        assert rel(val, 2 * math.log((1 + math.sqrt(5)) / 2) / math.sqrt(5)) < 1e-12

    def test_pole(self):
        with pytest.raises(PoleError):
            riemann_zeta(1)

    def test_direct_series_region(self):
        chi = character_from_label("7.2")
        s = 3.5 + 2j
        direct = sum(chi(m) * m ** -s for m in range(1, 200000))
        assert abs(dirichlet_L(s, chi).value - direct) < 1e-12

    @pytest.mark.parametrize("label", ["1.0", "4.1", "5.1", "5.2", "8.3", "12.3"])
    def test_against_mpmath(self, label):
        chi = character_from_label(label)
        for s in strip_points(15, 3):
            got = dirichlet_L(s, chi)
            want = oracle_L(s, chi)
            assert abs(got.value - want) <= got.abs_error_bound + 1e-15 * abs(want)
            assert abs(got.value - want) <= 1e-11 * max(1.0, abs(want))

    def test_cutoff_rule(self):
        assert _cutoff(complex(0.5, 0)) == 20
        assert _cutoff(complex(0.5, 100)) >= 200

    def test_doubling_cutoff_within_bound(self):
        rng = np.random.default_rng(7)
        for label in ("1.0", "5.2", "5.1"):
            chi = character_from_label(label)
            for x, y in zip(rng.uniform(-2, 3, 170), rng.uniform(-100, 100, 170)):
                s = complex(x, y)
                if abs(s - 1) < 1e-2:
                    continue
                X = _cutoff(s)
                a = _character_sum(s, chi, False, X)
                b = _character_sum(s, chi, False, 2 * X)
                assert abs(a.value - b.value) <= a.abs_error_bound + b.abs_error_bound


class TestDerivative:
    def test_zeta_prime_minus_one(self):
        assert abs(L_derivative(-1, character_from_label("1.0")).value - -0.1654211437004509) < 1e-12

    def test_first_zero_modulus(self):
        d = L_derivative(complex(0.5, 14.134725141734693), character_from_label("1.0")).value
        assert abs(d) == pytest.approx(0.7932, abs=1e-3)
        assert abs(d) > 0.78

    def test_euler_constant(self):
        chi = character_from_label("1.0")
        # d/ds [(s - 1) zeta(s)] = zeta(s) + (s - 1) zeta'(s) -> gamma as s -> 1
        h = 1e-6
        vals = []
        for s in (1 + h, 1 - h):
            vals.append(riemann_zeta(s).value + (s - 1) * L_derivative(s, chi).value)
        assert abs(0.5 * (vals[0] + vals[1]) - float(mp.euler)) < 1e-9

    @pytest.mark.parametrize("label", ["1.0", "5.2", "5.1", "8.3"])
    def test_finite_differences(self, label):
        chi = character_from_label(label)
        h = 1e-3
        for s in strip_points(6, 9):
            f = [dirichlet_L(s + k * h, chi).value for k in (-2, -1, 1, 2)]
            fd = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
            assert abs(L_derivative(s, chi).value - fd) < 1e-8 * max(1.0, abs(fd))

    def test_against_mpmath(self):
        chi = character_from_label("5.2")
        for s in strip_points(10, 5):
            want = complex(mp.diff(lambda u: mp.dirichlet(u, [complex(v) for v in chi.values]), s))
            assert abs(L_derivative(s, chi).value - want) < 1e-10 * max(1.0, abs(want))


def primitive_characters(max_modulus):
    return [c for N in range(1, max_modulus + 1) for c in enumerate_characters(N) if c.primitive]


class TestCompleted:
    def test_functional_equation_example(self):
        chi = character_from_label("5.2")
        s = 0.3 + 7j
        lhs = completed_L(s, chi)
        rhs = completed_L(1 - s, chi.conjugate())
        assert abs(lhs.value - root_number(chi) * rhs.value) <= 1e-9

    @pytest.mark.parametrize("chi", primitive_characters(8), ids=lambda c: c.label)
    def test_functional_equation_all_small_moduli(self, chi):
        for s in strip_points(20, 17):
            a = completed_L(s, chi)
            b = completed_L(1 - s, chi.conjugate())
            resid = abs(a.value - root_number(chi) * b.value)
            assert resid <= 1e-9 * max(1.0, abs(a.value))
            assert resid <= a.abs_error_bound + b.abs_error_bound + 1e-15 * abs(a.value)

    def test_root_number_unimodular(self):
        for chi in primitive_characters(20):
            assert abs(abs(root_number(chi)) - 1) < 1e-12

    def test_real_at_centre(self):
        val = completed_L(0.5, character_from_label("5.2")).value
        assert abs(val.imag) < 1e-15 and val.real > 0

    def test_non_primitive_rejected(self):
        with pytest.raises(CharacterError):
            completed_L(2, character_from_label("5.0"))

    def test_zeta_poles_detected(self):
        zeta = character_from_label("1.0")
        for s in (0, 1):
            with pytest.raises(PoleError):
                completed_L(s, zeta)

    @pytest.mark.parametrize("centre,expected", [(1.0, 1.0), (0.0, -1.0)])
    def test_zeta_residues(self, centre, expected):
        zeta = character_from_label("1.0")
        r, n = 0.25, 64
        total = 0j
        for j in range(n):
            u = cmath.exp(2j * math.pi * j / n)
            total += completed_L(centre + r * u, zeta).value * r * u
        assert abs(total / n - expected) < 1e-12
