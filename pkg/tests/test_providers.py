import math

import mpmath as mp
import numpy as np
import pytest
from sympy import mobius

from siegel_lambert.characters import principal_character
from siegel_lambert.dirichlet_series import CoefficientSequence, convolve, direct_series
from siegel_lambert.errors import ContinuationUnavailable, ParseError, TruncationError
from siegel_lambert.identity import IdentityTask, lambert_lhs, whittaker_sum
from siegel_lambert.lfunctions.modular import eigenform_qexpansion, modular_L
from siegel_lambert.providers import (GrowthBoundWarning, SiegelPairModel, fe_residual,
                                      file_pair_model, petersson_closed_form, petersson_FG,
                                      residue_at, sk_coefficients, sk_pair_model,
                                      write_pair_model_file)

mp.mp.dps = 30


def brute_sk(k, M):
    """Coefficients of zeta(s-k+1) zeta(s-k+2) L(g,s) / zeta(2s-2k+4) from definitions."""
    g = [0] + list(eigenform_qexpansion(2 * k - 2, M).coefficients[:M])
    out = []
    for m in range(1, M + 1):
        total = 0
        for e in range(1, math.isqrt(m) + 1):
            if m % (e * e):
                continue
            mu = int(mobius(e))
            r = m // (e * e)
            inner = sum(a ** (k - 1) * b ** (k - 2) * g[r // (a * b)]
                        for a in range(1, r + 1) if r % a == 0
                        for b in range(1, r // a + 1) if (r // a) % b == 0)
            total += mu * e ** (2 * k - 4) * inner
        out.append(total)
    return out


class TestSKModel:
    @pytest.mark.parametrize("k", [10, 12])
    def test_against_brute_force(self, k):
        assert list(sk_coefficients(k, 60).values) == brute_sk(k, 60)

    def test_low_coefficients(self, sk10):
        assert sk10.coeffs[1] == 1
        assert sk10.coeffs[2] == -528 + 2 ** 9 + 2 ** 8 == 240

    @pytest.mark.parametrize("k", [10, 12])
    def test_functional_equation_gate(self, k):
        model = sk_pair_model(k)
        for s in (complex(11, 5), complex(8.2, 9), complex(k - 1.5, -4)):
            assert fe_residual(model.analytic, s) <= 1e-8

    def test_unsupported_weight(self):
        with pytest.raises(ValueError):
            sk_pair_model(14)

    def test_direct_sum_matches_evaluator(self, sk10_long):
        for s in (12 + 0j, 12 + 4j, 13.5 - 7j):
            direct = direct_series(sk10_long.coeffs, s)
            analytic = sk10_long.analytic.D(s).value
            assert abs(direct.value - analytic) <= 1e-10 * abs(analytic)

    def test_growth_exponent(self, sk10):
        c = sk10.coeffs.as_complex()
        m = np.arange(1, len(c) + 1)
        assert sk10.growth_exponent <= sk10.weight_k
        assert np.max(np.abs(c) / m ** sk10.growth_exponent) < 50

    def test_immutable(self, sk10):
        with pytest.raises(Exception):
            sk10.weight_k = 12


class TestPetersson:
    def test_closed_form(self, sk10):
        expected = petersson_closed_form(sk10)
        assert abs(sk10.petersson_FG - expected) <= 1e-8 * abs(expected)
        assert sk10.petersson_FG > 0

    def test_closed_form_uses_zeta2(self, sk10):
        k = 10
        ratio = petersson_closed_form(sk10) / (2 * math.pi ** 8 * (2 * math.pi) ** -20
                                               * math.factorial(9))
        assert ratio == pytest.approx(float(mp.zeta(2)) * modular_L(sk10.analytic.g, k).value.real,
                                      rel=1e-13)

    def test_radius_halving(self, sk10):
        a = petersson_FG(sk10, radius=0.5)
        b = petersson_FG(sk10, radius=0.25)
        assert abs(a - b) <= 1e-9 * abs(a)

    def test_difference_has_no_pole(self, sk10):
        doubled = sk10.scaled(2)
        res = residue_at(lambda s: doubled.analytic.D_star(s).value
                         - 2 * sk10.analytic.D_star(s).value, 10.0)
        assert abs(res.value) <= 1e-9 * abs(sk10.petersson_FG)

    def test_residue_of_known_pole(self):
        assert abs(residue_at(lambda s: complex(mp.zeta(s)), 1.0).value - 1) < 1e-12

    @pytest.mark.parametrize("lam", [7, -0.5, 3.25])
    def test_scaling(self, sk10, lam):
        assert sk10.scaled(lam).petersson_FG == pytest.approx(lam * sk10.petersson_FG, rel=1e-12)

    def test_needs_evaluator(self):
        bare = SiegelPairModel(10, 2, CoefficientSequence((1, 2, 3)), None)
        with pytest.raises(ContinuationUnavailable):
            petersson_FG(bare)


class TestCoefficientFiles:
    def test_round_trip(self, sk10, tmp_path):
        path = tmp_path / "sk.txt"
        write_pair_model_file(path, sk10)
        model = file_pair_model(path)
        assert model.coeffs == sk10.coeffs
        assert model.petersson_FG == sk10.petersson_FG
        task_a = IdentityTask(sk10, principal_character(1), 1.0)
        task_b = IdentityTask(model, principal_character(1), 1.0)
        assert lambert_lhs(task_a) == lambert_lhs(task_b)
        assert whittaker_sum(task_a) == whittaker_sum(task_b)

    def test_complex_values(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("# k=10 n=3 count=2 analytic=none\n1 1 0\n2 0.5 -0.25\n")
        model = file_pair_model(path)
        assert model.degree_n == 3 and model.coeffs.values == (1 + 0j, 0.5 - 0.25j)
        assert model.analytic is None

    def test_growth_warning(self, tmp_path):
        path = tmp_path / "g.txt"
        k = 10
        lines = [f"# k={k} n=2 count=30 analytic=none"]
        lines += [f"{m} {m ** (k + 2)} 0" for m in range(1, 31)]
        path.write_text("\n".join(lines) + "\n")
        with pytest.warns(GrowthBoundWarning):
            file_pair_model(path)

    @pytest.mark.parametrize("text,line", [
        ("1 1 0\n", 1),
        ("# k=10 n=2 count=2 analytic=none\n1 1 0\n3 1 0\n", 3),
        ("# k=10 n=2 count=2 analytic=none\n1 1 0\n2 x 0\n", 3),
        ("# k=10 n=2 count=3 analytic=none\n1 1 0\n2 1 0\n", 3),
        ("# k=10 n=1 count=1 analytic=none\n1 1 0\n", 1),
        ("# k=10 n=2 count=1 analytic=maybe\n1 1 0\n", 1),
        ("# k=14 n=2 count=1 analytic=sk\n1 1 0\n", 1),
    ])
    def test_parse_errors(self, tmp_path, text, line):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(ParseError) as info:
            file_pair_model(path)
        assert info.value.line == line

    def test_truncated_file_reports_tail(self, sk10, tmp_path):
        path = tmp_path / "short.txt"
        write_pair_model_file(path, SiegelPairModel(10, 2, sk10.coeffs.truncate(50), None),
                              analytic="none")
        short = file_pair_model(path)
        alpha = 20.0
        with pytest.raises(TruncationError):
            whittaker_sum(IdentityTask(short, principal_character(1), alpha))
        got = whittaker_sum(IdentityTask(short, principal_character(1), alpha, M_whittaker=50))
        full = whittaker_sum(IdentityTask(sk10, principal_character(1), alpha))
        assert got.terms == 50
        assert 0 < got.bound
        assert abs(got.value - full.value) <= got.bound + full.bound


def test_scaling_commutes_with_convolution(sk10):
    lam = 7
    a = convolve(sk10.coeffs.truncate(500), sk10.coeffs.truncate(500))
    b = convolve(sk10.scaled(lam).coeffs.truncate(500), sk10.coeffs.truncate(500))
    assert b.values == tuple(lam * v for v in a.values)
