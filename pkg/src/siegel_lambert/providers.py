"""Coefficient models for pairs of degree-n Siegel cusp forms.

The reference model is the Saito-Kurokawa lift of the level-one eigenform
``g`` of weight ``2k - 2``.  Its Fourier-Jacobi Rankin-Selberg series
factors as

    D(s) = zeta(s - k + 1) zeta(s - k + 2) L(g, s) / zeta(2s - 2k + 4),

so the completed series only needs classical L-functions.  Before a model
is handed out its completed series is checked against the functional
equation ``D*(2k - n - s) = D*(s)``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .characters import DirichletCharacter, gauss_sum, principal_character, square_character
from .dirichlet_series import (CoefficientSequence, completion_log_factor, convolve,
                               dirichlet_inverse, on_squares, power_sequence)
from .errors import ContinuationUnavailable, ParseError, SelfCheckError
from .lfunctions.dirichlet import dirichlet_L
from .lfunctions.modular import EigenformQExpansion, eigenform_qexpansion, modular_L
from .numerics import Estimate
from .special_functions import log_gamma

SK_WEIGHTS = (10, 12)
EIGENFORM_TERMS = 6000
SELF_CHECK_POINTS = (complex(11, 5), complex(7.3, -3.1))
SELF_CHECK_TOL = 1e-8
TWIST_CHECK_TOL = 1e-6


class GrowthBoundWarning(UserWarning):
    """Coefficients grow faster than the expected m^k bound."""


def _product_estimate(*factors: Estimate) -> Estimate:
    vals = [complex(f.value) for f in factors]
    value = complex(np.prod(vals))
    bound = 0.0
    for i, f in enumerate(factors):
        others = abs(np.prod([v for j, v in enumerate(vals) if j != i]))
        bound += others * f.abs_error_bound
    return Estimate(value, float(bound + 4 * np.finfo(float).eps * abs(value)))


@dataclass(frozen=True, eq=False)
class SKAnalytic:
    """Closed-form evaluator for the Saito-Kurokawa model (optionally scaled)."""

    k: int
    g: EigenformQExpansion
    scale: complex = 1.0
    n: int = 2

    def _twist(self, chi: DirichletCharacter | None):
        if chi is None or chi.modulus == 1:
            return None
        return chi

    def numerator(self, s: complex, chi: DirichletCharacter | None = None) -> Estimate:
        """L(s-k+1, chi) L(s-k+2, chi) L(g x chi, s), times the model scale."""
        chi = self._twist(chi)
        ch = chi if chi is not None else principal_character(1)
        k = self.k
        est = _product_estimate(dirichlet_L(s - k + 1, ch), dirichlet_L(s - k + 2, ch),
                                modular_L(self.g, s, chi))
        return Estimate(self.scale * est.value, abs(self.scale) * est.abs_error_bound)

    def D(self, s: complex, chi: DirichletCharacter | None = None) -> Estimate:
        s = complex(s)
        chi = self._twist(chi)
        ch2 = square_character(chi) if chi is not None else principal_character(1)
        num = self.numerator(s, chi)
        den = dirichlet_L(2 * s - 2 * self.k + 4, ch2)
        value = num.value / den.value
        bound = (num.abs_error_bound + abs(value) * den.abs_error_bound) / abs(den.value)
        return Estimate(complex(value), float(bound))

    def D_star(self, s: complex, chi: DirichletCharacter | None = None) -> Estimate:
        """(2 pi / N)^{-2s} Gamma(s) Gamma(s + n - k) times the numerator.

        The factor L(2s + 2n - 2k, chi^2) of the completion cancels the
        denominator of D when n = 2.
        """
        s = complex(s)
        chi = self._twist(chi)
        N = chi.modulus if chi is not None else 1
        num = self.numerator(s, chi)
        pref = cmath.exp(completion_log_factor(s, self.k, self.n, N))
        return Estimate(pref * num.value, float(abs(pref) * num.abs_error_bound))

    def scaled(self, lam: complex) -> "SKAnalytic":
        return replace(self, scale=self.scale * lam)


@dataclass(frozen=True, eq=False)
class SiegelPairModel:
    weight_k: int
    degree_n: int
    coeffs: CoefficientSequence
    petersson_FG: float | None
    analytic: SKAnalytic | None = None
    growth_exponent: float = 0.0
    label: str = ""
    _twist_checked: set = field(default_factory=set, repr=False)

    def __post_init__(self):
        if self.degree_n < 2:
            raise ValueError("degree n must be at least 2")
        if not self.growth_exponent:
            object.__setattr__(self, "growth_exponent", float(self.weight_k))

    def scaled(self, lam) -> "SiegelPairModel":
        """Scale every coefficient-derived quantity of the model by lam."""
        analytic = self.analytic.scaled(lam) if self.analytic is not None else None
        model = SiegelPairModel(self.weight_k, self.degree_n, self.coeffs.scaled(lam), None,
                                analytic, self.growth_exponent, f"{lam}*{self.label}")
        if analytic is not None:
            pet = petersson_FG(model)
        elif self.petersson_FG is not None:
            pet = lam * self.petersson_FG
        else:
            pet = None
        return replace(model, petersson_FG=pet, _twist_checked=set())

    def check_twist(self, chi: DirichletCharacter) -> float:
        """Twisted functional-equation gate; returns the worst relative residual."""
        if chi.modulus == 1 or self.analytic is None:
            return 0.0
        if chi.label in self._twist_checked:
            return 0.0
        k, n, N = self.weight_k, self.degree_n, chi.modulus
        factor = (gauss_sum(chi) / math.sqrt(N)) ** 4
        worst = 0.0
        for s in SELF_CHECK_POINTS:
            lhs = self.analytic.D_star(2 * k - n - s, chi).value
            rhs = factor * self.analytic.D_star(s, chi.conjugate()).value
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
        if worst > TWIST_CHECK_TOL:
            raise SelfCheckError(
                f"twisted functional equation fails for {chi.label}: residual {worst:.2e}")
        self._twist_checked.add(chi.label)
        return worst


def fe_residual(analytic: SKAnalytic, s: complex) -> float:
    k, n = analytic.k, analytic.n
    a = analytic.D_star(2 * k - n - s).value
    b = analytic.D_star(s).value
    return abs(a - b) / abs(b)


@lru_cache(maxsize=8)
def sk_coefficients(k: int, M: int) -> CoefficientSequence:
    """Dirichlet coefficients of zeta(s-k+1) zeta(s-k+2) L(g,s) / zeta(2s-2k+4)."""
    g = eigenform_qexpansion(2 * k - 2, M)
    a = CoefficientSequence(g.coefficients)
    den_inv = dirichlet_inverse(on_squares(lambda d: d ** (2 * k - 4), M))
    zz = convolve(power_sequence(k - 1, M), power_sequence(k - 2, M))
    return convolve(convolve(zz, a), den_inv)


def sk_pair_model(k: int = 10, M: int = 2000, *, self_check: bool = True) -> SiegelPairModel:
    """Saito-Kurokawa reference model of weight k (n = 2), normalized c(1) = 1."""
    if k not in SK_WEIGHTS:
        raise ValueError(f"Saito-Kurokawa model supports k in {SK_WEIGHTS}, got {k}")
    return _sk_pair_model(k, M, self_check)


@lru_cache(maxsize=8)
def _sk_pair_model(k: int, M: int, self_check: bool) -> SiegelPairModel:
    coeffs = sk_coefficients(k, M)
    g = eigenform_qexpansion(2 * k - 2, max(EIGENFORM_TERMS, M))
    analytic = SKAnalytic(k, g)
    if self_check:
        worst = max(fe_residual(analytic, s) for s in SELF_CHECK_POINTS)
        if not worst <= SELF_CHECK_TOL:
            raise SelfCheckError(
                f"completed series fails its functional equation (residual {worst:.2e}); "
                "the coefficient normalization or shift convention is wrong")
    model = SiegelPairModel(k, 2, coeffs, None, analytic, k - 0.5, f"sk:{k}")
    return replace(model, petersson_FG=petersson_FG(model))


@dataclass(frozen=True)
class ResidueResult:
    value: complex
    radius: float
    nodes: int


def residue_at(f, center: float, radius: float = 0.5, nodes: int = 32) -> ResidueResult:
    """(1/2 pi i) times the integral of f around a circle, by the trapezoid rule."""
    th = 2 * math.pi * (np.arange(nodes) + 0.5) / nodes
    pts = center + radius * np.exp(1j * th)
    vals = [complex(f(p)) * (p - center) for p in pts]
    return ResidueResult(complex(np.mean(vals)), radius, nodes)


def petersson_FG(model: SiegelPairModel, radius: float = 0.5, nodes: int = 32) -> float:
    """<F,G> = 2 pi^{k-n} times the residue of D* at s = k."""
    if model.analytic is None:
        raise ContinuationUnavailable("residue route needs an analytic evaluator")
    k, n = model.weight_k, model.degree_n
    res = residue_at(lambda s: model.analytic.D_star(s).value, k, radius, nodes)
    value = 2 * math.pi ** (k - n) * res.value
    if abs(value.imag) > 1e-8 * max(abs(value.real), 1e-300):
        raise SelfCheckError(f"residue at s = k is not real: {value}")
    return float(value.real)


def petersson_closed_form(model: SiegelPairModel) -> float:
    """2 pi^{k-2} (2pi)^{-2k} (k-1)! zeta(2) L(g, k) for the (unscaled) SK model."""
    if model.analytic is None or model.degree_n != 2:
        raise ContinuationUnavailable("closed form only exists for the Saito-Kurokawa model")
    k = model.weight_k
    Lgk = modular_L(model.analytic.g, k).value.real
    scale = complex(model.analytic.scale).real
    return scale * 2 * math.pi ** (k - 2) * (2 * math.pi) ** (-2 * k) * math.factorial(k - 1) \
        * (math.pi ** 2 / 6) * Lgk


# -- coefficient files ----------------------------------------------------

def _format_value(v) -> str:
    if isinstance(v, int):
        return f"{v} 0"
    v = complex(v)
    return f"{v.real!r} {v.imag!r}"


def write_pair_model_file(path: str | Path, model: SiegelPairModel, analytic: str | None = None) -> None:
    kind = analytic or ("sk" if model.analytic is not None else "none")
    lines = [f"# k={model.weight_k} n={model.degree_n} count={len(model.coeffs)} analytic={kind}"]
    lines += [f"{m} {_format_value(v)}" for m, v in enumerate(model.coeffs.values, start=1)]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_number(tok: str, lineno: int):
    try:
        return int(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError as exc:
            raise ParseError(f"not a number: {tok!r}", lineno) from exc


def file_pair_model(path: str | Path) -> SiegelPairModel:
    """Read a coefficient file with header '# k=.. n=.. count=.. analytic=none|sk'."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParseError("missing '# k=... n=... count=... analytic=...' header", 1)
    try:
        fields = dict(item.split("=", 1) for item in lines[0][1:].split())
        k, n, M = int(fields["k"]), int(fields["n"]), int(fields["count"])
        kind = fields.get("analytic", "none")
    except (ValueError, KeyError) as exc:
        raise ParseError(f"malformed header: {exc}", 1) from exc
    if kind not in ("none", "sk"):
        raise ParseError(f"analytic must be 'none' or 'sk', got {kind!r}", 1)
    if n < 2:
        raise ParseError("degree n must be at least 2", 1)
    values: list = []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'm re im', got {line!r}", lineno)
        m = _parse_number(parts[0], lineno)
        if m != len(values) + 1:
            raise ParseError(f"expected index {len(values) + 1}, got {parts[0]}", lineno)
        re, im = _parse_number(parts[1], lineno), _parse_number(parts[2], lineno)
        if isinstance(re, int) and im == 0:
            values.append(re)
        else:
            values.append(complex(re, im))
    if len(values) != M:
        raise ParseError(f"header announces {M} coefficients, found {len(values)}", len(lines))
    coeffs = CoefficientSequence(tuple(values))
    c1 = abs(complex(coeffs[1])) if M else 0.0
    for m, v in enumerate(coeffs.values, start=1):
        if abs(complex(v)) > 10 * c1 * m ** k:
            warnings.warn(f"|c({m})| exceeds 10 |c(1)| m^{k}; growth bound violated",
                          GrowthBoundWarning, stacklevel=2)
            break
    analytic = None
    pet = None
    growth = float(k)
    if kind == "sk":
        if n != 2 or k not in SK_WEIGHTS:
            raise ParseError("analytic=sk needs n = 2 and k in (10, 12)", 1)
        ref = sk_pair_model(k, M)
        analytic, growth = ref.analytic, ref.growth_exponent
        pet = ref.petersson_FG
    return SiegelPairModel(k, n, coeffs, pet, analytic, growth, str(path))
