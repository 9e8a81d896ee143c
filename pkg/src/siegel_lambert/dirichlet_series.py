"""Arithmetic of Dirichlet coefficient sequences and completed series values.

Sequences are stored 1-indexed.  Integer sequences stay exact (Python ints);
anything touched by a non-real character becomes complex floating point,
and every floating reduction goes through ``math.fsum`` so results do not
depend on summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .characters import DirichletCharacter, gauss_sum, principal_character, square_character
from .errors import CharacterError, ContinuationUnavailable
from .lfunctions.dirichlet import dirichlet_L
from .numerics import Estimate, csum
from .special_functions import log_gamma


@dataclass(frozen=True, eq=False)
class CoefficientSequence:
    """Values c(1), ..., c(M); ``exact`` marks Python-int storage."""

    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if all(isinstance(v, int) for v in vals):
            exact = True
        else:
            vals = tuple(complex(v) for v in vals)
            exact = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "exact", exact)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, m: int):
        """c(m) with 1-based indexing."""
        if m < 1:
            raise IndexError("coefficient sequences are indexed from 1")
        return self.values[m - 1]

    def __eq__(self, other) -> bool:
        return isinstance(other, CoefficientSequence) and self.values == other.values

    __hash__ = None

    @classmethod
    def from_function(cls, f: Callable[[int], object], M: int) -> "CoefficientSequence":
        return cls(tuple(f(m) for m in range(1, M + 1)))

    @classmethod
    def identity(cls, M: int) -> "CoefficientSequence":
        return cls(tuple([1] + [0] * (M - 1)))

    def truncate(self, M: int) -> "CoefficientSequence":
        return CoefficientSequence(self.values[:M])

    def scaled(self, lam) -> "CoefficientSequence":
        return CoefficientSequence(tuple(lam * v for v in self.values))

    def as_complex(self, length: int | None = None) -> np.ndarray:
        vals = self.values if length is None else self.values[:length]
        return np.array([complex(v) for v in vals], dtype=complex)


def _sparse(a: CoefficientSequence) -> list[tuple[int, object]]:
    return [(d, v) for d, v in enumerate(a.values, start=1) if v != 0]


def convolve(a: CoefficientSequence, b: CoefficientSequence) -> CoefficientSequence:
    """Dirichlet convolution truncated to the common length."""
    M = min(len(a), len(b))
    bv = b.values
    if a.exact and b.exact:
        out = [0] * (M + 1)
        for d, ad in _sparse(a.truncate(M)):
            for j in range(1, M // d + 1):
                bj = bv[j - 1]
                if bj:
                    out[d * j] += ad * bj
        return CoefficientSequence(tuple(out[1:]))
    buckets: list[list[complex]] = [[] for _ in range(M + 1)]
    for d, ad in _sparse(a.truncate(M)):
        ad = complex(ad)
        for j in range(1, M // d + 1):
            bj = bv[j - 1]
            if bj:
                buckets[d * j].append(ad * complex(bj))
    return CoefficientSequence(tuple(csum(bk) for bk in buckets[1:]))


def dirichlet_inverse(a: CoefficientSequence) -> CoefficientSequence:
    """The sequence b with a * b = (1, 0, 0, ...)."""
    M = len(a)
    if M == 0:
        return a
    lead = a[1]
    if lead == 0:
        raise ZeroDivisionError("Dirichlet inverse needs a(1) != 0")
    nonzero = _sparse(a)[1:]
    exact = a.exact and lead in (1, -1)
    b: list = [0] * (M + 1)
    b[1] = lead if exact else 1.0 / complex(lead)
    for m in range(2, M + 1):
        parts = [ad * b[m // d] for d, ad in nonzero if d <= m and m % d == 0]
        if exact:
            b[m] = -lead * sum(parts)
        else:
            b[m] = -b[1] * csum(parts)
    return CoefficientSequence(tuple(b[1:]))


def twist(a: CoefficientSequence, chi: DirichletCharacter) -> CoefficientSequence:
    """m -> chi(m) a(m); stays exact when chi only takes values 0, 1, -1."""
    vals = []
    exact_ok = a.exact and chi.is_real
    for m, v in enumerate(a.values, start=1):
        c = chi(m)
        if exact_ok:
            vals.append(int(round(c.real)) * v)
        else:
            vals.append(c * complex(v))
    return CoefficientSequence(tuple(vals))


def on_squares(f: Callable[[int], object], M: int) -> CoefficientSequence:
    """Sequence with value f(d) at index d^2 and zero elsewhere."""
    vals: list = [0] * M
    d = 1
    while d * d <= M:
        vals[d * d - 1] = f(d)
        d += 1
    return CoefficientSequence(tuple(vals))


def power_sequence(exponent: int, M: int) -> CoefficientSequence:
    return CoefficientSequence(tuple(m ** exponent for m in range(1, M + 1)))


def _char_power(chi: DirichletCharacter, power: int, conj: bool):
    def f(d: int):
        v = chi(d) ** power
        v = v.conjugate() if conj else v
        if abs(v.imag) < 1e-12 and abs(v.real - round(v.real)) < 1e-12:
            return int(round(v.real))
        return v
    return f


@dataclass(frozen=True)
class SeriesQuotientSpec:
    k: int
    n: int
    chi: DirichletCharacter

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("degree n must be at least 2")
        if self.chi.modulus > 1 and not square_character(self.chi).primitive:
            raise CharacterError(
                f"chi^2 must be primitive mod {self.chi.modulus} (character {self.chi.label})")


def a_FG_coefficients(model, spec: SeriesQuotientSpec, M: int) -> CoefficientSequence:
    """Coefficients of L(2s-2k+2n, conj chi^2) D_{conj chi}(s) / L(2s-2k+1, conj chi^2)."""
    k, n, chi = spec.k, spec.n, spec.chi
    if len(model.coeffs) < M:
        raise ValueError(f"model has {len(model.coeffs)} coefficients, {M} requested")
    sq = _char_power(chi, 2, conj=True)
    num = on_squares(lambda d: sq(d) * d ** (2 * k - 2 * n), M)
    den = on_squares(lambda e: sq(e) * e ** (2 * k - 1), M)
    base = twist(model.coeffs.truncate(M), chi.conjugate())
    return convolve(convolve(num, dirichlet_inverse(den)), base)


def direct_series(coeffs: CoefficientSequence, s: complex,
                  chi: DirichletCharacter | None = None,
                  growth_exponent: float | None = None) -> Estimate:
    """sum_m chi(m) c(m) m^{-s} with a tail bound from the growth exponent."""
    s = complex(s)
    M = len(coeffs)
    m = np.arange(1, M + 1, dtype=float)
    vals = coeffs.as_complex()
    if chi is not None:
        vals = vals * chi.table(M)
    terms = vals * np.exp(-s * np.log(m))
    value = csum(terms)
    bound = 4 * np.finfo(float).eps * float(np.abs(terms).sum()) * (1 + abs(s) * math.log(M + 1))
    if growth_exponent is not None:
        sigma = s.real - growth_exponent
        if sigma <= 1:
            raise ContinuationUnavailable(
                f"direct series does not converge absolutely at Re s = {s.real}")
        const = float(np.max(np.abs(coeffs.as_complex()) / m ** growth_exponent))
        # sum_{m>M} A m^{-sigma} <= A M^{1-sigma} / (sigma - 1)
        bound += const * M ** (1 - sigma) / (sigma - 1)
    return Estimate(value, float(bound))


def completion_log_factor(s: complex, k: int, n: int, N: int) -> complex:
    """log of (2 pi / N)^{-2s} Gamma(s) Gamma(s + n - k)."""
    return -2 * s * math.log(2 * math.pi / N) + log_gamma(s) + log_gamma(s + n - k)


def D_star(model, chi: DirichletCharacter | None, s: complex, *,
           route: str = "auto") -> Estimate:
    """Completed series (2pi/N)^{-2s} Gamma(s) Gamma(s+n-k) L(2s+2n-2k, chi^2) D_chi(s).

    ``route`` is ``"direct"`` (series, Re s > k + 1), ``"analytic"`` (the
    model's evaluator), ``"functional"`` (reflect s -> 2k - n - s into the
    convergence region) or ``"auto"``.
    """
    s = complex(s)
    k, n = model.weight_k, model.degree_n
    N = chi.modulus if chi is not None else 1
    converges = s.real > k + 1 + 1e-12
    if route == "auto":
        if converges and len(model.coeffs) >= 1:
            route = "direct"
        elif model.analytic is not None:
            route = "analytic"
        elif (2 * k - n - s).real > k + 1:
            route = "functional"
        else:
            raise ContinuationUnavailable(
                f"no analytic evaluator for this model at s = {s}; the series diverges there")
    if route == "analytic":
        if model.analytic is None:
            raise ContinuationUnavailable("model has no analytic evaluator")
        return model.analytic.D_star(s, chi)
    if route == "functional":
        refl = D_star(model, chi.conjugate() if chi is not None else None, 2 * k - n - s,
                      route="direct")
        factor = (gauss_sum(chi) / math.sqrt(N)) ** 4 if chi is not None else 1.0
        return Estimate(factor * refl.value, abs(factor) * refl.abs_error_bound)
    if route != "direct":
        raise ValueError(f"unknown route {route!r}")
    if not converges:
        raise ContinuationUnavailable(f"direct series needs Re s > {k + 1}, got {s.real}")
    series = direct_series(model.coeffs, s, chi, model.growth_exponent)
    chi2 = square_character(chi) if chi is not None else None
    Lval = dirichlet_L(2 * s + 2 * n - 2 * k, chi2 if chi2 is not None and N > 1
                       else _trivial())
    pref = np.exp(completion_log_factor(s, k, n, N))
    value = pref * Lval.value * series.value
    bound = abs(pref) * (abs(Lval.value) * series.abs_error_bound
                         + abs(series.value) * Lval.abs_error_bound)
    return Estimate(complex(value), float(bound))


def _trivial() -> DirichletCharacter:
    return principal_character(1)


def generating_quotient(model, chi: DirichletCharacter, s: complex) -> Estimate:
    """L(2s-2k+2n, conj chi^2) D_{conj chi}(s) / L(2s-2k+1, conj chi^2) from L-values."""
    s = complex(s)
    k, n = model.weight_k, model.degree_n
    chib = chi.conjugate()
    chi2 = square_character(chib) if chi.modulus > 1 else _trivial()
    num = dirichlet_L(2 * s - 2 * k + 2 * n, chi2)
    den = dirichlet_L(2 * s - 2 * k + 1, chi2)
    if model.analytic is not None:
        D = model.analytic.D(s, chib)
    else:
        D = direct_series(model.coeffs, s, chib, model.growth_exponent)
    value = num.value * D.value / den.value
    rel = (num.abs_error_bound / abs(num.value) + den.abs_error_bound / abs(den.value)
           + D.abs_error_bound / max(abs(D.value), 1e-300))
    return Estimate(complex(value), float(abs(value) * rel))


def sequence_from(values: Sequence) -> CoefficientSequence:
    return CoefficientSequence(tuple(values))
