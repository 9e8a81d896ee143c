"""Dirichlet L-functions built on the Hurwitz zeta function, with their completions.

Everything is built on one Euler-Maclaurin evaluator for
``sum_{j>=0} (j + a)^{-s}`` that returns the value and its s-derivative
together with a remainder bound.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..characters import DirichletCharacter, gauss_sum, principal_character
from ..errors import CharacterError, PoleError
from ..numerics import Estimate, abs_sum, csum
from ..special_functions import bernoulli_number, log_gamma

LValue = Estimate

BERNOULLI_TERMS = 12
_EPS = np.finfo(float).eps
# B_{2p} / (2p)! for p = 1 .. BERNOULLI_TERMS + 1
_BCOEF = [float(bernoulli_number(2 * p)) / math.factorial(2 * p)
          for p in range(1, BERNOULLI_TERMS + 2)]


def _singular(u: complex, L: float, deriv: bool) -> complex:
    """(e^{-uL} - 1)/u, or its u-derivative, without cancellation near u = 0."""
    z = -u * L
    if abs(z) < 0.5:
        total, term = 0j, 1.0 + 0j
        for j in range(1, 40):
            term = term * (-L) / j  # (-L)^j / j!
            if deriv:
                if j >= 2:
                    total += term * (j - 1) * u ** (j - 2)
            else:
                total += term * u ** (j - 1)
        return total
    e = np.exp(z)
    if deriv:
        return (-L * e * u - (e - 1.0)) / (u * u)
    return (e - 1.0) / u


def _cutoff(s: complex) -> int:
    return int(max(20, math.ceil(2 * abs(s.imag)), math.ceil(abs(s) + 2)))


def _em_parts(s: complex, a: float, deriv: bool, X: int | None = None):
    """Euler-Maclaurin pieces for sum_{j>=0} (j+a)^{-s}.

    Returns ``(regular, singular_coefficient, bound)`` where the full value
    is ``regular + singular_coefficient / (s - 1)``.  With ``deriv`` set the
    pieces describe the s-derivative and the coefficient multiplies
    ``-1/(s-1)^2`` instead.
    """
    s = complex(s)
    X = X or _cutoff(s)
    j = np.arange(X, dtype=float) + a
    logj = np.log(j)
    powers = np.exp(-s * logj)
    if deriv:
        head = -logj * powers
    else:
        head = powers
    xa = X + a
    L = math.log(xa)
    xpow = np.exp(-s * L)  # (X+a)^{-s}
    u = s - 1.0

    # (X+a)^{1-s}/(s-1) = X^{-u} E_a(u) + (X^{-u} - 1)/u + 1/u, u = s - 1
    LX, La = math.log(X), math.log1p(a / X)
    xu = np.exp(-u * LX)
    pieces = [csum(head)]
    if deriv:
        pieces.append(xu * (_singular(u, La, True) - LX * _singular(u, La, False)))
        pieces.append(_singular(u, LX, True))
        pieces.append(-0.5 * L * xpow)
    else:
        pieces.append(xu * _singular(u, La, False))
        pieces.append(_singular(u, LX, False))
        pieces.append(0.5 * xpow)

    # Bernoulli corrections: B_{2p}/(2p)! (s)_{2p-1} (X+a)^{-s-2p+1}
    poch, dpoch = s + 0j, 1.0 + 0j  # (s)_1 and its derivative
    corr = []
    for p in range(1, BERNOULLI_TERMS + 1):
        base = xpow * xa ** (1 - 2 * p)
        if deriv:
            corr.append(_BCOEF[p - 1] * (dpoch - L * poch) * base)
        else:
            corr.append(_BCOEF[p - 1] * poch * base)
        for i in (2 * p - 1, 2 * p):
            dpoch = dpoch * (s + i) + poch
            poch = poch * (s + i)
    pieces.extend(corr)

    # remainder: first omitted term times |s+2P+1| / (Re s + 2P + 1)
    P = BERNOULLI_TERMS
    nxt = abs(_BCOEF[P] * poch * xpow * xa ** (-2 * P - 1))
    denom = s.real + 2 * P + 1
    factor = abs(s + 2 * P + 1) / denom if denom > 0.5 else abs(s + 2 * P + 1) * 2.0
    bound = nxt * factor
    if deriv:
        bound *= L + sum(1.0 / max(abs(s + i), 1e-3) for i in range(2 * P + 2))
    regular = csum(pieces)
    # phase rounding in exp(-s log j) is about eps * |s| log j per term
    phase = 1.0 + abs(s) * logj
    bound += 4 * _EPS * (abs_sum(head * phase) + (1.0 + abs(s) * L) * sum(abs(c) for c in pieces[1:]))
    return regular, 1.0 + 0j, float(bound)


def hurwitz_zeta(s: complex, a: float) -> LValue:
    """zeta(s, a) = sum_{j>=0} (j + a)^{-s} for 0 < a <= 1, continued to s != 1."""
    s = complex(s)
    if s == 1:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    if not 0 < a <= 1:
        raise ValueError("Hurwitz parameter must lie in (0, 1]")
    reg, coef, bound = _em_parts(s, a, False)
    return LValue(reg + coef / (s - 1), bound)


def hurwitz_zeta_derivative(s: complex, a: float) -> LValue:
    s = complex(s)
    if s == 1:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    reg, coef, bound = _em_parts(s, a, True)
    return LValue(reg - coef / (s - 1) ** 2, bound)


def _character_sum(s: complex, chi: DirichletCharacter, deriv: bool, X: int | None = None):
    s = complex(s)
    N = chi.modulus
    weights = [(chi.values[r], r / N if r else 1.0) for r in range(N) if abs(chi.values[r]) > 0.5]
    if N == 1:
        weights = [(1.0 + 0j, 1.0)]
    total_weight = sum(w for w, _ in weights)
    has_pole = abs(total_weight) > 1e-9
    if has_pole and s == 1:
        raise PoleError(f"L(s, {chi.label or 'chi'}) has a pole at s = 1")
    regs, bound = [], 0.0
    for w, a in weights:
        reg, _, b = _em_parts(s, a, deriv, X)
        regs.append(w * reg)
        bound += b
    value = csum(regs)
    if has_pole:
        value += total_weight * (-1.0 / (s - 1) ** 2 if deriv else 1.0 / (s - 1))
    # multiply by N^{-s}; the derivative picks up -log N times the value
    Ns = N ** (-s) if N > 1 else 1.0
    if deriv and N > 1:
        plain = _character_sum(s, chi, False, X)
        value = Ns * value - math.log(N) * plain.value
        bound = abs(Ns) * bound + math.log(N) * plain.abs_error_bound
    else:
        value = Ns * value
        bound = abs(Ns) * bound
    return LValue(value, bound)


REFLECT_BELOW = -0.5


def dirichlet_L(s: complex, chi: DirichletCharacter) -> LValue:
    """L(s, chi) = N^{-s} sum_a chi(a) zeta(s, a/N).

    Left of Re s = -1/2 a primitive character is reflected through the
    functional equation: the Hurwitz sums there cancel heavily.
    """
    s = complex(s)
    if s.real < REFLECT_BELOW and chi.primitive:
        return _reflected(s, chi)
    return _character_sum(s, chi, False)


def _reflected(s: complex, chi: DirichletCharacter) -> LValue:
    eps = chi.parity_epsilon
    half = 0.5 * (s + eps)
    if half.imag == 0 and half.real <= 0 and half.real == math.floor(half.real):
        return LValue(0j, 0.0)  # trivial zero
    dual = _character_sum(1 - s, chi.conjugate(), False)
    log_factor = ((0.5 - s) * math.log(chi.modulus / math.pi)
                  + log_gamma(0.5 * (1 - s + eps)) - log_gamma(half))
    factor = root_number(chi) * cmath.exp(log_factor)
    value = factor * dual.value
    rounding = 8 * _EPS * (1 + abs(log_factor))
    return LValue(value, abs(factor) * dual.abs_error_bound + rounding * abs(value))


def L_derivative(s: complex, chi: DirichletCharacter) -> LValue:
    """d/ds L(s, chi) from the term-wise differentiated Euler-Maclaurin sum."""
    return _character_sum(s, chi, True)


def riemann_zeta(s: complex) -> LValue:
    return dirichlet_L(s, principal_character(1))


def gamma_factor_log(s: complex, chi: DirichletCharacter) -> complex:
    """log of (N/pi)^{s/2} Gamma((s + eps)/2)."""
    N = chi.modulus
    return 0.5 * s * math.log(N / math.pi) + log_gamma(0.5 * (s + chi.parity_epsilon))


def completed_L(s: complex, chi: DirichletCharacter) -> LValue:
    """Lambda(s, chi) = (N/pi)^{s/2} Gamma((s + eps)/2) L(s, chi) for primitive chi."""
    if not chi.primitive:
        raise CharacterError(f"completed L-function needs a primitive character, got {chi.label}")
    s = complex(s)
    L = dirichlet_L(s, chi)
    factor = np.exp(gamma_factor_log(s, chi))
    value = factor * L.value
    return LValue(value, abs(factor) * L.abs_error_bound + 4 * _EPS * abs(value))


def root_number(chi: DirichletCharacter) -> complex:
    """i^{-eps} g(chi) / sqrt(N), the factor in Lambda(s) = w Lambda(1-s, conj chi)."""
    return (1j) ** (-chi.parity_epsilon) * gauss_sum(chi) / math.sqrt(chi.modulus)
