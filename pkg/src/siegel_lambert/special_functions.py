"""Complex special functions used by the L-function and identity code.

Gamma and log-gamma come from :mod:`scipy.special`; the incomplete gamma
function, Bernoulli numbers, the Meijer G-function ``G^{2,0}_{1,2}`` and the
Whittaker function ``W_{kappa,mu}`` are implemented here.  The Meijer function
is evaluated by trapezoidal quadrature of its Mellin-Barnes integral along a
vertical line placed at the real saddle point of the integrand, which keeps
the integrand magnitude comparable to the result and avoids cancellation.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import special as sp
from scipy.optimize import minimize_scalar

from .errors import ContourError, ConvergenceError, PoleError
from .numerics import csum

__all__ = [
    "ComplexPoint",
    "WhittakerParams",
    "MellinBarnesResult",
    "log_gamma",
    "gamma",
    "upper_incomplete_gamma",
    "lower_incomplete_gamma_series",
    "bernoulli_number",
    "meijer_g_120",
    "whittaker_W",
    "whittaker_asymptotic",
    "whittaker_W_estimate",
]

_EPS = np.finfo(float).eps
MAX_BERNOULLI_INDEX = 64
ASYMPTOTIC_Z = 700.0
# below this the expansion is used only once its terms drop under rounding
ASYMPTOTIC_MIN_Z = 50.0
# beyond these the contour integrand cancels badly for small z
VALIDATED_KAPPA = 9.5
VALIDATED_MU = 10.0


@dataclass(frozen=True)
class ComplexPoint:
    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("complex point must have finite components")

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class WhittakerParams:
    kappa: float
    mu: float
    z: float

    def __post_init__(self):
        if not self.z > 0:
            raise ValueError(f"Whittaker argument must be positive, got {self.z}")


def _nonpositive_integer(z: complex) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z)."""
    if _nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z}")
    return complex(sp.loggamma(complex(z)))


def gamma(z: complex) -> complex:
    return cmath.exp(log_gamma(z))


# --------------------------------------------------------------------------
# incomplete gamma
# --------------------------------------------------------------------------

def lower_incomplete_gamma_series(s: complex, x: np.ndarray | complex,
                                  max_terms: int = 5000) -> np.ndarray:
    """gamma(s, x) = x^s e^{-x} sum_n x^n / (s (s+1) ... (s+n))."""
    s = complex(s)
    xs = np.atleast_1d(np.asarray(x, dtype=complex))
    term = np.full(xs.shape, 1.0 / s, dtype=complex)
    total = term.copy()
    for n in range(1, max_terms):
        term = term * xs / (s + n)
        total = total + term
        if np.all(np.abs(term) <= _EPS * 0.25 * np.abs(total)):
            break
    else:
        raise ConvergenceError(f"lower gamma series for s={s} did not converge")
    return np.exp(s * np.log(xs) - xs) * total


def _upper_gamma_cf(s: complex, xs: np.ndarray, max_iter: int) -> tuple[np.ndarray, np.ndarray]:
    """Legendre continued fraction for Gamma(s, x), evaluated by modified Lentz.

    Returns the values and a mask of elements that converged.
    """
    tiny = 1e-300
    b = xs + 1.0 - s
    f = np.where(b == 0, tiny, b)
    c = f.copy()
    d = np.zeros_like(f)
    done = np.zeros(xs.shape, dtype=bool)
    for n in range(1, max_iter):
        an = -n * (n - s)
        b = b + 2.0
        d = b + an * d
        d = np.where(d == 0, tiny, d)
        c = b + an / c
        c = np.where(c == 0, tiny, c)
        d = 1.0 / d
        delta = c * d
        f = np.where(done, f, f * delta)
        done |= np.abs(delta - 1.0) < 2 * _EPS
        if done.all():
            break
    return np.exp(s * np.log(xs) - xs) / f, done


def _upper_gamma(s: complex, x, max_iter: int = 20000) -> np.ndarray:
    """Vectorised Gamma(s, x) for complex s and |arg x| < pi/2."""
    s = complex(s)
    xs = np.atleast_1d(np.asarray(x, dtype=complex))
    if np.any(xs.real <= 0):
        raise ValueError("incomplete gamma argument must have positive real part")
    out = np.empty(xs.shape, dtype=complex)
    pole = _nonpositive_integer(s)
    use_cf = np.abs(xs) > max(1.0, 0.8 * abs(s)) if not pole else np.ones(xs.shape, bool)
    if np.any(~use_cf):
        xser = xs[~use_cf]
        g_s = gamma(s)
        low = lower_incomplete_gamma_series(s, xser)
        val = g_s - low
        # more than ~5 digits cancelled: redo those by continued fraction
        lost = np.abs(val) < 1e-5 * np.maximum(abs(g_s), np.abs(low))
        out_ser = val
        if np.any(lost):
            cf, ok = _upper_gamma_cf(s, xser[lost], max_iter)
            if not ok.all():
                raise ConvergenceError(f"incomplete gamma: no convergence at s={s}")
            out_ser = out_ser.copy()
            out_ser[lost] = cf
        out[~use_cf] = out_ser
    if np.any(use_cf):
        cf, ok = _upper_gamma_cf(s, xs[use_cf], max_iter)
        if not ok.all():
            if pole:
                raise ConvergenceError(f"incomplete gamma: no convergence at s={s}")
            # fall back to the series for the stragglers
            xbad = xs[use_cf][~ok]
            cf[~ok] = gamma(s) - lower_incomplete_gamma_series(s, xbad)
        out[use_cf] = cf
    return out


def upper_incomplete_gamma(s: complex, x: float) -> complex:
    """Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt for x > 0."""
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    return complex(_upper_gamma(s, x)[0])


# --------------------------------------------------------------------------
# Bernoulli numbers
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_table() -> tuple[Fraction, ...]:
    table = [Fraction(1)]
    for m in range(1, MAX_BERNOULLI_INDEX + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * table[j]
        table.append(-acc / (m + 1))
    return tuple(table)


def bernoulli_number(idx: int) -> Fraction:
    """Exact Bernoulli number B_idx for even 2 <= idx <= 64."""
    if idx < 2 or idx % 2:
        raise ValueError(f"Bernoulli index must be even and >= 2, got {idx}")
    if idx > MAX_BERNOULLI_INDEX:
        raise ValueError(f"Bernoulli numbers are tabulated up to {MAX_BERNOULLI_INDEX}")
    return _bernoulli_table()[idx]


# --------------------------------------------------------------------------
# Mellin-Barnes quadrature for G^{2,0}_{1,2}
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MellinBarnesResult:
    """Value of a Mellin-Barnes integral with its error budget.

    ``truncation_bound`` bounds the neglected tails |Im w| > height;
    ``quadrature_error`` is the difference between the last two step sizes.
    """

    value: complex
    quadrature_error: float
    truncation_bound: float
    abscissa: float
    height: float
    step: float

    @property
    def error_bound(self) -> float:
        return self.quadrature_error + self.truncation_bound


def _log_integrand(a: complex, b1: complex, b2: complex, logz: float, w: np.ndarray) -> np.ndarray:
    return (sp.loggamma(b1 + w) + sp.loggamma(b2 + w) - sp.loggamma(a + w)
            - w * logz)


def _choose_abscissa(a: complex, b1: complex, b2: complex, z: float) -> float:
    lower = max(-complex(b1).real, -complex(b2).real)
    lo = lower + 0.5
    hi = lo + 2.0 * z + 60.0
    logz = math.log(z)

    def phi(d: float) -> float:
        return float(_log_integrand(a, b1, b2, logz, np.array([d + 0j]))[0].real)

    res = minimize_scalar(phi, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-3})
    d = float(res.x)
    # keep Gamma(a + w) away from its poles on the real axis
    ad = complex(a).real + d
    if complex(a).imag == 0.0 and ad <= 0 and abs(ad - round(ad)) < 0.05:
        d += 0.1
    return d


def _tail_rate(a, b1, b2, d: float, t: float) -> float:
    w = complex(d, t)
    return float((sp.psi(b1 + w) + sp.psi(b2 + w) - sp.psi(a + w)).imag)


def _mellin_barnes(a: complex, b1: complex, b2: complex, z: float,
                   height: float | None = None, tol: float = 1e-15, check: bool = True):
    """Trapezoidal evaluation of (1/2 pi i) int Gamma(b1+w)Gamma(b2+w)/Gamma(a+w) z^{-w} dw.

    Returns ``(mantissa, log_scale, quad_err, trunc_bound, d, H, h)`` with all
    magnitudes relative to ``exp(log_scale)``.
    """
    if not z > 0:
        raise ValueError("Meijer G argument must be a positive real")
    for b in (b1, b2) if check else ():
        diff = complex(a) - complex(b)
        if diff.imag == 0.0 and diff.real >= 1 and diff.real == math.floor(diff.real):
            raise ContourError(f"a1 - b = {diff.real:g} is a positive integer")
    a, b1, b2 = complex(a), complex(b1), complex(b2)
    logz = math.log(z)
    d = _choose_abscissa(a, b1, b2, z)
    log_peak = float(_log_integrand(a, b1, b2, logz, np.array([d + 0j]))[0].real)

    def logf(t: np.ndarray) -> np.ndarray:
        return _log_integrand(a, b1, b2, logz, d + 1j * np.asarray(t, dtype=float))

    # tails: |f| decreases monotonically once the rate is positive
    def tail_bound(H: float) -> float:
        rate = min(_tail_rate(a, b1, b2, d, H), _tail_rate(a, b1, b2, d, 2 * H),
                   math.pi / 2)
        rate_neg = min(-_tail_rate(a, b1, b2, d, -H), -_tail_rate(a, b1, b2, d, -2 * H),
                       math.pi / 2)
        total = 0.0
        for t, r in ((H, rate), (-H, rate_neg)):
            if r <= 0:
                return math.inf
            total += 2.0 * math.exp(float(logf(np.array([t]))[0].real) - log_peak) / r
        return total / (2 * math.pi)

    if height is None:
        H = max(8.0, 6.0 * math.sqrt(abs(d) + 1.0))
        while tail_bound(H) > 1e-18 and H < 1e4:
            H *= 1.5
    else:
        H = float(height)
        if H <= 0:
            raise ValueError("quadrature height must be positive")
    trunc = tail_bound(H)

    def f(t: np.ndarray) -> np.ndarray:
        return np.exp(logf(t) - log_peak)

    h = 0.25
    K = int(math.ceil(H / h))
    extent = K * h
    t = h * np.arange(-K, K + 1)
    vals = f(t)
    est = h * csum(vals) / (2 * math.pi)
    scale = h * float(np.abs(vals).sum()) / (2 * math.pi)
    for _ in range(12):
        h_new = h / 2
        K = int(round(extent / h_new))
        odd = h_new * np.arange(-K + 1, K, 2)
        new_vals = f(odd)
        new_est = est / 2 + h_new * csum(new_vals) / (2 * math.pi)
        scale = scale / 2 + h_new * float(np.abs(new_vals).sum()) / (2 * math.pi)
        diff = abs(new_est - est)
        est, h = new_est, h_new
        # a truncated window cannot converge past its own tail error
        if diff <= max(tol * scale, 1e-3 * trunc):
            break
    else:
        raise ConvergenceError(
            f"Mellin-Barnes quadrature did not converge (a={a}, b=({b1},{b2}), z={z})")
    quad_err = float(diff + 10 * _EPS * scale)
    return est, log_peak, quad_err, trunc, d, H, h


def meijer_g_120(a1: complex, b1: complex, b2: complex, z: float,
                 height: float | None = None) -> MellinBarnesResult:
    """G^{2,0}_{1,2}(a1; b1, b2 | z) for real z > 0.

    The vertical contour lies to the right of every pole of Gamma(b_j + w).
    ``height`` fixes the truncation |Im w| <= height; by default it is chosen
    from the Stirling decay of the integrand.
    """
    est, log_scale, qerr, trunc, d, H, h = _mellin_barnes(a1, b1, b2, z, height)
    factor = math.exp(log_scale)
    return MellinBarnesResult(value=complex(est) * factor,
                              quadrature_error=qerr * factor,
                              truncation_bound=trunc * factor,
                              abscissa=d, height=H, step=h)


# --------------------------------------------------------------------------
# Whittaker W
# --------------------------------------------------------------------------

def _asymptotic_series(kappa: float, mu: float, z: float,
                       max_terms: int = 200) -> tuple[float, float, bool]:
    """Partial sum with the first omitted term; the flag is set once terms drop below rounding."""
    term = 1.0
    total = 1.0
    prev = math.inf
    for s in range(1, max_terms):
        term *= (0.5 + mu - kappa + s - 1) * (0.5 - mu - kappa + s - 1) / (s * -z)
        if abs(term) > prev:
            return total, prev, False
        total += term
        prev = abs(term)
        if abs(term) < _EPS * abs(total) * 0.1:
            return total, abs(term), True
    return total, prev, False


def whittaker_asymptotic(kappa: float, mu: float, z: float, max_terms: int = 200) -> float:
    """Large-z expansion W ~ e^{-z/2} z^kappa sum_s (1/2+mu-kappa)_s (1/2-mu-kappa)_s / s! (-z)^{-s}."""
    total, _, _ = _asymptotic_series(kappa, mu, z, max_terms)
    return math.exp(-z / 2 + kappa * math.log(z)) * total


def _use_asymptotic(kappa: float, mu: float, z: float) -> bool:
    if z > ASYMPTOTIC_Z:
        return True
    return z >= ASYMPTOTIC_MIN_Z and _asymptotic_series(kappa, mu, z)[2]


def _closed_form(kappa: float, mu: float) -> bool:
    return kappa - mu - 0.5 == 0.0 or kappa + mu - 0.5 == 0.0


def whittaker_W(p: WhittakerParams | float, mu: float | None = None,
                z: float | None = None) -> float:
    """Whittaker function W_{kappa,mu}(z) for real parameters and z > 0.

    Accepts either a :class:`WhittakerParams` or ``(kappa, mu, z)``.
    """
    if not isinstance(p, WhittakerParams):
        p = WhittakerParams(float(p), float(mu), float(z))
    kappa, mu, z = p.kappa, p.mu, p.z
    if abs(kappa) > VALIDATED_KAPPA or abs(mu) > VALIDATED_MU or not (1e-3 <= z <= 1e3):
        warnings.warn(f"Whittaker parameters (kappa={kappa}, mu={mu}, z={z}) are outside "
                      "the validated range", RuntimeWarning, stacklevel=2)
    if _closed_form(kappa, mu):
        return math.exp(kappa * math.log(z) - z / 2)
    if _use_asymptotic(kappa, mu, z):
        return whittaker_asymptotic(kappa, mu, z)
    # G^{2,0}_{1,2}(1 - kappa; 1/2 + mu, 1/2 - mu | z) = e^{-z/2} W_{kappa,mu}(z)
    est, log_scale, *_ = _mellin_barnes(1.0 - kappa, 0.5 + mu, 0.5 - mu, z, check=False)
    return float((complex(est) * math.exp(log_scale + z / 2)).real)


def whittaker_W_estimate(kappa: float, mu: float, z: float) -> tuple[float, float]:
    """Whittaker value and its absolute error bound (quadrature route only)."""
    if _closed_form(kappa, mu):
        return whittaker_W(kappa, mu, z), 0.0
    # exp() of a rounded exponent E carries a relative error near eps * |E|
    if _use_asymptotic(kappa, mu, z):
        total, omitted, _ = _asymptotic_series(kappa, mu, z)
        v = math.exp(-z / 2 + kappa * math.log(z)) * total
        rounding = 16 * _EPS * (1 + z / 2 + abs(kappa * math.log(z)))
        return v, (1e-14 + omitted / abs(total) + rounding) * abs(v)
    est, log_scale, qerr, trunc, d, *_ = _mellin_barnes(1.0 - kappa, 0.5 + mu, 0.5 - mu, z,
                                                        check=False)
    factor = math.exp(log_scale + z / 2)
    value = float(complex(est).real * factor)
    rounding = 16 * _EPS * (1 + abs(log_scale) + z / 2 + abs(d * math.log(z)))
    return value, (qerr + trunc) * factor + rounding * abs(value)
