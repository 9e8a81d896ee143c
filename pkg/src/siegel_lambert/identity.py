"""Both sides of the Lambert-series identity and its contour-integral cross-checks.

The left side is ``sum_m chi(m) c(m) exp(-4 pi m alpha)``.  Writing it as a
Mellin integral and moving the line of integration to the left picks up

* the residue at ``s = k`` (only for N = 1),
* one residue at ``s = rho/2 + k - n`` for every non-trivial zero ``rho``
  of ``L(s, chi^2)``,

and the remaining left-line integral becomes a series of Whittaker
functions ``W_{(n+k)/2, (k-n)/2}``.  The zero residues are computed
directly from the integrand: differentiating ``L(2s + 2n - 2k, chi^2)``
produces a factor 2 in the denominator.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sp

from .characters import DirichletCharacter, gauss_sum, principal_character, square_character
from .dirichlet_series import D_star, SeriesQuotientSpec, a_FG_coefficients
from .errors import (CharacterError, ContinuationUnavailable, SimplicityError,
                     TruncationError)
from .lfunctions.dirichlet import L_derivative, dirichlet_L
from .numerics import csum
from .providers import SiegelPairModel
from .special_functions import bernoulli_number, log_gamma, whittaker_W_estimate
from .zeros import (DEFAULT_C0, ZeroList, bracket_zeros, cached_zeros, check_simplicity)

LHS_TARGET = 1e-17
WHITTAKER_TARGET = 1e-18
RK_RELATIVE_BOUND = 1e-11


def whittaker_indices(k: int, n: int) -> tuple[float, float]:
    """(kappa, mu) of the Whittaker functions in the transformed series."""
    return (n + k) / 2, (k - n) / 2


@dataclass(frozen=True)
class IdentityTask:
    model: SiegelPairModel
    chi: DirichletCharacter
    alpha: float
    zero_height: float = 50.0
    M_lhs: int | None = None
    M_whittaker: int | None = None
    C0: float = DEFAULT_C0
    tolerance: float = 1e-6
    zeros: ZeroList | None = None

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError("alpha must be positive")
        if not self.zero_height > 0:
            raise ValueError("zero_height must be positive")
        if not self.C0 > 0:
            raise ValueError("C0 must be positive")
        if self.chi.modulus > 1:
            SeriesQuotientSpec(self.model.weight_k, self.model.degree_n, self.chi)
        elif not self.chi.is_principal:
            raise CharacterError("character mod 1 must be principal")

    @property
    def beta(self) -> float:
        return 1.0 / self.alpha

    @property
    def N(self) -> int:
        return self.chi.modulus

    @property
    def chi_squared(self) -> DirichletCharacter:
        return square_character(self.chi) if self.N > 1 else principal_character(1)

    def twist(self) -> DirichletCharacter | None:
        return self.chi if self.N > 1 else None


@dataclass(frozen=True)
class Component:
    value: complex
    bound: float
    terms: int = 0


@dataclass(frozen=True)
class BracketTerm:
    indices: tuple[int, ...]
    ordinates: tuple[float, ...]
    value: complex
    bound: float


@dataclass(frozen=True)
class ZeroSum:
    value: complex
    bound: float
    envelope: float
    brackets: tuple[BracketTerm, ...]
    max_pair_imag: float

    @property
    def count(self) -> int:
        return sum(len(b.indices) for b in self.brackets)


# -- left side ------------------------------------------------------------

def _growth_constant(values: np.ndarray, exponent: float) -> float:
    m = np.arange(1, len(values) + 1, dtype=float)
    return float(np.max(np.abs(values) / m ** exponent))


def _geometric_tail(A: float, g: float, x: float, M: int, power: float = 0.0) -> float:
    """Bound for sum_{m > M} A m^g (x m)^power e^{-x m}, or inf if not yet decreasing."""
    m1 = M + 1
    ratio = (1 + 1 / m1) ** (g + power) * math.exp(-x)
    if ratio >= 1:
        return math.inf
    return A * m1 ** g * (x * m1) ** power * math.exp(-x * m1) / (1 - ratio)


def lambert_lhs(task: IdentityTask) -> Component:
    """sum_{m <= M} chi(m) c(m) e^{-4 pi m alpha} with a bound on the omitted tail."""
    coeffs = task.model.coeffs
    g = task.model.growth_exponent
    x = 4 * math.pi * task.alpha
    vals = coeffs.as_complex()
    A = _growth_constant(vals, g)
    chi_tab = task.chi.table(len(vals))
    if task.M_lhs is not None:
        M = task.M_lhs
        if M > len(vals):
            raise TruncationError(f"M_lhs = {M} exceeds the {len(vals)} model coefficients")
    else:
        M = None
        partial = 0.0
        for m in range(1, len(vals) + 1):
            partial += abs(vals[m - 1] * math.exp(-x * m))
            tail = _geometric_tail(A, g, x, m)
            if tail <= LHS_TARGET * partial:
                M = m
                break
        if M is None:
            raise TruncationError(
                f"{len(vals)} coefficients do not reach the tail target at alpha = {task.alpha}")
    m = np.arange(1, M + 1, dtype=float)
    terms = chi_tab[:M] * vals[:M] * np.exp(-x * m)
    value = csum(terms)
    bound = _geometric_tail(A, g, x, M) + 4 * np.finfo(float).eps * float(np.abs(terms).sum())
    return Component(value, float(bound), M)


# -- transformed side -----------------------------------------------------

def whittaker_prefactor(task: IdentityTask) -> complex:
    k, n, N, beta = task.model.weight_k, task.model.degree_n, task.N, task.beta
    base = beta ** (2 * k - n) / math.pi ** (n - 0.5)
    if N == 1:
        return complex(base)
    g_bar = gauss_sum(task.chi.conjugate())
    g_sq = gauss_sum(task.chi_squared)
    return base * N ** (2 * n - 2 * k + 2) / (g_bar ** 4 * g_sq)


def _whittaker_term(k: int, n: int, x: float, a: complex) -> tuple[complex, float]:
    kappa, mu = whittaker_indices(k, n)
    if x > 1400:  # e^{-x/2} W(x) ~ e^{-x} x^kappa underflows
        return 0j, 0.0
    W, Werr = whittaker_W_estimate(kappa, mu, x)
    factor = math.exp((n - 1 - k) / 2 * math.log(x) - x / 2)
    return a * W * factor, abs(a) * Werr * factor


def whittaker_sum(task: IdentityTask, coeffs=None) -> Component:
    """Prefactor times sum_m a(m) x^{(n-1-k)/2} W_{kappa,mu}(x) e^{-x/2}, x = 4 pi m beta / N^2."""
    k, n, N = task.model.weight_k, task.model.degree_n, task.N
    step = 4 * math.pi * task.beta / N ** 2
    available = len(task.model.coeffs)
    limit = task.M_whittaker or available
    if coeffs is None:
        coeffs = a_FG_coefficients(task.model, SeriesQuotientSpec(k, n, task.chi), limit)
    a_vals = coeffs.as_complex()
    # |a(m)| <= A m^k over the computed range; W e^{-x/2} ~ x^{kappa} e^{-x}
    A = _growth_constant(a_vals, k)
    kappa, _ = whittaker_indices(k, n)
    power = (n - 1 - k) / 2 + kappa
    terms, errs = [], []
    ratio_max = 1.0
    M = None
    for m in range(1, limit + 1):
        x = step * m
        t, e = _whittaker_term(k, n, x, a_vals[m - 1])
        terms.append(t)
        errs.append(e)
        if a_vals[m - 1] != 0 and t != 0:
            log_ratio = math.log(abs(t) / abs(a_vals[m - 1])) - power * math.log(x) + x
            ratio_max = max(ratio_max, math.exp(min(log_ratio, 700.0)))
        if task.M_whittaker is None:
            partial = abs(csum(terms))
            tail = 2 * ratio_max * _geometric_tail(A, k, step, m, power)
            if m >= 2 and tail <= WHITTAKER_TARGET * max(partial, 1e-300):
                M = m
                break
    if M is None:
        if task.M_whittaker is None:
            raise TruncationError(
                f"{limit} Whittaker terms do not reach the tail target at beta = {task.beta}")
        M = limit
    pref = whittaker_prefactor(task)
    value = pref * csum(terms)
    tail = 2 * ratio_max * _geometric_tail(A, k, step, M, power)
    if not math.isfinite(tail):
        tail = abs(value)
    bound = abs(pref) * (math.fsum(errs) + tail
                         + 4 * np.finfo(float).eps * float(np.abs(terms).sum()))
    return Component(complex(value), float(bound), M)


def residual_Rk(task: IdentityTask) -> Component:
    """Residue at s = k; zero unless N = 1."""
    if task.N != 1:
        return Component(0j, 0.0)
    pet = task.model.petersson_FG
    if pet is None:
        raise ContinuationUnavailable("model has no Petersson value; the residue term is unknown")
    k, n = task.model.weight_k, task.model.degree_n
    B = float(bernoulli_number(2 * n))
    value = ((-1) ** (n + 1) * math.factorial(2 * n) * pet
             / ((4 * math.pi) ** n * task.alpha ** k * math.factorial(n - 1) * B))
    return Component(complex(value), abs(value) * RK_RELATIVE_BOUND)


def asymptotic_constant(model: SiegelPairModel) -> float:
    """Limit of alpha^k times the left side as alpha -> 0 (N = 1)."""
    n = model.degree_n
    B = float(bernoulli_number(2 * n))
    return ((-1) ** (n + 1) * math.factorial(2 * n) * model.petersson_FG
            / ((4 * math.pi) ** n * math.factorial(n - 1) * B))


# -- zero contributions ---------------------------------------------------

def task_zeros(task: IdentityTask) -> ZeroList:
    if task.zeros is not None and task.zeros.character_label != task.chi_squared.label:
        raise CharacterError(f"zero list is for {task.zeros.character_label}, "
                             f"the identity needs zeros of {task.chi_squared.label}")
    zl = task.zeros if task.zeros is not None else cached_zeros(task.chi_squared, task.zero_height)
    return bracket_zeros(zl.up_to(task.zero_height), task.C0)


def zero_residue(task: IdentityTask, rho: complex) -> tuple[complex, float]:
    """Residue of Gamma(s) D_chi(s) (4 pi alpha)^{-s} at s = rho/2 + k - n."""
    k, n, N = task.model.weight_k, task.model.degree_n, task.N
    s0 = rho / 2 + k - n
    dstar = D_star(task.model, task.twist(), s0, route="analytic")
    dL = L_derivative(rho, task.chi_squared)
    logf = (2 * s0 * math.log(2 * math.pi / N) - s0 * math.log(4 * math.pi * task.alpha)
            - log_gamma(rho / 2))
    f = cmath.exp(logf)
    value = dstar.value * f / (2 * dL.value)
    rel = dstar.abs_error_bound / max(abs(dstar.value), 1e-300) + dL.abs_error_bound / abs(dL.value)
    return complex(value), float(abs(value) * (rel + 1e-14))


def _is_real_problem(task: IdentityTask) -> bool:
    return task.chi.is_real and all(
        isinstance(v, int) or abs(complex(v).imag) == 0 for v in task.model.coeffs.values[:50])


def zero_sum(task: IdentityTask, zeros: ZeroList | None = None, *,
             paired: bool = True) -> ZeroSum:
    """Sum of residues over zeros up to the height cutoff, grouped by bracket.

    Each zero is taken together with its conjugate.  With ``paired`` set and
    a real problem the conjugate residue is the complex conjugate, so the
    pair contributes twice the real part; ``paired=False`` evaluates both.
    """
    if task.model.analytic is None:
        raise ContinuationUnavailable(
            "zero residues need the completed series at rho/2 + k - n, where the defining "
            "series diverges; this model has no analytic evaluator")
    zl = zeros if zeros is not None else task_zeros(task)
    if len(zl) == 0:
        return ZeroSum(0j, 0.0, 0.0, (), 0.0)
    simple = check_simplicity(zl, task.chi_squared)
    if not simple.passed:
        bad = [zl.ordinates[i] for i in simple.failing]
        raise SimplicityError(f"zeros fail the simplicity check: {bad}")
    real = paired and _is_real_problem(task)
    brackets, weighted, max_imag = [], [], 0.0
    for group in zl.brackets:
        vals, bnds = [], 0.0
        for i in group:
            g = zl.ordinates[i]
            r, e = zero_residue(task, complex(0.5, g))
            if real:
                pair = 2 * r.real + 0j
                bnds += 2 * e
            else:
                rc, ec = zero_residue(task, complex(0.5, -g))
                pair = r + rc
                bnds += e + ec
                if _is_real_problem(task):
                    max_imag = max(max_imag, abs(pair.imag) / max(abs(pair), 1e-300))
            vals.append(pair)
            weighted.append(abs(pair) * math.exp(math.pi * g / 4))
        brackets.append(BracketTerm(tuple(group), tuple(zl.ordinates[i] for i in group),
                                    csum(vals), bnds))
    value = csum(b.value for b in brackets)
    bound = math.fsum(b.bound for b in brackets)
    H = task.zero_height
    envelope = max(weighted) * math.exp(-math.pi * H / 4) * 2 * math.log(H + 3) / math.pi ** 2
    return ZeroSum(value, float(bound), float(envelope), tuple(brackets), max_imag)


# -- report -----------------------------------------------------------------

@dataclass(frozen=True)
class IdentityReport:
    lhs: complex
    whittaker_sum: complex
    residual_Rk: complex
    zero_sum: complex
    zero_terms: tuple[BracketTerm, ...]
    rhs_total: complex
    abs_residual: float
    rel_residual: float
    truncation_bounds: dict
    tolerance: float
    passed: bool
    metadata: dict = field(default_factory=dict)

    @property
    def residual_without_zero_sum(self) -> float:
        return abs(self.lhs - (self.whittaker_sum + self.residual_Rk))

    @property
    def bound_total(self) -> float:
        return math.fsum(self.truncation_bounds.values())


def assemble_rhs(whittaker: complex, rk: complex, zs: complex) -> complex:
    return whittaker + rk + zs


def verify_identity(task: IdentityTask, *, workers: int = 1,
                    include_zero_sum: bool = True) -> IdentityReport:
    """Evaluate every component independently and compare the two sides."""
    if task.N > 1:
        task.model.check_twist(task.chi)
    zl = task_zeros(task) if include_zero_sum else None

    def run_zero_sum():
        return zero_sum(task, zl) if include_zero_sum else ZeroSum(0j, 0.0, 0.0, (), 0.0)

    jobs = {"lhs": lambda: lambert_lhs(task), "whittaker": lambda: whittaker_sum(task),
            "rk": lambda: residual_Rk(task), "zeros": run_zero_sum}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {name: pool.submit(fn) for name, fn in jobs.items()}
            results = {name: fut.result() for name, fut in futures.items()}
    else:
        results = {name: fn() for name, fn in jobs.items()}
    lhs, wh, rk, zs = results["lhs"], results["whittaker"], results["rk"], results["zeros"]
    rhs = assemble_rhs(wh.value, rk.value, zs.value)
    abs_res = abs(lhs.value - rhs)
    rel_res = abs_res / abs(lhs.value)
    bounds = {"lhs": lhs.bound, "whittaker_sum": wh.bound, "residual_Rk": rk.bound,
              "zero_sum": zs.bound, "zero_envelope": zs.envelope}
    budget = task.tolerance + math.fsum(bounds.values()) / abs(lhs.value)
    # the envelope estimates the omitted zeros; it is not a proven bound
    strict_budget = task.tolerance + (math.fsum(bounds.values()) - zs.envelope) / abs(lhs.value)
    kappa, mu = whittaker_indices(task.model.weight_k, task.model.degree_n)
    meta = {
        "k": task.model.weight_k, "n": task.model.degree_n, "model": task.model.label,
        "character": task.chi.label, "modulus": task.N, "alpha": task.alpha,
        "beta": task.beta, "zero_height": task.zero_height, "C0": task.C0,
        "M_lhs": lhs.terms, "M_whittaker": wh.terms, "kappa": kappa, "mu": mu,
        "zero_count": zs.count, "zero_provenance": zl.provenance if zl is not None else "none",
        "petersson_FG": task.model.petersson_FG,
        "budget": budget, "strict_budget": strict_budget,
        "strict_passed": bool(rel_res <= strict_budget),
    }
    return IdentityReport(lhs.value, wh.value, rk.value, zs.value, zs.brackets, rhs, abs_res,
                          rel_res, bounds, task.tolerance, bool(rel_res <= budget), meta)


# -- contour integrals ------------------------------------------------------

_GL_LOW = np.polynomial.legendre.leggauss(16)
_GL_HIGH = np.polynomial.legendre.leggauss(24)


def _panel_integral(f, a: float, b: float, panel: float = 1.0) -> tuple[complex, float]:
    """Integral of a vectorised f over [a, b] on Gauss-Legendre panels.

    The error estimate is the difference between 16- and 24-point rules.
    """
    edges = np.linspace(a, b, max(1, int(math.ceil((b - a) / panel))) + 1)
    lows, highs = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        for (x, w), acc in ((_GL_LOW, lows), (_GL_HIGH, highs)):
            acc.append(half * np.asarray(f(mid + half * x)) * w)
    hi_val = csum(np.concatenate(highs))
    lo_val = csum(np.concatenate(lows))
    return hi_val, abs(hi_val - lo_val)


def _default_c(task: IdentityTask) -> float:
    return task.model.weight_k + 1.5


def _default_c1(task: IdentityTask) -> float:
    return task.model.weight_k - task.model.degree_n - 0.5


def _direct_integrand(task: IdentityTask, M: int):
    vals = task.model.coeffs.as_complex(M) * task.chi.table(M)
    logm = np.log(4 * math.pi * task.alpha * np.arange(1, M + 1))

    def f(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        lg = sp.loggamma(s)
        return np.array([csum(vals * np.exp(lgv - sv * logm)) for sv, lgv in zip(s, lg)])
    return f


def right_line_integral(task: IdentityTask, c: float | None = None, T: float = 40.0,
                        M: int | None = None) -> Component:
    """(1/2 pi i) integral over [c - iT, c + iT] of Gamma(s) D_chi(s) (4 pi alpha)^{-s}.

    The Dirichlet series is summed directly, which needs Re s > k + 1.
    """
    c = _default_c(task) if c is None else c
    if c <= task.model.weight_k + 1:
        raise ValueError(f"right line needs c > k + 1 = {task.model.weight_k + 1}")
    M = M or lambert_lhs(task).terms
    f = _direct_integrand(task, M)
    val, err = _panel_integral(lambda t: f(c + 1j * t), -T, T)
    return Component(val / (2 * math.pi), err / (2 * math.pi), M)


def _analytic_integrand(task: IdentityTask, reflect: bool):
    """Gamma(s) D_chi(s) (4 pi alpha)^{-s} through the completed series.

    With ``reflect`` the completed series is taken from the functional
    equation, evaluated at 2k - n - s for the conjugate character.
    """
    k, n, N = task.model.weight_k, task.model.degree_n, task.N
    tw = task.twist()
    chi2 = task.chi_squared
    eta = (gauss_sum(task.chi) / math.sqrt(N)) ** 4 if N > 1 else 1.0
    log_ratio = math.log(2 * math.pi / N)
    log_x = math.log(4 * math.pi * task.alpha)

    def one(s: complex) -> complex:
        if reflect:
            dstar = eta * D_star(task.model, tw.conjugate() if tw else None, 2 * k - n - s,
                                 route="analytic").value
        else:
            dstar = D_star(task.model, tw, s, route="analytic").value
        L = dirichlet_L(2 * s + 2 * n - 2 * k, chi2).value
        return dstar * cmath.exp(2 * s * log_ratio - s * log_x - log_gamma(s + n - k)) / L

    return lambda s: np.array([one(complex(v)) for v in np.atleast_1d(s)])


@dataclass(frozen=True)
class ContourReport:
    right: complex
    left: complex
    top: complex
    bottom: complex
    zero_residues: complex
    residual_Rk: complex
    zero_count: int
    half_height: float
    balance: float
    closed_balance: float
    horizontal: float
    quadrature_error: float
    tolerance: float
    passed: bool


def contour_check(task: IdentityTask, c: float | None = None, c1: float | None = None,
                  T: float = 30.0, tolerance: float = 1e-7) -> ContourReport:
    """Residue-theorem balance on the rectangle c1 <= Re s <= c, |Im s| <= T/2.

    T is measured in zero ordinates: the zero 1/2 + i gamma produces the pole
    rho/2 + k - n at height gamma/2, so zeros with gamma < T lie inside.
    """
    k, n = task.model.weight_k, task.model.degree_n
    c = _default_c(task) if c is None else c
    c1 = _default_c1(task) if c1 is None else c1
    if not k - n - 1 < c1 < k - n:
        raise ValueError(f"left abscissa must lie in ({k - n - 1}, {k - n})")
    H = T / 2
    right = right_line_integral(task, c, H)
    g_left = _analytic_integrand(task, reflect=True)
    left, left_err = _panel_integral(lambda t: g_left(c1 + 1j * t), -H, H)
    left /= 2 * math.pi
    left_err /= 2 * math.pi
    g = _analytic_integrand(task, reflect=False)
    # (1/2 pi i) int ds along the horizontal edges, traversed counter-clockwise
    top, top_err = _panel_integral(lambda x: g(x + 1j * H), c1, c)
    bot, bot_err = _panel_integral(lambda x: g(x - 1j * H), c1, c)
    top, bot = -top / (2j * math.pi), bot / (2j * math.pi)
    zl = task_zeros(task)
    zl = ZeroList(zl.character_label, tuple(x for x in zl.ordinates if x < T), zl.refinement_error)
    zs = zero_sum(task, zl)
    rk = residual_Rk(task)
    open_bal = abs(right.value - left - zs.value - rk.value)
    closed = abs(right.value - left + top + bot - zs.value - rk.value)
    qerr = right.bound + left_err + (top_err + bot_err) / (2 * math.pi) + zs.bound + rk.bound
    horizontal = abs(top + bot)
    passed = open_bal <= tolerance + horizontal + qerr
    return ContourReport(right.value, left, top, bot, zs.value, rk.value, len(zl), H,
                         float(open_bal), float(closed), float(horizontal), float(qerr),
                         tolerance, bool(passed))


# -- asymptotics ---------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticRow:
    alpha: float
    scaled_lhs: float
    constant: float
    ratio: float
    terms: int


def asymptotic_probe(model: SiegelPairModel, alphas) -> list[AsymptoticRow]:
    """alpha^k times the left side against its alpha -> 0 limit."""
    if model.petersson_FG is None or model.petersson_FG == 0:
        raise ValueError("the probe needs a model with non-zero Petersson value")
    const = asymptotic_constant(model)
    rows = []
    for a in alphas:
        task = IdentityTask(model, principal_character(1), float(a))
        lhs = lambert_lhs(task)
        scaled = a ** model.weight_k * lhs.value.real
        rows.append(AsymptoticRow(float(a), scaled, const, scaled / const, lhs.terms))
    return rows
