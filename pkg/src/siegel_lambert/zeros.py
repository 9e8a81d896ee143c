"""Zeros of self-dual Dirichlet L-functions on the critical line.

Zeros are found as sign changes of the Hardy function ``Z(t)``, refined with
Brent's method, and the total is checked against the argument-principle
count ``N(T)``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from ._cache import cache_dir
from .characters import DirichletCharacter
from .errors import CharacterError, ConvergenceError, CountMismatchError, ParseError
from .lfunctions.dirichlet import (L_derivative, completed_L, dirichlet_L, gamma_factor_log,
                                   root_number)

SIMPLICITY_THRESHOLD = 1e-4
DEFAULT_C0 = 1.0
REFINE_XTOL = 1e-13
MAX_HEIGHT = 1000.0


class NotSelfDualWarning(UserWarning):
    """Hardy function requested for a character that is not real."""


@dataclass(frozen=True)
class ZeroList:
    """Ordinates 0 < gamma_1 < gamma_2 < ... of zeros 1/2 + i gamma.

    ``brackets`` partitions ``range(len(ordinates))`` into runs of
    consecutive indices.
    """

    character_label: str
    ordinates: tuple[float, ...]
    refinement_error: float = 0.0
    brackets: tuple[tuple[int, ...], ...] = field(default=())
    provenance: str = "computed"

    def __post_init__(self):
        ords = tuple(float(x) for x in self.ordinates)
        object.__setattr__(self, "ordinates", ords)
        if any(not math.isfinite(x) or x <= 0 for x in ords):
            raise ValueError("zero ordinates must be positive and finite")
        if any(b <= a for a, b in zip(ords, ords[1:])):
            raise ValueError("zero ordinates must be strictly increasing")
        if not self.brackets:
            object.__setattr__(self, "brackets", tuple((i,) for i in range(len(ords))))
        flat = [i for group in self.brackets for i in group]
        if flat != list(range(len(ords))) or any(len(g) == 0 for g in self.brackets):
            raise ValueError("brackets must partition the zeros into consecutive runs")

    def __len__(self) -> int:
        return len(self.ordinates)

    def up_to(self, height: float) -> "ZeroList":
        keep = [x for x in self.ordinates if x <= height]
        groups = tuple(g for g in self.brackets if g[-1] < len(keep))
        if groups and sum(len(g) for g in groups) != len(keep):
            groups = ()
        return ZeroList(self.character_label, tuple(keep), self.refinement_error, groups,
                        self.provenance)


def _require_self_dual(chi: DirichletCharacter) -> None:
    if not chi.primitive:
        raise CharacterError(f"zeros are only located for primitive characters, got {chi.label}")
    if not chi.is_real:
        raise CharacterError(f"zeros are only located for real characters, got {chi.label}")


def theta(t: float, chi: DirichletCharacter) -> float:
    """Phase of the gamma factor on the critical line, continuous in t."""
    return gamma_factor_log(complex(0.5, t), chi).imag


def hardy_Z(t: float, chi: DirichletCharacter) -> float:
    """Real rotation exp(i theta(t)) L(1/2 + it, chi) of L on the critical line.

    For characters that are not real the rotation also divides by the square
    root of the root number; the result is then only approximately real and
    its real part is returned with a :class:`NotSelfDualWarning`.
    """
    val = cmath.exp(1j * theta(t, chi)) * dirichlet_L(complex(0.5, t), chi).value
    if not chi.is_real:
        warnings.warn(f"character {chi.label} is not self-dual; returning the real part",
                      NotSelfDualWarning, stacklevel=2)
        val /= cmath.sqrt(root_number(chi))
    return val.real


def _scan_step(t: float, chi: DirichletCharacter, factor: float) -> float:
    # a fraction of the mean zero spacing 2 pi / log(N t / 2 pi)
    spacing = 2 * math.pi / math.log(max(chi.modulus * t / (2 * math.pi), 1.0) + math.e)
    return factor * spacing


def _scan_grid(height: float, chi: DirichletCharacter, factor: float) -> np.ndarray:
    pts = [0.0]
    while pts[-1] < height:
        pts.append(min(height, pts[-1] + _scan_step(pts[-1], chi, factor)))
    return np.array(pts)


def _evaluate(ts: np.ndarray, chi: DirichletCharacter, workers: int) -> np.ndarray:
    if workers <= 1 or len(ts) < 64:
        return np.array([hardy_Z(t, chi) for t in ts])
    chunks = np.array_split(ts, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: [hardy_Z(t, chi) for t in c], chunks))
    return np.concatenate([np.asarray(p) for p in parts])


def zero_count(chi: DirichletCharacter, T: float, sigma0: float = 2.5) -> int:
    """Argument-principle count of zeros with 0 < gamma <= T."""
    _require_self_dual(chi)
    arg = _arg_L_on_line(chi, T, sigma0)
    value = (theta(T, chi) + arg) / math.pi
    if chi.modulus == 1:
        value += 1.0  # from the poles of the gamma-completed zeta at 0 and 1
    nearest = round(value)
    if abs(value - nearest) > 0.25:
        raise ConvergenceError(f"argument-principle count {value:.3f} is not near an integer; "
                               "T is too close to a zero")
    return int(nearest)


def _arg_L_on_line(chi: DirichletCharacter, T: float, sigma0: float) -> float:
    """arg L(1/2 + iT) continued horizontally from Re s = sigma0."""
    def L(sig: float) -> complex:
        return dirichlet_L(complex(sig, T), chi).value

    sig, val = sigma0, L(sigma0)
    total = cmath.phase(val)
    step = 0.05
    while sig > 0.5:
        nxt = max(0.5, sig - step)
        new = L(nxt)
        change = cmath.phase(new / val)
        if abs(change) > math.pi / 8 and step > 1e-6:
            step /= 2
            continue
        total += change
        sig, val = nxt, new
        step = min(step * 1.5, 0.05)
    return total


def find_zeros(chi: DirichletCharacter, height: float, *, scan_factor: float = 0.1,
               workers: int = 1, max_refinements: int = 4) -> ZeroList:
    """All zeros 1/2 + i gamma with 0 < gamma <= height, checked against N(height)."""
    _require_self_dual(chi)
    if not 0 < height <= MAX_HEIGHT:
        raise ValueError(f"height must lie in (0, {MAX_HEIGHT}]")
    expected = zero_count(chi, height)
    factor = scan_factor
    for _ in range(max_refinements + 1):
        ts = _scan_grid(height, chi, factor)
        zs = _evaluate(ts, chi, workers)
        idx = np.nonzero(np.sign(zs[:-1]) * np.sign(zs[1:]) < 0)[0]
        if len(idx) == expected:
            break
        factor /= 2
    else:
        raise CountMismatchError(
            f"scan found {len(idx)} sign changes below {height}, argument principle gives {expected}")
    roots = []
    for i in idx:
        r, info = brentq(hardy_Z, ts[i], ts[i + 1], args=(chi,), xtol=REFINE_XTOL,
                         full_output=True)
        if not info.converged:
            raise ConvergenceError(f"zero refinement failed near t = {ts[i]:.6f}")
        roots.append(r)
    err = 2 * REFINE_XTOL + 8 * np.finfo(float).eps * (roots[-1] if roots else 0.0)
    return ZeroList(chi.label, tuple(roots), float(err))


def bracket_zeros(zl: ZeroList, C0: float = DEFAULT_C0) -> ZeroList:
    """Group consecutive ordinates closer than the sum of their bracketing radii."""
    def radius(g: float) -> float:
        if math.isinf(C0):
            return 0.0
        return math.exp(-C0 * abs(g) / math.log(abs(g) + 3))

    groups: list[list[int]] = []
    ords = zl.ordinates
    for i, g in enumerate(ords):
        if groups and abs(g - ords[i - 1]) < radius(g) + radius(ords[i - 1]):
            groups[-1].append(i)
        else:
            groups.append([i])
    return ZeroList(zl.character_label, ords, zl.refinement_error,
                    tuple(tuple(gr) for gr in groups), zl.provenance)


@dataclass(frozen=True)
class SimplicityReport:
    derivative_moduli: tuple[float, ...]
    threshold: float

    @property
    def flags(self) -> tuple[bool, ...]:
        return tuple(d >= self.threshold for d in self.derivative_moduli)

    @property
    def passed(self) -> bool:
        return all(self.flags)

    @property
    def failing(self) -> tuple[int, ...]:
        return tuple(i for i, ok in enumerate(self.flags) if not ok)


def check_simplicity(zl: ZeroList, chi: DirichletCharacter,
                     threshold: float = SIMPLICITY_THRESHOLD) -> SimplicityReport:
    mods = tuple(abs(L_derivative(complex(0.5, g), chi).value) for g in zl.ordinates)
    return SimplicityReport(mods, threshold)


def revalidate(zl: ZeroList, chi: DirichletCharacter, tol: float = 1e-6) -> list[float]:
    """|Lambda(1/2 + i gamma)| for each zero; raises if any exceeds ``tol``."""
    vals = [abs(completed_L(complex(0.5, g), chi).value) for g in zl.ordinates]
    bad = [g for g, v in zip(zl.ordinates, vals) if v > tol]
    if bad:
        raise ConvergenceError(f"{len(bad)} ordinates fail revalidation, first {bad[0]!r}")
    return vals


def snap_height(zl: ZeroList, chi: DirichletCharacter, T: float) -> float:
    """Move T to the maximum of |Z| between the zeros on either side of it."""
    below = [g for g in zl.ordinates if g < T]
    above = [g for g in zl.ordinates if g > T]
    if not below or not above:
        return T
    lo, hi = below[-1], above[0]
    ts = np.linspace(lo, hi, 65)[1:-1]
    zs = np.abs([hardy_Z(t, chi) for t in ts])
    return float(ts[int(np.argmax(zs))])


# -- zero files -----------------------------------------------------------

def write_zero_file(path: str | Path, zl: ZeroList) -> None:
    lines = [f"# character={zl.character_label} count={len(zl)} error={zl.refinement_error!r}"]
    lines += [repr(g) for g in zl.ordinates]
    Path(path).write_text("\n".join(lines) + "\n")


def read_zero_file(path: str | Path, expected_label: str | None = None) -> ZeroList:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ParseError("missing '# character=... count=... error=...' header", 1)
    try:
        fields = dict(item.split("=", 1) for item in text[0][1:].split())
        label, count, err = fields["character"], int(fields["count"]), float(fields["error"])
    except (ValueError, KeyError) as exc:
        raise ParseError(f"malformed header: {exc}", 1) from exc
    if expected_label is not None and label != expected_label:
        raise ParseError(f"file is for character {label}, expected {expected_label}", 1)
    ords: list[float] = []
    for lineno, line in enumerate(text[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            g = float(line)
        except ValueError as exc:
            raise ParseError(f"not a number: {line!r}", lineno) from exc
        if not math.isfinite(g) or g <= 0:
            raise ParseError(f"ordinate must be positive: {line!r}", lineno)
        if ords and g <= ords[-1]:
            raise ParseError("ordinates must be strictly increasing", lineno)
        ords.append(g)
    if len(ords) != count:
        raise ParseError(f"header announces {count} ordinates, found {len(ords)}", len(text))
    return ZeroList(label, tuple(ords), err, provenance="ingested")


def zero_file_io(path: str | Path, mode: str, zl: ZeroList | None = None,
                 expected_label: str | None = None) -> ZeroList:
    if mode == "write":
        if zl is None:
            raise ValueError("write mode needs a ZeroList")
        write_zero_file(path, zl)
        return zl
    if mode == "read":
        return read_zero_file(path, expected_label)
    raise ValueError(f"mode must be 'read' or 'write', got {mode!r}")


def cached_zeros(chi: DirichletCharacter, height: float, **kwargs) -> ZeroList:
    """find_zeros backed by the on-disk cache (keyed by character and height)."""
    path = cache_dir() / f"zeros_{chi.label}_{height!r}.txt"
    if path.exists():
        try:
            zl = read_zero_file(path, chi.label)
            return ZeroList(zl.character_label, zl.ordinates, zl.refinement_error)
        except ParseError:
            pass
    zl = find_zeros(chi, height, **kwargs)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_zero_file(path, zl)
    except OSError:
        pass
    return zl
