"""Level-one cusp eigenforms of weight 18 and 22 and their L-functions.

The q-expansion is ``Delta * E_6`` (weight 18) or ``Delta * E_10`` (weight
22); both spaces are one-dimensional, so the product is the normalized
eigenform.  Power-series products are done by Kronecker substitution on
big integers.

``modular_L`` continues ``L(g x chi, s)`` with the incomplete-gamma
approximate functional equation.  The cut point is rotated into the
complex plane so that the terms carry the same ``exp(-pi |t| / 2)`` decay
as the gamma factor, which keeps double precision usable up to
``|Im s| = 60``.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import gmpy2
import numpy as np

from .._cache import cache_dir
from ..characters import DirichletCharacter
from ..errors import RootNumberError, TruncationError
from ..numerics import Estimate, abs_sum, csum
from ..special_functions import _upper_gamma, log_gamma

SUPPORTED_WEIGHTS = {18: (6, -504), 22: (10, -264)}
MAX_TERMS = 10 ** 6
_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class EigenformQExpansion:
    weight: int
    coefficients: tuple[int, ...]  # a(1), ..., a(M)

    def __post_init__(self):
        if self.coefficients and self.coefficients[0] != 1:
            raise ValueError("eigenform must be normalized with a(1) = 1")

    def __len__(self) -> int:
        return len(self.coefficients)

    def a(self, m: int) -> int:
        return self.coefficients[m - 1]

    def as_array(self, length: int | None = None) -> np.ndarray:
        coeffs = self.coefficients if length is None else self.coefficients[:length]
        return np.array([float(c) for c in coeffs])


# -- Kronecker-substitution power series ---------------------------------

def _slot_bits(a: list[int], b: list[int]) -> int:
    big = max(max(map(abs, a)), 1).bit_length() + max(max(map(abs, b)), 1).bit_length()
    bits = big + min(len(a), len(b)).bit_length() + 2
    return (bits + 7) // 8 * 8


def _pack(values: list[int], bits: int) -> gmpy2.mpz:
    nbytes = bits // 8
    half = 1 << (bits - 1)
    raw = b"".join((v + half).to_bytes(nbytes, "little") for v in values)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * len(values), "little")
    return gmpy2.mpz(int.from_bytes(raw, "little") - offset)


def _unpack(x: gmpy2.mpz, bits: int, count: int) -> list[int]:
    nbytes = bits // 8
    half = 1 << (bits - 1)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * count, "little")
    raw = (int(x) + offset).to_bytes(nbytes * count + 1, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half
            for i in range(count)]


def series_mul(a: list[int], b: list[int], length: int) -> list[int]:
    """First ``length`` coefficients of the product of two integer power series."""
    a, b = a[:length], b[:length]
    bits = _slot_bits(a, b)
    prod = _pack(a, bits) * _pack(b, bits)
    # the full product has len(a) + len(b) - 1 slots; keep only the low ones
    keep = min(length, len(a) + len(b) - 1)
    low = prod & ((gmpy2.mpz(1) << (bits * keep)) - 1)
    # a negative high part borrows from the kept slots; undo by reading the
    # product modulo 2^(bits*keep) as a signed number slot by slot
    out = _unpack_signed_low(low, bits, keep)
    return out + [0] * (length - keep)


def _unpack_signed_low(low: gmpy2.mpz, bits: int, count: int) -> list[int]:
    # low is prod mod 2^(bits*count); interpret as a signed packed vector
    total = 1 << (bits * count)
    value = int(low)
    if value >= total // 2:
        value -= total
    return _unpack(gmpy2.mpz(value), bits, count)


def _euler_cubed(length: int) -> list[int]:
    """prod (1 - q^n)^3 = sum_j (-1)^j (2j+1) q^{j(j+1)/2}."""
    out = [0] * length
    j = 0
    while j * (j + 1) // 2 < length:
        out[j * (j + 1) // 2] = (-1) ** j * (2 * j + 1)
        j += 1
    return out


def _sigma_table(power: int, length: int) -> list[int]:
    sig = [0] * length
    for d in range(1, length):
        dp = d ** power
        for m in range(d, length, d):
            sig[m] += dp
    return sig


def _compute_qexpansion(weight: int, M: int) -> list[int]:
    e_weight, const = SUPPORTED_WEIGHTS[weight]
    p = _euler_cubed(M)
    for _ in range(3):
        p = series_mul(p, p, M)  # ^6, ^12, ^24
    delta = [0] + p[:M]  # q * prod (1 - q^n)^24, indices 0..M
    sig = _sigma_table(e_weight - 1, M + 1)
    eis = [1] + [const * sig[m] for m in range(1, M + 1)]
    g = series_mul(delta, eis, M + 1)
    return g[1:M + 1]


def _cache_file(weight: int) -> Path:
    return cache_dir() / f"qexp_weight{weight}.txt"


def _read_cache(path: Path, weight: int, M: int) -> list[int] | None:
    try:
        with path.open() as fh:
            header = fh.readline().split()
            fields = dict(item.split("=") for item in header)
            if int(fields["weight"]) != weight or int(fields["count"]) < M:
                return None
            out = []
            for line in fh:
                m, val = line.split()
                if int(m) != len(out) + 1:
                    return None
                out.append(int(val))
                if len(out) == M:
                    break
    except (OSError, ValueError, KeyError):
        return None
    return out if len(out) == M else None


def _write_cache(path: Path, weight: int, coeffs: list[int]) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        with tmp.open("w") as fh:
            fh.write(f"weight={weight} count={len(coeffs)}\n")
            fh.writelines(f"{m} {c}\n" for m, c in enumerate(coeffs, start=1))
        tmp.replace(path)
    except OSError:
        pass  # the cache is an optimisation only


@lru_cache(maxsize=8)
def eigenform_qexpansion(weight: int, M: int) -> EigenformQExpansion:
    """Normalized level-one cusp eigenform of weight 18 or 22 to M terms."""
    if weight not in SUPPORTED_WEIGHTS:
        raise ValueError(f"weight must be one of {sorted(SUPPORTED_WEIGHTS)}, got {weight}")
    if not 1 <= M <= MAX_TERMS:
        raise TruncationError(f"q-expansion length must be in 1..{MAX_TERMS}, got {M}")
    path = _cache_file(weight)
    coeffs = _read_cache(path, weight, M)
    if coeffs is None:
        coeffs = _compute_qexpansion(weight, M)
        _write_cache(path, weight, coeffs)
    return EigenformQExpansion(weight, tuple(coeffs))


# -- L-function via the approximate functional equation -------------------

def _cut_angle(t: float, delta: float | None) -> float:
    if delta is None:
        delta = min(math.pi / 2, max(3.0 / max(abs(t), 1e-9), 0.08))
    return math.copysign(math.pi / 2 - delta, t) if t != 0 else 0.0


def _afe_side(coeffs: np.ndarray, x: np.ndarray, s: complex, cut: complex):
    """sum_n b_n x_n^{-s} Gamma(s, x_n * cut) with its abs-sum and tail bound."""
    z = x * cut
    g = _upper_gamma(s, z)
    terms = coeffs * np.exp(-s * np.log(x)) * g
    mags = np.abs(terms)
    return terms, mags


def _afe_terms_needed(s: complex, w: int, cut: complex, step: float) -> int:
    # Gamma(s, x) ~ x^{s-1} e^{-x}: stop once Re(x cut) exceeds the exponent budget
    re_cut = min(cut.real, (1.0 / cut).real)
    budget = 50.0 + 1.5 * max(abs(s), abs(w - s)) * 0.2 + w * math.log(10 + w) * 0.5
    return max(30, int(math.ceil(budget / (step * re_cut))) + 20)


@dataclass(frozen=True)
class _AFEPieces:
    lam_log_prefactor: complex
    first: complex
    second: complex
    scale: float
    tail: float


def _afe_pieces(g: EigenformQExpansion, s: complex, chi: DirichletCharacter | None,
                cut: complex) -> _AFEPieces:
    w = g.weight
    N = chi.modulus if chi is not None else 1
    step = 2 * math.pi / N
    count = _afe_terms_needed(s, w, cut, step)
    if count > len(g):
        raise TruncationError(
            f"approximate functional equation needs {count} coefficients, have {len(g)}")
    n = np.arange(1, count + 1)
    a = g.as_array(count)
    if chi is not None:
        tw = chi.table(count)
        b, bbar = a * tw, a * np.conj(tw)
    else:
        b = bbar = a.astype(complex)
    x = step * n
    t1, m1 = _afe_side(b, x, s, cut)
    t2, m2 = _afe_side(bbar, x, w - s, 1.0 / cut)
    scale = abs_sum(t1) + abs_sum(t2)
    tail = 4.0 * (m1[-5:].max() + m2[-5:].max())
    log_pref = s * math.log(N / (2 * math.pi)) + log_gamma(s)
    return _AFEPieces(log_pref, csum(t1), csum(t2), scale, tail)


def _direct_series(g: EigenformQExpansion, s: complex, chi: DirichletCharacter | None) -> complex:
    n = np.arange(1, len(g) + 1)
    terms = g.as_array() * np.exp(-s * np.log(n))
    if chi is not None:
        terms = terms * chi.table(len(g))
    return csum(terms)


CALIBRATION_RADIUS = 4.0
CALIBRATION_TERMS = 100_000


def _calibrate(g: EigenformQExpansion, chi: DirichletCharacter) -> tuple[complex, float]:
    if g.weight in SUPPORTED_WEIGHTS and len(g) < CALIBRATION_TERMS:
        return _calibrate_weight(g.weight, chi)
    return _calibrate_with(g, chi)


@lru_cache(maxsize=32)
def _calibrate_weight(weight: int, chi: DirichletCharacter) -> tuple[complex, float]:
    return _calibrate_with(eigenform_qexpansion(weight, CALIBRATION_TERMS), chi)


@lru_cache(maxsize=32)
def _calibrate_with(g: EigenformQExpansion, chi: DirichletCharacter) -> tuple[complex, float]:
    w = g.weight
    etas = []
    for t in (0.0, 4.0):
        s = complex(w / 2 + 2, t)
        # a large cut puts almost all of Lambda on the dual side, so the
        # division below does not amplify the series truncation error
        cut = CALIBRATION_RADIUS * cmath.exp(1j * _cut_angle(t, None))
        p = _afe_pieces(g, s, chi, cut)
        lam = np.exp(p.lam_log_prefactor) * _direct_series(g, s, chi)
        etas.append((lam - p.first) / p.second)
    eta = 0.5 * (etas[0] + etas[1])
    spread = abs(etas[0] - etas[1]) + abs(abs(eta) - 1.0)
    if spread > 1e-6:
        raise RootNumberError(
            f"root number calibration failed: candidates {etas[0]:.10g}, {etas[1]:.10g}")
    return complex(eta / abs(eta)), float(spread)


def twisted_root_number(g: EigenformQExpansion, chi: DirichletCharacter) -> complex:
    """Sign of Lambda(s) = eta * conj-twisted Lambda(w - s), solved from the series.

    Two points on Re s = w/2 + 2 are used; the direct series converges
    absolutely there.  The two solutions must agree and have modulus one.
    """
    return _calibrate(g, chi)[0]


def root_number_for(g: EigenformQExpansion, chi: DirichletCharacter | None) -> complex:
    if chi is None or chi.modulus == 1:
        return complex((-1) ** (g.weight // 2))
    return twisted_root_number(g, chi)


def modular_L(g: EigenformQExpansion, s: complex, twist: DirichletCharacter | None = None,
              *, cut_delta: float | None = None, cut_radius: float = 1.0) -> Estimate:
    """L(g x chi, s) from the smoothed approximate functional equation.

    ``twist`` must be primitive (or None / principal mod 1).  ``cut_delta``
    and ``cut_radius`` move the splitting point; the result does not depend
    on them beyond the reported error.
    """
    s = complex(s)
    w = g.weight
    if twist is not None and twist.modulus == 1:
        twist = None
    if twist is not None and not twist.primitive:
        raise ValueError("twisting character must be primitive")
    eta = root_number_for(g, twist)
    eta_err = _calibrate(g, twist)[1] if twist is not None else 0.0
    cut = cut_radius * cmath.exp(1j * _cut_angle(s.imag, cut_delta))
    p = _afe_pieces(g, s, twist, cut)
    lam = p.first + eta * p.second
    inv = np.exp(-p.lam_log_prefactor)
    value = lam * inv
    phase_err = 1.0 + abs(s) * math.log(len(g) + 1.0)
    bound = abs(inv) * (p.tail + 8 * _EPS * phase_err * p.scale * 50 + eta_err * abs(p.second))
    return Estimate(complex(value), float(bound))
