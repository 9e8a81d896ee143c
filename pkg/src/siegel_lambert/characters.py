"""Dirichlet characters as explicit value tables.

Characters mod N are enumerated from the structure of (Z/NZ)^*: a cyclic
factor for every odd prime power and the factors <-1> x <5> for powers of 2.
The label ``"N.j"`` refers to the j-th entry of :func:`enumerate_characters`;
``j = 0`` is always the principal character.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sympy import factorint, primitive_root

from .errors import CharacterError

MAX_MODULUS = 10_000
LABEL_LOOKUP_LIMIT = 1_000
_SNAP = 1e-13


def _snap(x: float) -> float:
    half = round(2 * x) / 2
    return half + 0.0 if abs(x - half) < _SNAP else x


def _clean(z: complex) -> complex:
    """Make components that are numerically 0, +-1/2 or +-1 exact."""
    return complex(_snap(z.real), _snap(z.imag))


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod ``modulus`` given by its value table.

    ``values[m]`` is chi(m) for 0 <= m < modulus.
    """

    modulus: int
    values: tuple[complex, ...]
    label: str = ""
    primitive: bool = field(init=False)
    parity_epsilon: int = field(init=False)
    conductor: int = field(init=False)

    def __post_init__(self):
        N = self.modulus
        if len(self.values) != N:
            raise CharacterError(f"value table has length {len(self.values)}, expected {N}")
        for m, v in enumerate(self.values):
            if (math.gcd(m, N) == 1) != (abs(v) > 0.5):
                raise CharacterError(f"chi({m}) = {v} inconsistent with gcd({m},{N})")
        cond = _conductor(N, self.values)
        object.__setattr__(self, "conductor", cond)
        object.__setattr__(self, "primitive", cond == N)
        minus_one = self.values[(N - 1) % N] if N > 1 else 1.0
        object.__setattr__(self, "parity_epsilon", 0 if abs(minus_one - 1) < 1e-9 else 1)

    def __call__(self, m: int) -> complex:
        return self.values[m % self.modulus]

    @property
    def is_principal(self) -> bool:
        return all(abs(v) < 0.5 or abs(v - 1) < 1e-9 for v in self.values)

    @property
    def is_real(self) -> bool:
        return all(abs(v.imag) < 1e-12 for v in self.values)

    @property
    def order(self) -> int:
        for r in range(1, self.modulus + 2):
            if all(abs(v) < 0.5 or abs(v ** r - 1) < 1e-9 for v in self.values):
                return r
        raise CharacterError("character order not found")

    def conjugate(self) -> "DirichletCharacter":
        if self.is_real:
            return self
        label = f"conj({self.label})" if self.label else ""
        return _canonical(self.modulus, tuple(_clean(v.conjugate()) for v in self.values), label)

    def table(self, length: int, start: int = 1) -> np.ndarray:
        """chi(m) for m = start, ..., start + length - 1 as a complex array."""
        idx = np.arange(start, start + length) % self.modulus
        return np.asarray(self.values, dtype=complex)[idx]


def _conductor(N: int, values: tuple[complex, ...]) -> int:
    for d in sorted(_divisors(N)):
        if all(abs(values[a] - 1) < 1e-9
               for a in range(1, N) if math.gcd(a, N) == 1 and (a - 1) % d == 0):
            return d
    return N


def _divisors(n: int) -> list[int]:
    out = []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            if d * d != n:
                out.append(n // d)
    return out


def _components(N: int) -> list[tuple[int, int, int]]:
    """Cyclic factors (modulus, generator, order) of (Z/NZ)^* via CRT lifts."""
    comps = []
    for p, e in sorted(factorint(N).items()):
        q = p ** e
        rest = N // q

        def lift(g: int, q=q, rest=rest) -> int:
            # element that is g mod q and 1 mod N/q
            if rest == 1:
                return g % N
            return (g * rest * pow(rest, -1, q) + q * pow(q, -1, rest)) % N

        if p == 2:
            if e >= 2:
                comps.append((q, lift(q - 1), 2))
            if e >= 3:
                comps.append((q, lift(5), q // 4))
        else:
            comps.append((q, lift(primitive_root(q)), q - q // p))
    return comps


def _discrete_logs(N: int, comps) -> dict[int, tuple[int, ...]]:
    """Exponent vector of every unit a mod N with respect to the generators."""
    orders = [o for _, _, o in comps]
    gens = [g for _, g, _ in comps]
    logs = {}
    for exps in itertools.product(*(range(o) for o in orders)):
        a = 1
        for g, e in zip(gens, exps):
            a = a * pow(g, e, N) % N
        logs[a] = exps
    return logs


@lru_cache(maxsize=64)
def enumerate_characters(N: int) -> tuple[DirichletCharacter, ...]:
    """All phi(N) Dirichlet characters mod N; index 0 is principal."""
    if N < 1:
        raise CharacterError("modulus must be positive")
    if N > MAX_MODULUS:
        raise CharacterError(f"moduli above {MAX_MODULUS} are not supported")
    if N == 1:
        return (DirichletCharacter(1, (1 + 0j,), "1.0"),)
    comps = _components(N)
    orders = [o for _, _, o in comps]
    logs = _discrete_logs(N, comps)
    chars = []
    for j, ks in enumerate(itertools.product(*(range(o) for o in orders))):
        vals = [0j] * N
        for a, exps in logs.items():
            phase = sum(k * e / o for k, e, o in zip(ks, exps, orders))
            vals[a] = _clean(cmath.exp(2j * math.pi * phase))
        chars.append(DirichletCharacter(N, tuple(vals), f"{N}.{j}"))
    return tuple(chars)


def character_from_label(label: str) -> DirichletCharacter:
    """Parse ``"N.j"`` into the j-th character mod N."""
    try:
        n_str, j_str = label.strip().split(".")
        N, j = int(n_str), int(j_str)
    except ValueError as exc:
        raise CharacterError(f"bad character label {label!r}; expected 'N.j'") from exc
    chars = enumerate_characters(N)
    if not 0 <= j < len(chars):
        raise CharacterError(f"label {label!r}: index must be in 0..{len(chars) - 1}")
    return chars[j]


def principal_character(N: int = 1) -> DirichletCharacter:
    return enumerate_characters(N)[0]


def square_character(chi: DirichletCharacter) -> DirichletCharacter:
    """m -> chi(m)^2 on the same modulus; primitivity is recomputed.

    The result carries its enumeration label (``"5.1"`` squares to ``"5.2"``)
    whenever the modulus is small enough to enumerate cheaply.
    """
    label = f"({chi.label})^2" if chi.label else ""
    return _canonical(chi.modulus, tuple(_clean(v * v) for v in chi.values), label)


def _canonical(N: int, vals: tuple[complex, ...], fallback: str) -> DirichletCharacter:
    if N <= LABEL_LOOKUP_LIMIT:
        for cand in enumerate_characters(N):
            if all(abs(a - b) < 1e-9 for a, b in zip(cand.values, vals)):
                return cand
    return DirichletCharacter(N, vals, fallback)


def gauss_sum(chi: DirichletCharacter) -> complex:
    """g(chi) = sum_{v mod N} chi(v) exp(2 pi i v / N)."""
    N = chi.modulus
    v = np.arange(N)
    terms = np.asarray(chi.values, dtype=complex) * np.exp(2j * np.pi * v / N)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))
