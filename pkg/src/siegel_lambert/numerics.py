"""Small numeric helpers: exactly rounded summation and value/error pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class Estimate:
    """A computed value together with an absolute error bound."""

    value: complex
    abs_error_bound: float = 0.0

    def __post_init__(self):
        if not (self.abs_error_bound >= 0.0 and math.isfinite(self.abs_error_bound)):
            raise ValueError(f"invalid error bound {self.abs_error_bound!r}")

    def __complex__(self) -> complex:
        return complex(self.value)

    @property
    def real(self) -> float:
        return complex(self.value).real

    @property
    def imag(self) -> float:
        return complex(self.value).imag


def csum(values: Iterable[complex] | np.ndarray) -> complex:
    """Sum complex values with ``math.fsum`` on each component.

    The result is the correctly rounded sum of the inputs, independent of
    their order, which keeps reductions deterministic.
    """
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                     dtype=complex).ravel()
    if arr.size == 0:
        return 0j
    return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))


def abs_sum(values: np.ndarray) -> float:
    return math.fsum(np.abs(np.asarray(values, dtype=complex)).tolist())
