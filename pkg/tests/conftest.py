import os
import tempfile

import pytest

# The cache location must be fixed before any q-expansion or zero list is built.
_CACHE = tempfile.mkdtemp(prefix="siegel_lambert_test_cache_")
os.environ.setdefault("SIEGEL_LAMBERT_CACHE", _CACHE)

from siegel_lambert.characters import character_from_label, principal_character  # noqa: E402
from siegel_lambert.providers import sk_pair_model  # noqa: E402
from siegel_lambert.zeros import find_zeros  # noqa: E402


@pytest.fixture(scope="session")
def trivial():
    return principal_character(1)


@pytest.fixture(scope="session")
def quartic5():
    """Order-4 character mod 5 with chi(2) = i."""
    return character_from_label("5.1")


@pytest.fixture(scope="session")
def quadratic5():
    return character_from_label("5.2")


@pytest.fixture(scope="session")
def sk10():
    return sk_pair_model(10)


@pytest.fixture(scope="session")
def zeta_zeros_50(trivial):
    return find_zeros(trivial, 50.0)


@pytest.fixture(scope="session")
def quadratic_zeros_50(quadratic5):
    return find_zeros(quadratic5, 50.0)


@pytest.fixture(scope="session")
def sk10_long():
    """Enough terms for direct summation two units right of the weight."""
    return sk_pair_model(10, 100_000)
