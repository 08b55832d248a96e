import pytest

from logforms import build_factor_table


@pytest.fixture(scope="session")
def table_small():
    """Factor table covering every base used by the small-box tests."""
    return build_factor_table(300)


@pytest.fixture(scope="session")
def table_grid():
    """Factor table covering the lemma grid (bases up to 10**4)."""
    return build_factor_table(10_000)
