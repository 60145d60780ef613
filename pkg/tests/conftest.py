import pytest

from expoverlap.simulation import SimConfig, compare_to_reference, run_study


@pytest.fixture(scope="session")
def default_table():
    """The full default-grid study; shared because it takes a couple seconds."""
    return run_study(SimConfig())


@pytest.fixture(scope="session")
def default_comparison(default_table):
    return compare_to_reference(default_table)
