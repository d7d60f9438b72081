import pytest
from hypothesis import HealthCheck, settings

from featuregrid import default_grid, enumerate_grid

settings.register_profile(
    "featuregrid",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("featuregrid")


@pytest.fixture(scope="session")
def default_grid_specs():
    """Full default-grid enumeration, shared across test modules."""
    return enumerate_grid(default_grid())
