import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "solitaire",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("solitaire")


@pytest.fixture(scope="session")
def traced_ten_million():
    """One seeded 1e7-step instrumented run shared by the heavier stats tests."""
    from solitaire_lab import engine

    return engine.traced_run(987_654_321, 10_000_000)
