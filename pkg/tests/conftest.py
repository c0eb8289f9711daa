import numpy as np
import pytest
from hypothesis import settings

from planar_suita.geometry import Circle, DomainSpec, build_domain

settings.register_profile("default", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("default")


@pytest.fixture(scope="session")
def disk():
    return build_domain(DomainSpec.disk())


@pytest.fixture(scope="session")
def annulus2():
    return build_domain(DomainSpec.annulus(2.0))


@pytest.fixture(scope="session")
def annulus4():
    return build_domain(DomainSpec.annulus(4.0))


@pytest.fixture(scope="session")
def three():
    """Unit disk minus two disks of radius 0.1 at +-0.5."""
    return build_domain(DomainSpec.circular(Circle(0j, 1.0), [Circle(0.5 + 0j, 0.1), Circle(-0.5 + 0j, 0.1)]))


@pytest.fixture(scope="session")
def three_offset():
    """Less symmetric 3-connected domain."""
    return build_domain(DomainSpec.circular(Circle(0.1 + 0j, 1.2), [Circle(0.55 + 0.2j, 0.15), Circle(-0.4 - 0.3j, 0.2)]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
