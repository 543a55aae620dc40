import pytest
from hypothesis import settings

from hilbcusp.field import make_field
from hilbcusp.ideals import Ideal, factor_rational_prime

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def K5():
    return make_field(5)


@pytest.fixture(scope="session")
def QQ():
    return make_field("rational")


@pytest.fixture(scope="session")
def p11(K5):
    return factor_rational_prime(K5, 11).primes[0]


@pytest.fixture(scope="session")
def inert13(K5):
    return Ideal.generated_by(K5, [13])
