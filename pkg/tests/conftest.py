import pytest

from rache import paillier


@pytest.fixture(scope="session")
def keys():
    return paillier.keygen(paillier.TEST_KEY_BITS, paillier.insecure_seeded_rng(1234))


@pytest.fixture(scope="session")
def pk(keys):
    return keys[0]


@pytest.fixture(scope="session")
def sk(keys):
    return keys[1]


@pytest.fixture
def rng():
    return paillier.insecure_seeded_rng(99)
