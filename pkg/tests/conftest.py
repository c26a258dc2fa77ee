import pytest

from rlws import validate_normalize


@pytest.fixture(scope="session")
def co313():
    return validate_normalize(3, 1, 3)


@pytest.fixture(scope="session")
def co110():
    return validate_normalize(1, 1, 0)


@pytest.fixture(scope="session")
def co1m11():
    return validate_normalize(1, -1, 1)


@pytest.fixture(scope="session")
def co1m21():
    return validate_normalize(1, -2, 1)


def random_coefficients(rng):
    """Valid triple with a > 0, b != 0, c >= 0 and a nonzero discriminant."""
    while True:
        a = rng.uniform(0.5, 4.0)
        b = rng.uniform(0.3, 3.0) * (1 if rng.random() < 0.5 else -1)
        c = rng.uniform(0.0, 3.0)
        if abs(a * a + 4 * b * c) > 1e-3:
            return validate_normalize(a, b, c)
