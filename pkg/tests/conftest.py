import numpy as np
import pytest

from stableldp import create_app
from stableldp.models import CadlagPath
from stableldp.services.stable_math import make_params


@pytest.fixture
def app():
    app = create_app()
    app.config.update(TESTING=True)
    return app


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture(scope="session")
def params43():
    return make_params(4.0 / 3.0)


@pytest.fixture(scope="session")
def params32():
    return make_params(1.5)


@pytest.fixture
def one_minus_t():
    """f(t) = 1 - t, con il salto iniziale da f(0-) = 0."""
    return CadlagPath.linear([0.0, 1.0], [1.0, 0.0])


def linear_path(fn, n):
    grid = np.linspace(0.0, 1.0, n + 1)
    return CadlagPath.linear(grid, fn(grid))


def indicator(a, b, include_one=False):
    """Indicatrice di [a, b) come cammino a gradini (b = 1 con include_one chiude in 1)."""
    if include_one or b >= 1.0:
        times = [0.0, a, 1.0] if a > 0 else [0.0, 1.0]
        values = [0.0, 1.0, 1.0] if a > 0 else [1.0, 1.0]
    else:
        times = [0.0, a, b, 1.0] if a > 0 else [0.0, b, 1.0]
        values = [0.0, 1.0, 0.0, 0.0] if a > 0 else [1.0, 0.0, 0.0]
    return CadlagPath.step(times, values)
