import math

import numpy as np
import pytest

from stableldp.errors import DomainError
from stableldp.models import CadlagPath, RateValue, Subdivision
from stableldp.services.rate_functions import (
    describe,
    dyadic_rate,
    finite_dim_rate_bridge,
    finite_dim_rate_excursion,
    functional_rate,
    gamma_from_slope,
    rate_bridge,
    rate_excursion,
    theory_slope,
)
from stableldp.services.variational import analytic_maximizer
from tests.conftest import indicator, linear_path


# ---------------------------------------------------------------------------
# I_ex e I_br,a
# ---------------------------------------------------------------------------

def test_rate_excursion_one_minus_t(params43, one_minus_t):
    rate = rate_excursion(params43, one_minus_t)
    assert rate.is_finite
    assert rate.value == pytest.approx(27.0 / 256.0, rel=1e-13)


def test_rate_excursion_zero_path(params43):
    zero = CadlagPath.step([0.0, 1.0], [0.0, 0.0])
    assert rate_excursion(params43, zero).value == 0.0


@pytest.mark.parametrize("path, reason", [
    (indicator(0.3, 0.6), "singular-down-part"),
    (CadlagPath.linear([0.0, 0.5, 1.0], [0.0, -1.0, 0.0]), "negative-values"),
    (CadlagPath.linear([0.0, 1.0], [1.0, 1.0]), "endpoint-mismatch"),
])
def test_rate_excursion_outside_domain(params43, path, reason):
    rate = rate_excursion(params43, path)
    assert not rate.is_finite
    assert rate.value == math.inf
    assert rate.reason == reason


def test_rate_excursion_non_finite_values(params43):
    path = CadlagPath.linear([0.0, 0.5, 1.0], [0.0, np.inf, 0.0])
    assert rate_excursion(params43, path).reason == "unbounded-variation-proxy"


def test_rate_excursion_area_maximizer_on_boundary(params43):
    n = 2048
    values = analytic_maximizer(params43, "area", n)
    path = CadlagPath.linear(np.linspace(0.0, 1.0, n + 1), values)
    assert rate_excursion(params43, path).value == pytest.approx(params43.c_alpha, rel=1e-3)


@pytest.mark.parametrize("lam", [0.5, 2.5])
def test_rate_excursion_homogeneity(params43, lam):
    path = linear_path(lambda t: np.sin(np.pi * t) + (1.0 - t), 64)
    base = rate_excursion(params43, path).value
    scaled = CadlagPath.linear(path.times, lam * path.right)
    assert rate_excursion(params43, scaled).value == pytest.approx(lam ** params43.alpha_prime * base, rel=1e-12)


def test_rate_bridge_quadratic(params43):
    path = linear_path(lambda t: -t * t, 2048)
    rate = rate_bridge(params43, path, -1.0)
    assert rate.value == pytest.approx(297.0 / 1280.0, rel=1e-4)


def test_rate_bridge_allows_negative_values(params43):
    path = CadlagPath.linear([0.0, 1.0], [0.0, -1.0])
    # discesa lineare a velocita' costante: il minimo costo per arrivare in -1
    assert rate_bridge(params43, path, -1.0).value == pytest.approx(0.0, abs=1e-15)


def test_rate_bridge_endpoint_and_jumps(params43, one_minus_t):
    assert rate_bridge(params43, one_minus_t, 0.5).reason == "endpoint-mismatch"
    assert rate_bridge(params43, indicator(0.3, 0.6), 0.0).reason == "singular-down-part"
    assert rate_bridge(params43, one_minus_t, 0.0).value == pytest.approx(params43.c_alpha, rel=1e-13)


# ---------------------------------------------------------------------------
# Tassi finito-dimensionali
# ---------------------------------------------------------------------------

def test_finite_dim_excursion_single_point(params43):
    rate = finite_dim_rate_excursion(params43, (0.5,), [1.0])
    assert rate.value == pytest.approx(27.0 / 32.0, rel=1e-13)


def test_finite_dim_excursion_only_final_drop(params43):
    rate = finite_dim_rate_excursion(params43, Subdivision((0.3, 0.6)), [0.2, 0.4])
    assert rate.value == pytest.approx(0.4 * params43.c_alpha, rel=1e-12)


def test_finite_dim_excursion_negative_value(params43):
    rate = finite_dim_rate_excursion(params43, (0.3, 0.6), [0.2, -0.1])
    assert rate.reason == "negative-values"


@pytest.mark.parametrize("sigma, values, a, expected", [
    ((0.5,), [0.5], 1.0, 0.0),
    ((0.5,), [-0.5], -1.0, 0.0),
    ((0.5,), [1.0], 0.0, 27.0 / 32.0),
])
def test_finite_dim_bridge(params43, sigma, values, a, expected):
    assert finite_dim_rate_bridge(params43, sigma, values, a).value == pytest.approx(expected, abs=1e-13)


def test_finite_dim_length_mismatch(params43):
    with pytest.raises(DomainError):
        finite_dim_rate_excursion(params43, (0.3, 0.6), [1.0])


@pytest.mark.parametrize("times", [(), (0.0, 0.5), (0.6, 0.3), (0.5, 1.0)])
def test_subdivision_validation(times):
    with pytest.raises(DomainError):
        Subdivision(times)


def test_finite_dim_refinement_monotone(params43):
    path = linear_path(lambda t: np.sin(np.pi * t) + (1.0 - t), 256)
    coarse = (0.25, 0.5, 0.75)
    fine = (0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875)
    j_coarse = finite_dim_rate_excursion(params43, coarse, path.value(np.array(coarse))).value
    j_fine = finite_dim_rate_excursion(params43, fine, path.value(np.array(fine))).value
    assert j_fine >= j_coarse - 1e-15
    assert j_fine <= rate_excursion(params43, path).value + 1e-12


def test_finite_dim_dominated_by_rate(params43):
    rng = np.random.default_rng(9)
    path = linear_path(lambda t: 2.0 * (1.0 - t) ** 1.5 + 0.3 * np.sin(3 * np.pi * t) ** 2, 128)
    full = rate_excursion(params43, path).value
    for _ in range(25):
        sigma = np.sort(rng.uniform(0.01, 0.99, 5))
        assert finite_dim_rate_excursion(params43, tuple(sigma), path.value(sigma)).value <= full + 1e-12


# ---------------------------------------------------------------------------
# Approssimazione diadica
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 8, 64, 2048])
def test_dyadic_linear_path_exact(params43, one_minus_t, n):
    assert dyadic_rate(params43, one_minus_t, n).value == pytest.approx(params43.c_alpha, rel=1e-12)


def test_dyadic_nondecreasing_path_is_zero(params43):
    path = CadlagPath.linear([0.0, 1.0], [0.0, 1.0])
    assert dyadic_rate(params43, path, 16).value == 0.0


def test_dyadic_converges_on_area_maximizer(params43):
    n = 2 ** 14
    path = CadlagPath.linear(np.linspace(0.0, 1.0, n + 1), analytic_maximizer(params43, "area", n))
    values = [dyadic_rate(params43, path, 2 ** k).value for k in range(3, 12)]
    assert all(b >= a - 1e-14 for a, b in zip(values, values[1:]))
    assert abs(values[-1] - params43.c_alpha) < 1e-3


def test_dyadic_down_jump_diverges(params43):
    path = indicator(0.3, 0.6)
    values = [dyadic_rate(params43, path, n).value for n in (8, 16, 32)]
    for n, value in zip((8, 16, 32), values):
        assert value == pytest.approx(params43.c_alpha * n ** (params43.alpha_prime - 1.0), rel=1e-12)


@pytest.mark.parametrize("n", [0, 2.5, -4])
def test_dyadic_rejects_bad_n(params43, one_minus_t, n):
    with pytest.raises(DomainError):
        dyadic_rate(params43, one_minus_t, n)


# ---------------------------------------------------------------------------
# Tasso del funzionale e pendenze teoriche
# ---------------------------------------------------------------------------

def test_functional_rate_area_constant(params43):
    gamma = (7.0 / 3.0) ** (-0.75)
    assert functional_rate(params43, 1.0, gamma) == pytest.approx(343.0 / 256.0, rel=1e-12)


def test_functional_rate_domain(params43):
    with pytest.raises(DomainError):
        functional_rate(params43, 1.0, 0.0)
    with pytest.raises(DomainError):
        functional_rate(params43, -1.0, 1.0)


def test_theory_slopes(params43):
    assert theory_slope(params43, "area") == pytest.approx(343.0 / 256.0, rel=1e-12)
    assert theory_slope(params43, "sup") == pytest.approx(27.0 / 256.0, rel=1e-12)
    assert theory_slope(params43, "sup", "bridge") == pytest.approx(27.0 / 256.0, rel=1e-12)
    with pytest.raises(DomainError):
        theory_slope(params43, "area", "bridge")


@pytest.mark.parametrize("fixture", ["params43", "params32"])
def test_theory_slope_ordering(fixture, request):
    params = request.getfixturevalue(fixture)
    assert theory_slope(params, "area") > theory_slope(params, "sup")
    assert theory_slope(params, "sup", "bridge") == pytest.approx(theory_slope(params, "sup"), rel=1e-12)


def test_gamma_from_slope_inverts_functional_rate(params32):
    gamma = 0.8
    slope = functional_rate(params32, 1.0, gamma)
    assert gamma_from_slope(params32, slope) == pytest.approx(gamma, rel=1e-12)


def test_describe():
    assert describe(RateValue.finite(0.5)) == "0.5"
    assert describe(RateValue.infinite("negative-values")) == "inf (negative-values)"


def test_rate_value_consistency():
    with pytest.raises(DomainError):
        RateValue(1.0, "negative-values")
    with pytest.raises(DomainError):
        RateValue(math.inf, "none")
    with pytest.raises(DomainError):
        RateValue(math.inf, "made-up")
