import math

import numpy as np
import pytest
from scipy import integrate

from stableldp.errors import CoverageError, DomainError
from stableldp.models import QuadratureSpec
from stableldp.services.stable_math import (
    bridge_marginal_density,
    build_density_table,
    density,
    density_at_zero,
    density_band,
    excursion_transition_density,
    hitting_density,
    killed_transition,
    laplace_transform,
    log_density,
    make_params,
    tabulate_density,
)


def _saddle_log_left(params, x):
    """log p_1(-x) dal punto di sella, con il prefattore gaussiano."""
    alpha = params.alpha
    lam0 = (x / alpha) ** (1.0 / (alpha - 1.0))
    curvature = alpha * (alpha - 1.0) * lam0 ** (alpha - 2.0)
    return -params.c_alpha * x ** params.alpha_prime - 0.5 * math.log(2.0 * math.pi * curvature)


# ---------------------------------------------------------------------------
# make_params
# ---------------------------------------------------------------------------

def test_params_four_thirds(params43):
    assert params43.alpha_prime == pytest.approx(4.0, rel=1e-14)
    assert params43.c_alpha == pytest.approx(27.0 / 256.0, rel=1e-14)
    assert params43.C_alpha == pytest.approx(0.24617, rel=1e-4)


def test_params_three_halves(params32):
    assert params32.alpha_prime == pytest.approx(3.0, rel=1e-14)
    assert params32.c_alpha == pytest.approx(4.0 / 27.0, rel=1e-14)


@pytest.mark.parametrize("alpha", [1.1, 4.0 / 3.0, 1.5, 1.9])
def test_params_conjugate_relation(alpha):
    p = make_params(alpha)
    assert 1.0 / p.alpha + 1.0 / p.alpha_prime == pytest.approx(1.0, abs=1e-14)
    assert p.c_alpha > 0 and p.C_alpha > 0


@pytest.mark.parametrize("alpha", [1.0, 2.0, 2.5, 0.5, "abc"])
def test_params_rejects_outside_open_interval(alpha):
    with pytest.raises(DomainError):
        make_params(alpha)


def test_domain_error_mentions_interval():
    with pytest.raises(DomainError, match=r"\(1,2\)"):
        make_params(2.5)


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("fixture", ["params43", "params32"])
def test_density_normalized(fixture, request):
    params = request.getfixturevalue(fixture)
    pieces = [(-8.0, -3.0), (-3.0, 0.0), (0.0, 5.0), (5.0, 50.0), (50.0, 5000.0)]
    total = sum(
        integrate.quad(lambda x: density(params, 1.0, x), a, b, epsabs=1e-11, epsrel=1e-10, limit=200)[0]
        for a, b in pieces
    )
    # oltre 5000 la massa e' C_alpha x^(-alpha) a meno di 1e-6
    total += params.C_alpha * 5000.0 ** (-params.alpha)
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("fixture", ["params43", "params32"])
@pytest.mark.parametrize("x", [1e-4, -1e-4, 1e-6, -1e-6, 1e-9, -1e-9, 3e-11])
def test_density_near_zero_matches_closed_form(fixture, x, request):
    params = request.getfixturevalue(fixture)
    assert density(params, 1.0, x) == pytest.approx(density_at_zero(params), rel=1e-3)


def test_density_at_zero_value(params43):
    assert density_at_zero(params43) == pytest.approx(0.20686, abs=1e-5)


def test_density_scaling_identity(params43):
    t, x = 0.3, 0.7
    scale = t ** (-1.0 / params43.alpha)
    assert density(params43, t, x) == pytest.approx(scale * density(params43, 1.0, scale * x), rel=1e-13)


def test_density_rejects_nonpositive_time(params43):
    with pytest.raises(DomainError):
        density(params43, 0.0, 1.0)
    with pytest.raises(DomainError):
        log_density(params43, -1.0, 1.0)


@pytest.mark.parametrize("fixture", ["params43", "params32"])
@pytest.mark.parametrize("lam", [0.1, 0.5, 1.0, 2.0, 3.0])
def test_laplace_transform(fixture, lam, request):
    params = request.getfixturevalue(fixture)
    assert laplace_transform(params, lam) == pytest.approx(math.exp(lam ** params.alpha), rel=1e-4)


# la densita' di Levy e' x^(-1-alpha) / Gamma(-alpha) = alpha C_alpha x^(-1-alpha)
@pytest.mark.parametrize("fixture", ["params43", "params32"])
def test_right_tail_constant(fixture, request):
    params = request.getfixturevalue(fixture)
    x = 50.0
    assert x ** (params.alpha + 1.0) * density(params, 1.0, x) == pytest.approx(params.alpha * params.C_alpha, rel=0.05)


@pytest.mark.parametrize("fixture", ["params43", "params32"])
def test_tail_probability_constant(fixture, request):
    params = request.getfixturevalue(fixture)
    law = tabulate_density(params)
    x = 50.0
    assert (1.0 - law.cdf1(x)) * x ** params.alpha == pytest.approx(params.C_alpha, rel=0.05)


def test_right_tail_constant_values(params43, params32):
    assert 50.0 ** (params43.alpha + 1.0) * density(params43, 1.0, 50.0) == pytest.approx(0.3252, abs=1e-3)
    assert params32.alpha * params32.C_alpha == pytest.approx(0.75 / math.sqrt(math.pi), rel=1e-12)


@pytest.mark.parametrize("fixture, x", [("params32", 4.0), ("params43", 8.0)])
def test_left_tail_rate(fixture, x, request):
    params = request.getfixturevalue(fixture)
    ratio = -log_density(params, 1.0, -x) / x ** params.alpha_prime
    assert ratio == pytest.approx(params.c_alpha, rel=0.05)


@pytest.mark.parametrize("fixture", ["params43", "params32"])
def test_left_tail_matches_saddle_point(fixture, request):
    params = request.getfixturevalue(fixture)
    assert log_density(params, 1.0, -4.0) == pytest.approx(_saddle_log_left(params, 4.0), abs=0.05)


@pytest.mark.parametrize("fixture, inside, outside", [("params43", 6.5, 6.75), ("params32", 10.5, 11.5)])
def test_left_tail_switch_is_continuous(fixture, inside, outside, request):
    params = request.getfixturevalue(fixture)
    assert log_density(params, 1.0, -inside) == pytest.approx(_saddle_log_left(params, inside), abs=0.02)
    assert log_density(params, 1.0, -outside) == pytest.approx(_saddle_log_left(params, outside), rel=1e-12)


def test_deep_left_tail_underflows_cleanly(params43):
    assert density(params43, 1.0, -240.73) == 0.0
    assert log_density(params43, 1.0, -240.73) == pytest.approx(_saddle_log_left(params43, 240.73), rel=1e-12)
    assert density(params43, 1.0, -40.0) == 0.0


@pytest.mark.parametrize("fixture", ["params43", "params32"])
@pytest.mark.parametrize("x", [3.0, 5.0, 10.0])
def test_density_is_skewed_right(fixture, x, request):
    params = request.getfixturevalue(fixture)
    assert density(params, 1.0, x) > density(params, 1.0, -x)


def test_log_density_consistent_with_density(params43):
    for x in (-2.0, 0.3, 5.0):
        assert math.exp(log_density(params43, 0.5, x)) == pytest.approx(density(params43, 0.5, x), rel=1e-12)


# ---------------------------------------------------------------------------
# Primo passaggio e semigruppo ucciso
# ---------------------------------------------------------------------------

def test_hitting_density_identity(params43):
    x, t = 0.8, 0.4
    assert hitting_density(params43, x, t) == pytest.approx((x / t) * density(params43, t, -x), rel=1e-13)


@pytest.mark.parametrize("fixture", ["params43", "params32"])
def test_hitting_density_normalized(fixture, request):
    params = request.getfixturevalue(fixture)

    # t = z^(-alpha): q_1(t) dt = alpha p_1(-z) dz
    def integrand(z):
        return params.alpha * z ** (-params.alpha - 1.0) * hitting_density(params, 1.0, z ** (-params.alpha))

    pieces = [(0.0, 1.0), (1.0, 3.0), (3.0, 12.0)]
    total = sum(integrate.quad(integrand, a, b, epsabs=1e-11, epsrel=1e-10, limit=200)[0] for a, b in pieces)
    assert total == pytest.approx(1.0, abs=1e-4)


def test_hitting_density_scaling(params43):
    c = 2.0 ** (-params43.alpha)
    assert hitting_density(params43, 2.0, 1.0) == pytest.approx(c * hitting_density(params43, 1.0, c), rel=1e-6)


def test_hitting_density_rejects_nonpositive(params43):
    with pytest.raises(DomainError):
        hitting_density(params43, 0.0, 1.0)


def test_killed_transition_below_free_density(params43):
    law = tabulate_density(params43)
    for y in (0.2, 1.0, 2.5):
        kt = killed_transition(params43, 0.25, 1.0, y, density_fn=law.pdf)
        assert 0.0 <= kt <= law.pdf(0.25, y - 1.0) + 1e-12


def test_killed_transition_is_sub_probability(params43):
    law = tabulate_density(params43)
    pieces = [(0.0, 1.0), (1.0, 3.0), (3.0, 10.0), (10.0, 200.0)]
    mass = sum(
        integrate.quad(lambda y: killed_transition(params43, 0.5, 1.0, y, density_fn=law.pdf), a, b,
                       epsabs=1e-8, limit=100)[0]
        for a, b in pieces
    )
    assert 0.0 < mass <= 1.0


@pytest.mark.parametrize("y", [4.0, 5.0, 6.0])
def test_killed_transition_far_from_zero(params43, y):
    # da x = 5 in t = 0.1 lo zero non e' raggiungibile: il nucleo ucciso e' quello libero
    kt = killed_transition(params43, 0.1, 5.0, y)
    assert kt / density(params43, 0.1, y - 5.0) == pytest.approx(1.0, abs=1e-3)


def test_killed_transition_domain(params43):
    with pytest.raises(DomainError):
        killed_transition(params43, 0.25, -1.0, 1.0)


# ---------------------------------------------------------------------------
# Tabelle
# ---------------------------------------------------------------------------

def test_density_table_covered_range(params43):
    table = build_density_table(params43, 1.0, (-10.0, 600.0), 1401)
    assert table.x.size == 1401
    assert np.all(np.diff(table.cdf) >= 0)
    assert abs(1.0 - table.total_mass) <= 1e-4


def test_density_table_grid_is_dense_near_mode(params43):
    table = build_density_table(params43, 1.0, (-10.0, 600.0), 1401)
    assert table.x[0] == -10.0 and table.x[-1] == 600.0
    steps = np.diff(table.x)
    assert np.all(steps > 0)
    assert steps[np.searchsorted(table.x, 0.0)] < 0.02 < steps[-1]


def test_density_table_short_range_raises(params43):
    with pytest.raises(CoverageError) as info:
        build_density_table(params43, 1.0, (-10.0, 200.0), 421)
    assert info.value.uncovered > 1e-4


def test_density_table_partial_coverage_warns(params43, caplog):
    table = build_density_table(params43, 1.0, (-6.0, 60.0), 133, require_coverage=False)
    assert table.total_mass < 1.0
    assert "massa fuori" in caplog.text


def test_density_table_rejects_empty_range(params43):
    with pytest.raises(DomainError):
        build_density_table(params43, 1.0, (1.0, 1.0), 10)


def test_density_band_is_positive(params43):
    lo, hi = density_band(params43, np.linspace(0.0, 30.0, 31))
    assert 0.0 < lo <= hi


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_subdivisions=0)


# ---------------------------------------------------------------------------
# Densita' tabulata
# ---------------------------------------------------------------------------

def test_tabulated_matches_exact(params43):
    law = tabulate_density(params43)
    for x in (-3.0, -0.5, 0.0, 0.7, 4.0, 35.0, 250.0):
        assert law.pdf1(x) == pytest.approx(density(params43, 1.0, x), rel=1e-5)


def test_tabulated_quantile_inverts_cdf(params43):
    law = tabulate_density(params43)
    for u in (0.01, 0.25, 0.5, 0.9, 0.999):
        assert law.cdf1(law.quantile1(u)) == pytest.approx(u, abs=1e-6)


def test_tabulated_is_cached(params43):
    assert tabulate_density(params43) is tabulate_density(params43)


def test_table_median_matches_tabulated(params43):
    table = build_density_table(params43, 1.0, (-10.0, 600.0), 1401)
    law = tabulate_density(params43)
    assert table.median == pytest.approx(law.quantile1(0.5), abs=1e-2)


def test_bridge_marginal_integrates_to_one(params43):
    xs = np.linspace(-12.0, 40.0, 20001)
    pdf = bridge_marginal_density(params43, 0.0, 0.5, xs)
    assert integrate.trapezoid(pdf, xs) == pytest.approx(1.0, abs=2e-3)


@pytest.mark.slow
def test_excursion_transition_integrates_to_one(params43):
    ys = np.linspace(1e-3, 8.0, 321)
    pdf = excursion_transition_density(params43, 1.0, 0.25, 0.25, ys)
    assert np.all(pdf >= 0)
    assert integrate.trapezoid(pdf, ys) == pytest.approx(1.0, abs=2e-2)
