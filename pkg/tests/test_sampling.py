import math

import numpy as np
import pytest
from scipy import integrate, stats

from stableldp.errors import DomainError
from stableldp.models import PathSkeleton, RngStream, SamplerConfig
from stableldp.services.ldp_harness import simulate_functionals
from stableldp.services.sampling import (
    area_values,
    functional_area,
    functional_sup,
    map_blocks,
    sample_bridge,
    sample_bridges,
    sample_excursion,
    sample_excursions,
    sample_free_paths,
    stable_increment,
    stable_increments,
    sup_values,
    vervaat,
)
from stableldp.services.stable_math import bridge_marginal_density, tabulate_density


# ---------------------------------------------------------------------------
# Incrementi
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("fixture", ["params43", "params32"])
def test_increment_laplace_transform(fixture, request):
    params = request.getfixturevalue(fixture)
    draws = stable_increments(params, 1.0, 200_000, np.random.default_rng(1))
    assert np.mean(np.exp(-draws)) == pytest.approx(math.e, abs=0.03)


def test_increment_median_matches_density(params43):
    draws = stable_increments(params43, 1.0, 100_000, np.random.default_rng(2))
    median = tabulate_density(params43).quantile1(0.5)
    assert np.median(draws) == pytest.approx(median, abs=0.02)


def test_increment_rejects_nonpositive_time(params43):
    with pytest.raises(DomainError):
        stable_increments(params43, 0.0, 10, np.random.default_rng(0))


def test_single_increment_is_deterministic(params43):
    assert stable_increment(params43, 0.5, RngStream(3)) == stable_increment(params43, 0.5, RngStream(3))


def test_rng_stream_spawn_is_reproducible():
    a = [s.generator.random() for s in RngStream(5).spawn(3)]
    b = [s.generator.random() for s in RngStream(5).spawn(3)]
    assert a == b
    assert len(set(a)) == 3
    with pytest.raises(DomainError):
        RngStream(-1)


# ---------------------------------------------------------------------------
# Vervaat e funzionali
# ---------------------------------------------------------------------------

def test_vervaat_example():
    np.testing.assert_allclose(vervaat([0.0, 1.0, -1.0, 0.5, 0.0]), [[0.0, 1.5, 1.0, 2.0, 0.0]])


def test_vervaat_ties_use_first_minimum():
    np.testing.assert_allclose(vervaat([0.0, -1.0, 2.0, -1.0, 0.0]), [[0.0, 3.0, 0.0, 1.0, 0.0]])


def test_area_and_sup_of_linear_skeleton():
    n = 1024
    values = 1.0 - np.linspace(0.0, 1.0, n + 1)
    skeleton = PathSkeleton(values, "excursion", 4.0 / 3.0)
    assert abs(functional_area(skeleton) - 0.5) <= 1.0 / n
    assert functional_sup(skeleton) == 1.0
    np.testing.assert_allclose(area_values(np.vstack((values, 2 * values))), [functional_area(skeleton), 2 * functional_area(skeleton)])
    np.testing.assert_allclose(sup_values(np.vstack((values, 2 * values))), [1.0, 2.0])


# ---------------------------------------------------------------------------
# Ponti ed escursioni
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("a", [0.0, -1.0, 1.0])
def test_bridge_endpoint_is_exact(params43, a):
    batch = sample_bridges(params43, a, 16, 200, seed=11)
    assert batch.values.shape == (200, 17)
    assert np.all(batch.values[:, 0] == 0.0)
    assert np.all(batch.values[:, -1] == a)
    assert batch.a == a and batch.kind == "bridge"


def test_excursion_is_rooted_and_nonnegative(params32):
    batch = sample_excursions(params32, 32, 300, seed=5)
    assert np.all(batch.values >= 0.0)
    assert np.all(batch.values[:, 0] == 0.0)
    assert np.all(batch.values[:, -1] == 0.0)


def test_sampling_is_deterministic(params43):
    first = sample_excursions(params43, 16, 100, seed=7).values
    second = sample_excursions(params43, 16, 100, seed=7).values
    np.testing.assert_array_equal(first, second)
    other = sample_excursions(params43, 16, 100, seed=8).values
    assert not np.array_equal(first, other)


def test_worker_count_does_not_change_output(params43):
    serial = SamplerConfig(batch_size=64, workers=1)
    parallel = SamplerConfig(batch_size=64, workers=3)
    a = np.vstack(map_blocks(params43, "bridge", 300, 8, 21, serial, a=0.5))
    b = np.vstack(map_blocks(params43, "bridge", 300, 8, 21, parallel, a=0.5))
    np.testing.assert_array_equal(a, b)


def test_map_blocks_reducer_and_sizes(params43):
    config = SamplerConfig(batch_size=100)
    sizes = map_blocks(params43, "free", 250, 4, 1, config, reducer=len)
    assert sizes == [100, 100, 50]


def test_table_method_endpoint(params43):
    config = SamplerConfig(midpoint_method="table", table_points=256)
    batch = sample_bridges(params43, -1.0, 8, 50, seed=2, config=config)
    assert np.all(batch.values[:, -1] == -1.0)
    assert np.all(np.isfinite(batch.values))


def test_grid_must_be_power_of_two(params43):
    with pytest.raises(DomainError):
        sample_bridges(params43, 0.0, 12, 10, seed=1)
    with pytest.raises(DomainError):
        sample_excursion(params43, 6, RngStream(1))
    # i cammini liberi accettano qualunque griglia
    assert sample_free_paths(params43, 6, 5, seed=1).values.shape == (5, 7)


def test_depth_cap(params43):
    with pytest.raises(DomainError):
        sample_bridge(params43, 0.0, 64, RngStream(1), SamplerConfig(depth_cap=4))


def test_sampler_config_validation():
    with pytest.raises(DomainError):
        SamplerConfig(n=0)
    with pytest.raises(DomainError):
        SamplerConfig(midpoint_method="newton")
    with pytest.raises(DomainError):
        SamplerConfig(workers=0)


def test_single_skeleton_provenance(params43):
    skeleton = sample_bridge(params43, -0.5, 8, RngStream(9))
    assert skeleton.n == 8 and skeleton.a == -0.5 and skeleton.seed == 9
    assert skeleton.values[-1] == -0.5
    path = skeleton.to_path()
    assert path.value(1.0) == -0.5


def test_bridge_midpoint_marginal(params43):
    batch = sample_bridges(params43, 0.0, 2, 5000, seed=31)
    sample = batch.values[:, 1]
    xs = np.linspace(sample.min() - 3.0, sample.max() + 3.0, 8001)
    pdf = bridge_marginal_density(params43, 0.0, 0.5, xs)
    cdf = integrate.cumulative_trapezoid(pdf, xs, initial=0.0)
    cdf /= cdf[-1]
    result = stats.kstest(sample, lambda x: np.interp(x, xs, cdf))
    assert result.statistic < 0.03


def test_free_path_marginal_scaling(params32):
    batch = sample_free_paths(params32, 4, 20_000, seed=13)
    quarter = batch.values[:, 1] * 4.0 ** (1.0 / params32.alpha)
    reference = stable_increments(params32, 1.0, 20_000, np.random.default_rng(99))
    assert stats.ks_2samp(quarter, reference).pvalue > 1e-3


def test_excursion_refinement_sup_on_common_numbers(params43):
    data = simulate_functionals(params43, "excursion", 200, 16, 4, two_grid=True)
    assert np.all(data["sup_2n"] >= data["sup"] - 1e-12)
