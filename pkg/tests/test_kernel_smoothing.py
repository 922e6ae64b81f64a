from __future__ import annotations

import numpy as np
import pytest
from scipy.integrate import trapezoid

from frechet_cov.domain.errors import ConfigError, DegenerateWindowError, MeanNotEvaluableError
from frechet_cov.estimation_options import KernelKind, WeightOrder
from frechet_cov.kernel_smoothing import (
    Kernel,
    ScalarCurve,
    default_bandwidth_candidates,
    kernel_eval,
    local_weights,
    loo_cv_score,
    resolve_smoothing_tuning,
    smooth_scalar,
    weight_matrix,
    window_validity,
)


@pytest.mark.parametrize("kind", list(KernelKind))
def test_kernels_integrate_to_one_on_support(kind: KernelKind) -> None:
    u = np.linspace(-1.0, 1.0, 20_001)
    values = Kernel(kind)(u)

    assert trapezoid(values, u) == pytest.approx(1.0, abs=1e-6)
    assert Kernel(kind)(np.array([-1.5, 1.5])).tolist() == [0.0, 0.0]


def test_epanechnikov_evaluates_pointwise() -> None:
    kernel = Kernel()

    assert kernel_eval(kernel, 0.0) == pytest.approx(0.75)
    assert kernel_eval(kernel, 0.5) == pytest.approx(0.5625)
    assert kernel_eval(kernel, 1.5) == 0.0
    assert kernel_eval(kernel, -0.5) == kernel_eval(kernel, 0.5)


@pytest.mark.parametrize("order", list(WeightOrder))
def test_weights_sum_to_one_across_random_windows(order: WeightOrder) -> None:
    rng = np.random.default_rng(11)
    for _ in range(1_000):
        times = rng.uniform(0.0, 1.0, size=40)
        x = rng.uniform(0.2, 0.8)
        h = rng.uniform(0.2, 0.5)
        weights = local_weights(times, x, h, order).weights

        assert abs(weights.sum() - 1.0) <= 1e-12
        assert np.all(weights[np.abs(times - x) > h] == 0.0)


def test_local_linear_weights_reproduce_lines() -> None:
    rng = np.random.default_rng(3)
    times = np.sort(rng.uniform(0.0, 1.0, size=60))
    grid = np.linspace(0.1, 0.9, 17)

    curve = smooth_scalar(times, 2.0 + 3.0 * times, grid, h=0.2)

    np.testing.assert_allclose(curve.values, 2.0 + 3.0 * grid, atol=1e-10)


def test_nadaraya_watson_weights_match_normalized_kernel() -> None:
    times = np.array([0.1, 0.2, 0.35, 0.9])
    weights = weight_matrix(times, np.array([0.2]), 0.2, WeightOrder.NW)[0]
    k = 0.75 * (1.0 - np.square((times - 0.2) / 0.2))
    k[np.abs(times - 0.2) > 0.2] = 0.0

    np.testing.assert_allclose(weights, k / k.sum(), rtol=1e-14)


def test_local_linear_weights_turn_negative_at_the_boundary() -> None:
    times = np.array([0.1, 0.15, 0.3])

    weights = local_weights(times, 0.1, 0.25, WeightOrder.LOCAL_LINEAR).weights

    np.testing.assert_allclose(weights, np.array([175.0, 108.0, -27.0]) / 256.0, rtol=1e-12)
    assert weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert weights[2] < 0.0


@pytest.mark.parametrize(
    "times",
    [np.array([0.4, 0.6]), 0.5 + np.array([-0.15, -0.1, -0.05, 0.05, 0.1, 0.15])],
)
def test_symmetric_design_makes_local_linear_match_nadaraya_watson(times: np.ndarray) -> None:
    nw = local_weights(times, 0.5, 0.2, WeightOrder.NW).weights
    ll = local_weights(times, 0.5, 0.2, WeightOrder.LOCAL_LINEAR).weights

    np.testing.assert_allclose(ll, nw, atol=1e-12)
    if times.size == 2:
        np.testing.assert_allclose(nw, [0.5, 0.5], rtol=1e-14)


def test_empty_window_raises_with_grid_location() -> None:
    times = np.array([0.1, 0.12, 0.9])

    with pytest.raises(DegenerateWindowError) as caught:
        weight_matrix(times, np.array([0.1, 0.5]), 0.1, WeightOrder.NW)

    assert caught.value.location == pytest.approx(0.5)
    assert "x=0.5" in str(caught.value)


def test_local_linear_needs_two_distinct_times() -> None:
    times = np.array([0.3, 0.3, 0.9])

    with pytest.raises(DegenerateWindowError):
        local_weights(times, 0.3, 0.2, WeightOrder.LOCAL_LINEAR)
    assert local_weights(times, 0.3, 0.2, WeightOrder.NW).weights.tolist() == [0.5, 0.5, 0.0]


def test_window_validity_marks_degenerate_points() -> None:
    times = np.array([0.0, 0.05, 0.1, 0.8])
    mask = window_validity(times, np.array([0.05, 0.5, 0.8]), 0.1, WeightOrder.LOCAL_LINEAR)

    assert mask.tolist() == [True, False, False]


def test_non_positive_bandwidth_is_a_config_error() -> None:
    with pytest.raises(ConfigError):
        weight_matrix(np.array([0.1, 0.2]), np.array([0.1]), 0.0, WeightOrder.NW)


def test_loo_cv_score_matches_brute_force_refits() -> None:
    rng = np.random.default_rng(5)
    times = np.sort(rng.uniform(0.0, 1.0, size=50))
    responses = np.column_stack([np.sin(3.0 * times), times**2]) + rng.normal(0.0, 0.1, size=(50, 2))
    h = 0.3

    brute = 0.0
    for i in range(times.size):
        keep = np.arange(times.size) != i
        weights = local_weights(times[keep], times[i], h, WeightOrder.LOCAL_LINEAR).weights
        brute += float(np.sum(np.square(responses[i] - weights @ responses[keep])))

    assert loo_cv_score(times, responses, h) == pytest.approx(brute, rel=1e-8)


def test_default_bandwidth_candidates_span_gap_to_half_domain() -> None:
    times = np.array([0.0, 0.1, 0.15, 0.4, 0.5, 1.0])
    candidates = default_bandwidth_candidates(times, domain_end=1.0)

    assert candidates.tolist() == [0.5]

    spread = default_bandwidth_candidates(np.linspace(0.0, 2.0, 41), domain_end=2.0, count=4)
    np.testing.assert_allclose(spread, np.geomspace(0.1, 1.0, 4))


def test_scalar_curve_rejects_evaluation_outside_grid() -> None:
    curve = ScalarCurve(grid=np.array([0.0, 0.5, 1.0]), values=np.array([1.0, 2.0, 3.0]))

    assert curve.at(0.25) == pytest.approx(1.5)
    with pytest.raises(MeanNotEvaluableError) as caught:
        curve.at(np.array([0.5, 1.2]))
    assert caught.value.location == pytest.approx(1.2)


def test_unknown_smoothing_profile_lists_allowed_names() -> None:
    with pytest.raises(ConfigError, match="Allowed: default"):
        resolve_smoothing_tuning("fast")
