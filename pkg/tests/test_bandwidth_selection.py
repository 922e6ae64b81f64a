from __future__ import annotations

import numpy as np
import pytest

from frechet_cov.bandwidth_selection import (
    BandwidthGrid,
    cv_h1,
    cv_h2,
    cv_mean_bandwidth,
    fold_partition,
    geometric_mean_bandwidth,
    h1_criterion,
    h2_criterion,
    mean_cv_scores,
    select_bandwidth,
    select_bandwidths,
    select_minimizer,
)
from frechet_cov.domain.errors import AllCandidatesDegenerateError, ConfigError
from frechet_cov.dyn_cov import ObservationSet, estimate_lf, estimate_means, raw_covariances
from frechet_cov.kernel_smoothing import loo_cv_score
from frechet_cov.matrix_space import pseudo_inverse
from frechet_cov.sim_engine import SimConfig, generate


@pytest.fixture(scope="module")
def data():
    config = SimConfig.draw(2, 200, seed=4)
    return generate(config, np.random.default_rng(4))


def test_fold_partition_is_a_deterministic_partition() -> None:
    folds = fold_partition(23, 5, seed=9)

    assert len(folds) == 5
    assert sorted(np.concatenate(folds).tolist()) == list(range(23))
    assert {len(fold) for fold in folds} == {4, 5}
    assert all(np.array_equal(a, b) for a, b in zip(folds, fold_partition(23, 5, seed=9)))
    with pytest.raises(ConfigError):
        fold_partition(3, 5, seed=0)


def test_bandwidth_grid_rejects_unsorted_or_non_positive_candidates() -> None:
    with pytest.raises(ConfigError):
        BandwidthGrid(candidates=np.array([0.2, 0.1]))
    with pytest.raises(ConfigError):
        BandwidthGrid(candidates=np.array([0.0, 0.1]))
    with pytest.raises(ConfigError):
        BandwidthGrid(candidates=np.array([0.1]), folds=1)


def test_select_minimizer_prefers_smallest_tied_candidate() -> None:
    candidates = np.array([0.1, 0.2, 0.3, 0.4])

    assert select_minimizer(candidates, np.array([np.nan, 2.0, 2.0, 3.0])) == 0.2
    assert select_minimizer(candidates, np.array([5.0, 4.0, 1.0 + 1e-13, 1.0])) == 0.3
    with pytest.raises(AllCandidatesDegenerateError):
        select_minimizer(candidates, np.full(4, np.nan))


def test_mean_cv_uses_leave_one_out_identity_when_folds_cover_every_point(data) -> None:
    grid = BandwidthGrid(candidates=np.array([0.3, 0.4, 0.5]), folds=data.n)

    scores = mean_cv_scores(data, grid, workers=1)

    expected = [loo_cv_score(data.times, data.responses, h) for h in grid.candidates]
    np.testing.assert_allclose(scores, expected, rtol=1e-12)
    assert cv_mean_bandwidth(data, grid, workers=1) in grid.candidates


def test_h1_and_h2_match_brute_force_held_out_sums(data) -> None:
    raw = raw_covariances(data, estimate_means(data, 0.3))
    folds = fold_partition(data.n, 4, seed=1)
    h = 0.35

    h1_total = 0.0
    h2_total = 0.0
    for fold in folds:
        train = raw.subset(np.setdiff1d(np.arange(data.n), fold))
        for i in fold:
            estimate = estimate_lf(train, raw.times[i], h)
            h1_total += float(np.sum(np.square(raw.matrices[i] - estimate.entries)))
            v = raw.residuals[i]
            h2_total += float(v @ pseudo_inverse(estimate).entries @ v)

    assert h1_criterion(raw, folds, h) == pytest.approx(h1_total, rel=1e-9)
    assert h2_criterion(raw, folds, h) == pytest.approx(h2_total, rel=1e-9)


def test_select_bandwidths_combines_criteria_and_is_thread_invariant(data) -> None:
    grid = BandwidthGrid(candidates=np.geomspace(0.1, 0.5, 6), folds=5, seed=2)

    serial = select_bandwidths(data, grid, h_mean=0.3, workers=1)
    threaded = select_bandwidths(data, grid, h_mean=0.3, workers=4)

    assert serial.h_opt == pytest.approx(geometric_mean_bandwidth(serial.h1, serial.h2))
    assert serial.h1 in grid.candidates and serial.h2 in grid.candidates
    assert np.array_equal(serial.h1_scores, threaded.h1_scores, equal_nan=True)
    assert np.array_equal(serial.h2_scores, threaded.h2_scores, equal_nan=True)
    assert serial.h_opt == threaded.h_opt


def test_single_criterion_selectors_agree_with_combined_selection(data) -> None:
    grid = BandwidthGrid(candidates=np.geomspace(0.1, 0.5, 6), folds=5, seed=2)

    combined = select_bandwidths(data, grid, h_mean=0.3, workers=1)

    assert cv_h1(data, grid, h_mean=0.3, workers=1) == combined.h1
    assert cv_h2(data, grid, h_mean=0.3, workers=1) == combined.h2
    assert select_bandwidth(data, grid, h_mean=0.3, workers=1) == combined.h_opt


def test_constant_covariance_selects_the_widest_candidate() -> None:
    rng = np.random.default_rng(14)
    times = rng.uniform(0.0, 1.0, size=2_000)
    constant = ObservationSet(times=times, responses=rng.standard_normal(size=(2_000, 2)), domain_end=1.0)
    grid = BandwidthGrid(candidates=np.array([0.02, 0.05, 0.5]), folds=5, seed=3)

    assert cv_h1(constant, grid, h_mean=0.3, workers=1) == 0.5


def test_degenerate_candidates_are_skipped(data) -> None:
    grid = BandwidthGrid(candidates=np.array([1e-4, 0.3, 0.45]), folds=5)

    selection = select_bandwidths(data, grid, h_mean=0.3, workers=1)

    assert np.isnan(selection.h1_scores[0]) and np.isnan(selection.h2_scores[0])
    assert selection.h1 in (0.3, 0.45)


def test_default_grid_starts_above_largest_design_gap(data) -> None:
    grid = BandwidthGrid.default_for(data, folds=5, seed=0)
    gaps = np.diff(np.sort(data.times))

    assert grid.candidates[0] >= min(2.0 * gaps.max(), 0.5 * data.domain_end) - 1e-15
    assert grid.candidates[-1] == pytest.approx(0.5 * data.domain_end)


@pytest.mark.slow
def test_h1_rarely_exceeds_h2_on_simulated_data() -> None:
    grid_candidates = np.array([0.08, 0.1, 0.15, 0.2, 0.25, 0.29, 0.33, 0.37, 0.43, 0.5, 0.6])
    ordered = 0
    for run in range(20):
        config = SimConfig.draw(5, 250, seed=run)
        sample = generate(config, np.random.default_rng(500 + run))
        selection = select_bandwidths(sample, BandwidthGrid(candidates=grid_candidates, seed=run), h_mean=0.2)
        ordered += int(selection.h1 <= selection.h2)

    assert ordered >= 18
