"""Simulation model, integrated squared error and the benchmark harness.

Observations follow ``Y | X = mu(X) + Sigma(X)^{1/2} Z`` with
``X ~ Beta(0.5, 1.8)``, quadratic mean curves and the covariance curve
``Sigma(x) = (1 + 10x + 20x^5) Exp[S * sin(2 pi theta (x + 0.1))]`` where
``*`` is the entrywise product. Model parameters are drawn once from the
parameter seed and then held fixed across replicates.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
from typing import Any

import numpy as np
import scipy.integrate

from .bandwidth_selection import BandwidthGrid, cv_mean_bandwidth
from .domain.errors import (
    AllCandidatesDegenerateError,
    ConfigError,
    DegenerateWindowError,
    GridTooCoarseError,
    InvalidDesignError,
)
from .dyn_cov import (
    MatrixCurve,
    ObservationSet,
    covariance_stack,
    estimate_means,
    raw_covariances,
)
from .estimation_options import Estimator, SamplingDesign, parse_case_insensitive_enum
from .kernel_smoothing import default_bandwidth_candidates
from .matrix_space import SymMatrix, matrix_exp_stack
from .varying_coeff import OutcomeSet

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MIN_ISE_POINTS = 20
VALID_REPLICATE_SHARE = 0.9
REFERENCE_BANDWIDTHS: tuple[float, ...] = (
    0.05, 0.06, 0.08, 0.1, 0.15, 0.2, 0.25, 0.29, 0.33, 0.37, 0.43, 0.5, 0.6,
)
REPEAT_COUNT_STREAM = 7


@dataclass(frozen=True, slots=True)
class RepeatDesign:
    """Per-subject observation counts ``1..K`` and within-subject correlation."""

    count_probs: tuple[float, ...] = (0.48, 0.28, 0.14, 0.1)
    cross_corr: float = 0.2

    def __post_init__(self) -> None:
        probs = np.asarray(self.count_probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0 or np.any(probs < 0.0):
            raise InvalidDesignError("Count probabilities must be a nonempty nonnegative vector.")
        if not np.isclose(probs.sum(), 1.0, atol=1e-9):
            raise InvalidDesignError(f"Count probabilities sum to {probs.sum():g}, not 1.")
        object.__setattr__(self, "count_probs", tuple(float(v) for v in probs))
        self.cholesky(len(probs))

    @property
    def max_count(self) -> int:
        return len(self.count_probs)

    def cholesky(self, count: int) -> np.ndarray:
        """Cholesky factor of the within-subject correlation for ``count`` repeats."""

        corr = (1.0 - self.cross_corr) * np.eye(count) + self.cross_corr * np.ones((count, count))
        try:
            return np.linalg.cholesky(corr)
        except np.linalg.LinAlgError as exc:
            raise InvalidDesignError(
                f"cross_corr={self.cross_corr:g} is not positive definite for {count} repeats."
            ) from exc


@dataclass(frozen=True, slots=True)
class VcmDesign:
    """Known varying-coefficient outcome model for end-to-end checks."""

    amplitude: float = 1.0
    noise_sd: float = 1.0
    baseline: float = 100.0


@dataclass(frozen=True, slots=True)
class SimConfig:
    p: int
    n: int
    b: np.ndarray
    c: np.ndarray
    s_matrix: np.ndarray
    theta: np.ndarray
    seed: int = 0
    beta_shape: tuple[float, float] = (0.5, 1.8)
    a_variance: float = 0.5
    repeat_design: RepeatDesign | None = None
    vcm: VcmDesign | None = None

    def __post_init__(self) -> None:
        if self.p < 1 or self.n < 2:
            raise ConfigError(f"Need p >= 1 and n >= 2, got p={self.p}, n={self.n}.")
        for name, shape in (("b", (self.p,)), ("c", (self.p,)), ("s_matrix", (self.p, self.p)), ("theta", (self.p, self.p))):
            value = np.asarray(getattr(self, name), dtype=np.float64)
            if value.shape != shape:
                raise ConfigError(f"Parameter '{name}' must have shape {shape}, got {value.shape}.")
            object.__setattr__(self, name, value)
        if not np.array_equal(self.s_matrix, self.s_matrix.T) or not np.array_equal(self.theta, self.theta.T):
            raise ConfigError("Parameters 's_matrix' and 'theta' must be symmetric.")

    @classmethod
    def draw(
        cls,
        p: int,
        n: int,
        seed: int = 0,
        *,
        a_variance: float = 0.5,
        repeat_design: RepeatDesign | None = None,
        vcm: VcmDesign | None = None,
    ) -> "SimConfig":
        """Draw ``b``, ``c``, ``S`` and ``theta`` once from the parameter seed."""

        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(p,)))
        b = rng.uniform(10.0, 16.0, size=p)
        c = rng.uniform(1.0, 1.1, size=p)
        a = rng.normal(0.0, np.sqrt(a_variance), size=(p, p))
        v = rng.uniform(0.0, 0.5, size=(p, p))
        return cls(
            p=p,
            n=n,
            b=b,
            c=c,
            s_matrix=0.5 * (a + a.T),
            theta=0.5 * (v + v.T),
            seed=seed,
            a_variance=a_variance,
            repeat_design=repeat_design,
            vcm=vcm,
        )

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "p": self.p,
            "n": self.n,
            "seed": self.seed,
            "beta_shape": list(self.beta_shape),
            "a_variance": self.a_variance,
            "b": self.b.tolist(),
            "c": self.c.tolist(),
            "s_matrix": self.s_matrix.tolist(),
            "theta": self.theta.tolist(),
            "repeat_design": None,
            "vcm": None,
        }
        if self.repeat_design is not None:
            payload["repeat_design"] = {
                "count_probs": list(self.repeat_design.count_probs),
                "cross_corr": self.repeat_design.cross_corr,
            }
        if self.vcm is not None:
            payload["vcm"] = {
                "amplitude": self.vcm.amplitude,
                "noise_sd": self.vcm.noise_sd,
                "baseline": self.vcm.baseline,
            }
        return payload

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "SimConfig":
        """Parse a config mapping; missing model parameters are drawn from the seed."""

        _reject_unknown(payload, _CONFIG_KEYS, "simulation config")
        version = payload.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"Unsupported schema_version {version!r}; expected {SCHEMA_VERSION}.")
        try:
            p = int(payload["p"])
            n = int(payload["n"])
        except KeyError as exc:
            raise ConfigError(f"Simulation config is missing required key {exc.args[0]!r}.") from exc
        seed = int(payload.get("seed", 0))
        a_variance = float(payload.get("a_variance", 0.5))
        repeat_design = _parse_section(payload.get("repeat_design"), RepeatDesign, _REPEAT_KEYS, "repeat_design")
        vcm = _parse_section(payload.get("vcm"), VcmDesign, _VCM_KEYS, "vcm")

        drawn = cls.draw(p, n, seed, a_variance=a_variance, repeat_design=repeat_design, vcm=vcm)
        beta_shape = tuple(float(v) for v in payload.get("beta_shape", drawn.beta_shape))
        if len(beta_shape) != 2 or min(beta_shape) <= 0.0:
            raise ConfigError("beta_shape must hold two positive shape parameters.")
        return cls(
            p=p,
            n=n,
            b=np.asarray(payload.get("b", drawn.b), dtype=np.float64),
            c=np.asarray(payload.get("c", drawn.c), dtype=np.float64),
            s_matrix=np.asarray(payload.get("s_matrix", drawn.s_matrix), dtype=np.float64),
            theta=np.asarray(payload.get("theta", drawn.theta), dtype=np.float64),
            seed=seed,
            beta_shape=(beta_shape[0], beta_shape[1]),
            a_variance=a_variance,
            repeat_design=repeat_design,
            vcm=vcm,
        )


_CONFIG_KEYS = frozenset(
    {"schema_version", "p", "n", "seed", "beta_shape", "a_variance", "b", "c", "s_matrix", "theta", "repeat_design", "vcm"}
)
_REPEAT_KEYS = frozenset({"count_probs", "cross_corr"})
_VCM_KEYS = frozenset({"amplitude", "noise_sd", "baseline"})


def _reject_unknown(payload: Mapping[str, Any], allowed: frozenset[str], where: str) -> None:
    if not isinstance(payload, Mapping):
        raise ConfigError(f"The {where} must be a JSON object.")
    unknown = sorted(set(payload) - allowed)
    if unknown:
        raise ConfigError(
            f"Unknown key '{unknown[0]}' in {where}. Allowed keys: {', '.join(sorted(allowed))}."
        )


def _parse_section(raw: Any, factory: Callable[..., Any], allowed: frozenset[str], where: str) -> Any:
    if raw is None:
        return None
    _reject_unknown(raw, allowed, where)
    kwargs = dict(raw)
    if "count_probs" in kwargs:
        kwargs["count_probs"] = tuple(float(v) for v in kwargs["count_probs"])
    return factory(**kwargs)


def _scale(x: np.ndarray) -> np.ndarray:
    return 1.0 + 10.0 * x + 20.0 * x**5


def _log_cov_stack(config: SimConfig, x: np.ndarray) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return config.s_matrix * np.sin(2.0 * np.pi * config.theta * (x[:, np.newaxis, np.newaxis] + 0.1))


def true_mean(config: SimConfig, x: np.ndarray | float) -> np.ndarray:
    """``mu_j(x) = b_j - 8 (x - c_j)^2``; shape ``(p,)`` for scalar ``x``, else ``(m, p)``."""

    x_arr = np.asarray(x, dtype=np.float64)
    values = config.b - 8.0 * np.square(np.atleast_1d(x_arr)[:, np.newaxis] - config.c)
    return values[0] if x_arr.ndim == 0 else values


def true_cov_stack(config: SimConfig, x: np.ndarray) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return _scale(x)[:, np.newaxis, np.newaxis] * matrix_exp_stack(_log_cov_stack(config, x))


def true_cov(config: SimConfig, x: float) -> SymMatrix:
    return SymMatrix(true_cov_stack(config, np.array([x]))[0], psd_certified=True)


def true_cov_sqrt_stack(config: SimConfig, x: np.ndarray) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return np.sqrt(_scale(x))[:, np.newaxis, np.newaxis] * matrix_exp_stack(0.5 * _log_cov_stack(config, x))


def true_beta(config: SimConfig, x: np.ndarray | float) -> np.ndarray:
    """``beta_j(x) = amplitude * sin(2 pi (x + j / p))`` for ``j = 1..p``."""

    design = config.vcm or VcmDesign()
    x_arr = np.asarray(x, dtype=np.float64)
    shifts = np.arange(1, config.p + 1) / config.p
    values = design.amplitude * np.sin(2.0 * np.pi * (np.atleast_1d(x_arr)[:, np.newaxis] + shifts))
    return values[0] if x_arr.ndim == 0 else values


def true_gamma(config: SimConfig, x: np.ndarray | float) -> np.ndarray:
    x_arr = np.asarray(x, dtype=np.float64)
    x_vec = np.atleast_1d(x_arr)
    values = np.einsum("mij,mj->mi", true_cov_stack(config, x_vec), true_beta(config, x_vec))
    return values[0] if x_arr.ndim == 0 else values


def _default_rng(config: SimConfig, rng: np.random.Generator | None) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(config.seed)


def generate(config: SimConfig, rng: np.random.Generator | None = None) -> ObservationSet:
    rng = _default_rng(config, rng)
    times = rng.beta(*config.beta_shape, size=config.n)
    z = rng.standard_normal(size=(config.n, config.p))
    responses = true_mean(config, times) + np.einsum("nij,nj->ni", true_cov_sqrt_stack(config, times), z)
    return ObservationSet(times=times, responses=responses, domain_end=1.0, subject_ids=np.arange(config.n))


def draw_repeat_counts(config: SimConfig) -> np.ndarray:
    """Observation counts per subject, drawn once from the parameter seed."""

    design = config.repeat_design or RepeatDesign()
    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(REPEAT_COUNT_STREAM, config.n)))
    return rng.choice(np.arange(1, design.max_count + 1), size=config.n, p=design.count_probs)


def generate_repeated(
    config: SimConfig,
    rng: np.random.Generator | None = None,
    counts: np.ndarray | None = None,
) -> ObservationSet:
    """Subjects with ``N_i`` repeats whose noise vectors share ``cross_corr * I`` blocks."""

    if config.repeat_design is None:
        raise InvalidDesignError("Repeated sampling requires a repeat_design.")
    design = config.repeat_design
    rng = _default_rng(config, rng)
    counts = draw_repeat_counts(config) if counts is None else np.asarray(counts, dtype=np.int64)
    if counts.shape != (config.n,) or counts.min() < 1 or counts.max() > design.max_count:
        raise InvalidDesignError(f"Counts must be {config.n} integers in 1..{design.max_count}.")

    subjects = np.repeat(np.arange(config.n), counts)
    times = rng.beta(*config.beta_shape, size=subjects.size)
    z = np.empty((subjects.size, config.p))
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    for count in range(1, design.max_count + 1):
        members = np.flatnonzero(counts == count)
        if members.size == 0:
            continue
        white = rng.standard_normal(size=(members.size, count, config.p))
        correlated = design.cholesky(count) @ white
        rows = (starts[members][:, np.newaxis] + np.arange(count)).ravel()
        z[rows] = correlated.reshape(-1, config.p)
    responses = true_mean(config, times) + np.einsum("nij,nj->ni", true_cov_sqrt_stack(config, times), z)
    return ObservationSet(times=times, responses=responses, domain_end=1.0, subject_ids=subjects)


def generate_outcomes(
    config: SimConfig,
    data: ObservationSet,
    rng: np.random.Generator | None = None,
) -> OutcomeSet:
    design = config.vcm or VcmDesign()
    rng = _default_rng(config, rng)
    centred = data.responses - true_mean(config, data.times)
    signal = np.sum(true_beta(config, data.times) * centred, axis=1)
    noise = rng.normal(0.0, design.noise_sd, size=data.n)
    return OutcomeSet(scores=design.baseline + signal + noise, baseline=design.baseline)


def default_ise_grid(points: int = 101, trim: float = 0.025) -> np.ndarray:
    return np.linspace(trim, 1.0 - trim, points)


def _check_ise_grid(grid: np.ndarray) -> None:
    if grid.shape[0] < MIN_ISE_POINTS:
        raise GridTooCoarseError(
            f"ISE needs at least {MIN_ISE_POINTS} grid points, got {grid.shape[0]}."
        )


def ise_from_stack(grid: np.ndarray, estimates: np.ndarray, truth: np.ndarray) -> float:
    squared = np.sum(np.square(estimates - truth), axis=(1, 2))
    return float(scipy.integrate.trapezoid(squared, grid))


def ise(curve: MatrixCurve, config: SimConfig) -> float:
    """Trapezoidal integral of the squared Frobenius error over the curve grid."""

    _check_ise_grid(curve.grid)
    return ise_from_stack(curve.grid, curve.matrices, true_cov_stack(config, curve.grid))


def score_curve(curve: MatrixCurve, config: SimConfig) -> float:
    if curve.p != config.p:
        raise ConfigError(f"Curve dimension {curve.p} does not match config dimension {config.p}.")
    if curve.grid[0] < 0.0 or curve.grid[-1] > 1.0:
        raise ConfigError("Curve grid must lie inside [0, 1] to be scored against the model.")
    return ise(curve, config)


@dataclass(frozen=True, slots=True)
class BenchmarkProfile:
    dims: tuple[int, ...]
    sizes: tuple[int, ...]
    replicates: int
    estimators: tuple[Estimator, ...]
    bandwidths: tuple[float, ...] = REFERENCE_BANDWIDTHS
    ise_points: int = 101
    ise_trim: float = 0.025


BENCHMARK_PROFILES: dict[str, BenchmarkProfile] = {
    "full": BenchmarkProfile(
        dims=(20, 40),
        sizes=(250, 500, 1000),
        replicates=100,
        estimators=(Estimator.NW, Estimator.LOCAL_LINEAR_RAW, Estimator.LOCAL_FRECHET),
    ),
    "desk": BenchmarkProfile(
        dims=(20,),
        sizes=(250,),
        replicates=100,
        estimators=(
            Estimator.NW,
            Estimator.LOCAL_LINEAR_RAW,
            Estimator.LOCAL_FRECHET,
            Estimator.DCOV_SQRT,
        ),
    ),
    "smoke": BenchmarkProfile(
        dims=(3,),
        sizes=(120,),
        replicates=2,
        estimators=(Estimator.NW, Estimator.LOCAL_FRECHET),
        bandwidths=(0.2, 0.33, 0.5),
        ise_points=21,
    ),
}


def resolve_benchmark_profile(profile: str) -> BenchmarkProfile:
    try:
        return BENCHMARK_PROFILES[profile]
    except KeyError as exc:
        allowed = ", ".join(sorted(BENCHMARK_PROFILES))
        raise ConfigError(f"Unknown benchmark profile '{profile}'. Allowed: {allowed}.") from exc


@dataclass(frozen=True, slots=True)
class BenchRow:
    """Benchmark outcome for one ``(estimator, p, n)`` cell."""

    estimator: Estimator
    p: int
    n: int
    design: SamplingDesign
    log_mean_ise: float
    best_index: int
    best_bandwidth: float
    mean_ise: np.ndarray
    valid_counts: np.ndarray
    run_ise: np.ndarray

    @property
    def replicates(self) -> int:
        return int(self.run_ise.shape[0])

    @property
    def best_run_ise(self) -> np.ndarray:
        return self.run_ise[:, self.best_index]


@dataclass(frozen=True, slots=True)
class BenchResult:
    rows: tuple[BenchRow, ...]
    bandwidths: np.ndarray
    seed: int
    ise_grid: np.ndarray
    design: SamplingDesign = SamplingDesign.SINGLE
    mean_bandwidths: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    def row(self, estimator: Estimator, p: int, n: int) -> BenchRow:
        for row in self.rows:
            if row.estimator is estimator and row.p == p and row.n == n:
                return row
        raise KeyError((estimator, p, n))


def replicate_rng(seed: int, p: int, n: int, design: SamplingDesign, replicate: int) -> np.random.Generator:
    """Independent PCG64 stream per ``(p, n, design, replicate)``."""

    design_index = list(SamplingDesign).index(design)
    sequence = np.random.SeedSequence(seed, spawn_key=(p, n, design_index, replicate))
    return np.random.Generator(np.random.PCG64(sequence))


def _replicate_ise(
    config: SimConfig,
    design: SamplingDesign,
    counts: np.ndarray | None,
    rng: np.random.Generator,
    estimators: Sequence[Estimator],
    bandwidths: np.ndarray,
    ise_grid: np.ndarray,
    truth: np.ndarray,
) -> tuple[np.ndarray, float]:
    if design is SamplingDesign.REPEATED:
        data = generate_repeated(config, rng, counts)
    else:
        data = generate(config, rng)
    mean_grid = BandwidthGrid(
        candidates=default_bandwidth_candidates(data.times, data.domain_end),
        folds=data.n,
    )
    h_mean = cv_mean_bandwidth(data, mean_grid, workers=1)
    raw = raw_covariances(data, estimate_means(data, h_mean))

    values = np.full((len(estimators), bandwidths.shape[0]), np.nan)
    for e_index, estimator in enumerate(estimators):
        for h_index, h in enumerate(bandwidths):
            try:
                stack = covariance_stack(raw, ise_grid, float(h), estimator)
            except DegenerateWindowError:
                continue
            values[e_index, h_index] = ise_from_stack(ise_grid, stack, truth)
    return values, h_mean


def _reduce_cell(
    estimator: Estimator,
    config: SimConfig,
    design: SamplingDesign,
    bandwidths: np.ndarray,
    run_ise: np.ndarray,
) -> BenchRow:
    replicates = run_ise.shape[0]
    defined = np.isfinite(run_ise)
    valid_counts = defined.sum(axis=0)
    mean_ise = np.where(valid_counts > 0, np.nansum(run_ise, axis=0) / np.maximum(valid_counts, 1), np.nan)
    eligible = valid_counts >= VALID_REPLICATE_SHARE * replicates
    if not np.any(eligible):
        raise AllCandidatesDegenerateError(
            f"No bandwidth yields defined estimates in enough replicates "
            f"(estimator={estimator.value}, p={config.p}, n={config.n})."
        )
    best = int(np.nanargmin(np.where(eligible, mean_ise, np.nan)))
    return BenchRow(
        estimator=estimator,
        p=config.p,
        n=config.n,
        design=design,
        log_mean_ise=float(np.log(mean_ise[best])),
        best_index=best,
        best_bandwidth=float(bandwidths[best]),
        mean_ise=mean_ise,
        valid_counts=valid_counts,
        run_ise=run_ise,
    )


def run_benchmark(
    dims: Sequence[int],
    sizes: Sequence[int],
    estimators: Sequence[Estimator],
    bandwidths: Sequence[float] = REFERENCE_BANDWIDTHS,
    replicates: int = 100,
    seed: int = 0,
    *,
    design: SamplingDesign = SamplingDesign.SINGLE,
    repeat_design: RepeatDesign | None = None,
    ise_grid: np.ndarray | None = None,
    workers: int | None = None,
    on_cell: Callable[[BenchRow], None] | None = None,
) -> BenchResult:
    """Minimum over ``bandwidths`` of the replicate-averaged ISE per cell."""

    if replicates < 1:
        raise ConfigError(f"replicates must be positive, got {replicates}.")
    if not estimators:
        raise ConfigError("At least one estimator is required.")
    h_grid = np.asarray(sorted(bandwidths), dtype=np.float64)
    if h_grid.size == 0 or h_grid[0] <= 0.0:
        raise ConfigError("Benchmark bandwidths must be positive.")
    quad_grid = default_ise_grid() if ise_grid is None else np.asarray(ise_grid, dtype=np.float64)
    _check_ise_grid(quad_grid)
    if design is SamplingDesign.REPEATED and repeat_design is None:
        repeat_design = RepeatDesign()

    rows: list[BenchRow] = []
    mean_bandwidths: dict[tuple[int, int], np.ndarray] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        for p in dims:
            for n in sizes:
                config = SimConfig.draw(p, n, seed, repeat_design=repeat_design)
                counts = draw_repeat_counts(config) if design is SamplingDesign.REPEATED else None
                truth = true_cov_stack(config, quad_grid)

                def run(replicate: int) -> tuple[int, np.ndarray, float]:
                    rng = replicate_rng(seed, p, n, design, replicate)
                    values, h_mean = _replicate_ise(
                        config, design, counts, rng, estimators, h_grid, quad_grid, truth
                    )
                    return replicate, values, h_mean

                outcomes = sorted(executor.map(run, range(replicates)), key=lambda item: item[0])
                stacked = np.stack([values for _, values, _ in outcomes])
                mean_bandwidths[(p, n)] = np.array([h_mean for _, _, h_mean in outcomes])
                for e_index, estimator in enumerate(estimators):
                    row = _reduce_cell(estimator, config, design, h_grid, stacked[:, e_index, :])
                    logger.info(
                        "Benchmark cell %s p=%d n=%d: log mean ISE %.3f at h=%g",
                        estimator.value,
                        p,
                        n,
                        row.log_mean_ise,
                        row.best_bandwidth,
                    )
                    rows.append(row)
                    if on_cell is not None:
                        on_cell(row)

    return BenchResult(
        rows=tuple(rows),
        bandwidths=h_grid,
        seed=seed,
        ise_grid=quad_grid,
        design=design,
        mean_bandwidths=mean_bandwidths,
    )


def parse_estimators(raw: str) -> tuple[Estimator, ...]:
    """Comma-separated estimator names, e.g. ``"nw,ll,lf"``."""

    names = [item for item in (part.strip() for part in raw.split(",")) if item]
    if not names:
        raise ConfigError("At least one estimator is required.")
    try:
        return tuple(parse_case_insensitive_enum(name, Estimator, "estimator") for name in names)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
