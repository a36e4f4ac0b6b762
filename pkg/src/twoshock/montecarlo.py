"""Monte Carlo oracle: marked renewal-process simulation with deterministic streams.

Determinism contract: every summary depends only on (replications,
master_seed).  Replications are partitioned into fixed-size blocks; block j
draws from an independent substream seeded by SeedSequence([master_seed, j]),
and per-block partial results are reduced in block order, so the worker count
can never change an output bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cumulative import CumulativeModel, GeneralCumulativeModel
from .catastrophic import CatastrophicModel
from .distributions import Distribution, Exponential

__all__ = [
    "SimulationConfig",
    "SimulationEstimate",
    "CatastrophicSimulation",
    "DamageSimulation",
    "FptfSimulation",
    "simulate_catastrophic",
    "simulate_cumulative",
    "simulate_fptf_cumulative",
    "simulate_general_cumulative",
]

_BLOCK_SIZE = 1 << 14
# Extension rounds for event-horizon growth; each round extends geometrically,
# so hitting the cap means a pathological model rather than bad luck.
_MAX_EXTENSION_ROUNDS = 64


@dataclass(frozen=True)
class SimulationConfig:
    """Replication count, master seed, and worker count for one simulation run."""

    replications: int
    master_seed: int
    workers: int = 1

    def __post_init__(self):
        if not (isinstance(self.replications, int) and self.replications >= 2):
            raise ValueError(f"replications must be an integer >= 2, got {self.replications!r}")
        if not (isinstance(self.master_seed, int) and not isinstance(self.master_seed, bool)
                and 0 <= self.master_seed < 2 ** 64):
            raise ValueError(f"master_seed must be a 64-bit integer, got {self.master_seed!r}")
        if not (isinstance(self.workers, int) and self.workers >= 1):
            raise ValueError(f"workers must be a positive integer, got {self.workers!r}")


@dataclass(frozen=True)
class SimulationEstimate:
    """Point estimate with its standard error and replication count."""

    mean: float
    std_error: float
    n: int
    quantity_tag: str


@dataclass(frozen=True)
class CatastrophicSimulation:
    grid: tuple
    survival: tuple
    fptf_mean: SimulationEstimate


@dataclass(frozen=True)
class DamageSimulation:
    """Damage summaries per grid time: mean estimates plus exact ECDFs."""

    grid: tuple
    means: tuple
    _samples: tuple  # sorted damage draws per grid point

    def ecdf(self, grid_index: int, x: float) -> SimulationEstimate:
        """Exact fraction of damage draws at grid point grid_index that are <= x."""
        samples = self._samples[grid_index]
        count = int(np.searchsorted(samples, x, side="right"))
        return _proportion_estimate(
            count, len(samples),
            f"damage_ecdf@t={self.grid[grid_index]!r},x={x!r}")


@dataclass(frozen=True)
class FptfSimulation:
    """Threshold-crossing time summaries: mean estimate plus exact ECDF."""

    mean: SimulationEstimate
    _times: np.ndarray  # sorted crossing times

    def ecdf(self, t: float) -> SimulationEstimate:
        count = int(np.searchsorted(self._times, t, side="right"))
        return _proportion_estimate(count, len(self._times), f"fptf_ecdf@t={t!r}")


def _proportion_estimate(count: int, n: int, tag: str) -> SimulationEstimate:
    p = count / n
    return SimulationEstimate(mean=p, std_error=math.sqrt(p * (1.0 - p) / n),
                              n=n, quantity_tag=tag)


def _mean_estimate(total: float, total_sq: float, n: int, tag: str) -> SimulationEstimate:
    mean = total / n
    var = max((total_sq - n * mean * mean) / (n - 1), 0.0)
    return SimulationEstimate(mean=mean, std_error=math.sqrt(var / n),
                              n=n, quantity_tag=tag)


def _block_sizes(replications: int) -> list:
    full, rest = divmod(replications, _BLOCK_SIZE)
    sizes = [_BLOCK_SIZE] * full
    if rest:
        sizes.append(rest)
    return sizes


def _run_blocks(cfg: SimulationConfig, worker) -> list:
    """worker(rng, size) per block; results returned in block order."""
    sizes = _block_sizes(cfg.replications)

    def run(j: int):
        rng = np.random.default_rng([cfg.master_seed, j])
        return worker(rng, sizes[j])

    if cfg.workers == 1 or len(sizes) == 1:
        return [run(j) for j in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(run, j) for j in range(len(sizes))]
        return [f.result() for f in futures]


def _check_grid(t_grid) -> np.ndarray:
    grid = np.asarray(list(t_grid), dtype=float)
    if grid.size and (np.any(grid < 0.0) or np.any(np.diff(grid) <= 0.0)):
        raise ValueError("grid points must be nonnegative and strictly increasing")
    return grid


def simulate_catastrophic(model: CatastrophicModel, cfg: SimulationConfig,
                          t_grid=()) -> CatastrophicSimulation:
    """Draw the two first interarrival times per replication and summarize min(X1, Y1)."""
    grid = _check_grid(t_grid)

    def worker(rng, size):
        x = model.proc1.sample_n(rng, size)
        y = model.proc2.sample_n(rng, size)
        first = np.minimum(x, y)
        counts = ((first[None, :] > grid[:, None]).sum(axis=1)
                  if grid.size else np.zeros(0, dtype=np.int64))
        return float(first.sum()), float((first * first).sum()), counts

    parts = _run_blocks(cfg, worker)
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    counts = sum((p[2] for p in parts), np.zeros(grid.size, dtype=np.int64))
    n = cfg.replications
    survival = tuple(
        _proportion_estimate(int(c), n, f"survival@t={t!r}")
        for t, c in zip(grid, counts))
    return CatastrophicSimulation(
        grid=tuple(float(t) for t in grid),
        survival=survival,
        fptf_mean=_mean_estimate(total, total_sq, n, "fptf_mean"))


def _extend_until(draw_cols, matrix: np.ndarray, done) -> np.ndarray:
    """Append column chunks (cumulative along axis 1) until done(matrix) is true."""
    rounds = 0
    while not done(matrix):
        rounds += 1
        if rounds > _MAX_EXTENSION_ROUNDS:
            raise RuntimeError("event horizon extension cap exceeded; "
                               "check the model's mark/interarrival scales")
        extra = draw_cols(max(4, matrix.shape[1] // 2))
        extra = matrix[:, -1:] + np.cumsum(extra, axis=1)
        matrix = np.concatenate([matrix, extra], axis=1)
    return matrix


def _cumulative_arrivals(inter: Distribution, rng, size: int, n0: int) -> np.ndarray:
    draws = inter.sample_n(rng, size * n0).reshape(size, n0)
    return np.cumsum(draws, axis=1)


def _initial_columns(target: float, per_event_mean: float) -> int:
    base = target / per_event_mean
    return int(base + 8.0 * math.sqrt(base + 1.0) + 16.0)


def _damage_paths(inter1, mag1, inter2, mag2, grid: np.ndarray, rng, size: int) -> np.ndarray:
    """Damage totals per replication at each grid time: (len(grid), size)."""
    t_max = float(grid[-1])
    out = np.zeros((grid.size, size))
    for inter, mag in ((inter1, mag1), (inter2, mag2)):
        n0 = _initial_columns(t_max, inter.mean()) if t_max > 0.0 else 4
        times = _cumulative_arrivals(inter, rng, size, n0)
        times = _extend_until(
            lambda k: inter.sample_n(rng, size * k).reshape(size, k),
            times, lambda m: m[:, -1].min() > t_max)
        n_events = times.shape[1]
        marks = mag.sample_n(rng, size * n_events).reshape(size, n_events)
        cum_marks = np.cumsum(marks, axis=1)
        counts = (times[:, :, None] <= grid[None, None, :]).sum(axis=1)  # (size, grid)
        idx = np.maximum(counts - 1, 0)
        damage = np.take_along_axis(cum_marks, idx, axis=1)
        damage[counts == 0] = 0.0
        out += damage.T
    return out


def _simulate_damage(inter1, mag1, inter2, mag2, t_grid, cfg: SimulationConfig,
                     tag: str) -> DamageSimulation:
    grid = _check_grid(t_grid)
    if not grid.size:
        raise ValueError("t_grid must contain at least one point")

    parts = _run_blocks(cfg, lambda rng, size: _damage_paths(
        inter1, mag1, inter2, mag2, grid, rng, size))
    samples = np.concatenate(parts, axis=1)  # block order
    n = cfg.replications
    means = tuple(
        _mean_estimate(float(row.sum()), float((row * row).sum()), n,
                       f"{tag}_mean@t={t!r}")
        for t, row in zip(grid, samples))
    sorted_samples = tuple(np.sort(row) for row in samples)
    return DamageSimulation(grid=tuple(float(t) for t in grid),
                            means=means, _samples=sorted_samples)


def simulate_cumulative(model: CumulativeModel, t_grid,
                        cfg: SimulationConfig) -> DamageSimulation:
    """Sum the marks of two Poisson streams over [0, t] for each grid t."""
    return _simulate_damage(Exponential(model.rate1), model.mag1,
                            Exponential(model.rate2), model.mag2,
                            t_grid, cfg, tag="damage")


def simulate_general_cumulative(model: GeneralCumulativeModel, t_grid,
                                cfg: SimulationConfig) -> DamageSimulation:
    """Renewal-arrival variant of simulate_cumulative; any sampleable interarrivals."""
    return _simulate_damage(model.inter1, model.mag1, model.inter2, model.mag2,
                            t_grid, cfg, tag="general_damage")


def _crossing_times(model: CumulativeModel, rng, size: int) -> np.ndarray:
    """First instants at which merged-stream cumulative damage exceeds the threshold."""
    threshold = model.threshold

    # Process-1 events alone must cross the threshold in every row; that both
    # guarantees a merged crossing and pins the time horizon the second
    # process has to cover.
    n1 = _initial_columns(threshold, model.mag1.mean())
    inter1 = Exponential(model.rate1)
    times1 = _cumulative_arrivals(inter1, rng, size, n1)
    marks1 = model.mag1.sample_n(rng, times1.size).reshape(size, -1)
    rounds = 0
    # The same cumulative sum decides both the extension guard and the
    # crossing index, so every row is guaranteed a detected crossing.
    while np.cumsum(marks1, axis=1)[:, -1].min() <= threshold:
        rounds += 1
        if rounds > _MAX_EXTENSION_ROUNDS:
            raise RuntimeError("event horizon extension cap exceeded")
        k = max(4, times1.shape[1] // 2)
        ext_t = times1[:, -1:] + np.cumsum(
            inter1.sample_n(rng, size * k).reshape(size, k), axis=1)
        ext_m = model.mag1.sample_n(rng, size * k).reshape(size, k)
        times1 = np.concatenate([times1, ext_t], axis=1)
        marks1 = np.concatenate([marks1, ext_m], axis=1)

    first_cross = (np.cumsum(marks1, axis=1) > threshold).argmax(axis=1)
    horizon = np.take_along_axis(times1, first_cross[:, None], axis=1).ravel()

    inter2 = Exponential(model.rate2)
    n2 = _initial_columns(float(horizon.max()), inter2.mean())
    times2 = _cumulative_arrivals(inter2, rng, size, n2)
    times2 = _extend_until(
        lambda k: inter2.sample_n(rng, size * k).reshape(size, k),
        times2, lambda m: bool(np.all(m[:, -1] > horizon)))
    marks2 = model.mag2.sample_n(rng, times2.size).reshape(size, -1)

    times = np.concatenate([times1, times2], axis=1)
    marks = np.concatenate([marks1, marks2], axis=1)
    order = np.argsort(times, axis=1)
    sorted_times = np.take_along_axis(times, order, axis=1)
    sorted_marks = np.take_along_axis(marks, order, axis=1)
    if not np.all(sorted_times[:, 1:] > sorted_times[:, :-1]):
        raise RuntimeError("tied event times in merged streams")

    cum = np.cumsum(sorted_marks, axis=1)
    if not bool(np.all(cum[:, -1] > threshold)):
        raise RuntimeError("threshold crossing missing from generated horizon")
    idx = (cum > threshold).argmax(axis=1)
    return np.take_along_axis(sorted_times, idx[:, None], axis=1).ravel()


def simulate_fptf_cumulative(model: CumulativeModel,
                             cfg: SimulationConfig) -> FptfSimulation:
    """Merge both event streams in time order and record the first threshold crossing."""
    parts = _run_blocks(cfg, lambda rng, size: _crossing_times(model, rng, size))
    times = np.concatenate(parts)
    n = cfg.replications
    est = _mean_estimate(float(times.sum()), float((times * times).sum()), n,
                         "fptf_mean")
    return FptfSimulation(mean=est, _times=np.sort(times))
