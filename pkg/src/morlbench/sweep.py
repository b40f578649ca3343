"""Outer-loop multi-policy protocol: weight grids, periodic greedy
evaluation, pooled per-iteration Pareto approximation sets, seed averaging.

One sweep trains every weight configuration (or a single Pareto Q-Learning
run, which needs no weights) for each seed, evaluates every
``eval_interval`` steps, pools the evaluated returns of one iteration into
a non-dominated approximation set, scores that set with the quality
indicators, and averages the indicator timelines pointwise across seeds.

Approximation sets are snapshots by default: a solution present at one
iteration can vanish from the next if its configuration drifted away. That
non-retention is the phenomenon under study, so pooling deliberately keeps
no memory; ``archive=True`` switches to cumulative pooling for contrast
experiments.

Configurations x seeds are independent work items and can run on a process
pool; results are reduced in a fixed order, so outputs are byte-identical
regardless of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import moq, pql
from .envs import REFERENCE_POINTS, DeepSeaTreasure, make_env
from .moq import EpsilonSchedule, MoqConfig
from .pareto import (
    ParetoArchive,
    Point,
    cardinality,
    hypervolume,
    igd,
    nondominated_filter,
    sparsity,
)
from .pql import PqlConfig

ALGOS = ("moq", "pql")


@dataclass(frozen=True)
class SweepConfig:
    env_id: str
    algo: str = "moq"
    scalariser: str = "linear"
    weight_step: float = 0.1
    fixed_weights: tuple[tuple[float, ...], ...] | None = None
    alpha: float = 0.1
    gamma: float = 0.9
    tau: float = 4.0
    total_timesteps: int = 400_000
    eps_initial: float = 1.0
    eps_final: float = 0.1
    eps_decay_fraction: float = 1.0
    eval_interval: int = 1000
    seeds: tuple[int, ...] = (42,)
    ref_point: tuple[float, ...] | None = None
    set_eval: str = "hypervolume"
    state_cap: int = 200_000
    max_episode_steps: int = 1000
    archive: bool = False
    max_configs: int | None = None
    workers: int = 1
    name: str | None = None

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ValueError(f"unknown algorithm {self.algo!r}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if any(s < 0 for s in self.seeds):
            raise ValueError("seeds must be non-negative")
        if self.eval_interval < 1:
            raise ValueError("eval_interval must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def algorithm_label(self) -> str:
        return f"moq-{self.scalariser}" if self.algo == "moq" else "pql"

    @property
    def run_name(self) -> str:
        return self.name or f"{self.env_id}_{self.algorithm_label.replace('-', '_')}"

    def schedule(self) -> EpsilonSchedule:
        return EpsilonSchedule(self.eps_initial, self.eps_final, self.eps_decay_fraction)


@dataclass(frozen=True)
class MetricRecord:
    timestep: int
    hypervolume: float
    sparsity: float
    cardinality: float
    igd: float | None = None


@dataclass
class SeedRun:
    seed: int
    records: list[MetricRecord]
    archives: list[tuple[int, ParetoArchive]]
    final_returns: tuple[Point, ...]

    @property
    def final_front(self) -> ParetoArchive:
        if not self.archives:
            raise ValueError("run produced no evaluation iterations")
        return self.archives[-1][1]


@dataclass
class SweepResult:
    config: SweepConfig
    environment: str
    algorithm: str
    n_configs: int
    ref_point: tuple[float, ...]
    truth: ParetoArchive | None
    runs: list[SeedRun]
    mean: list[MetricRecord]
    sd: list[MetricRecord]


def weight_grid(num_objectives: int, step: float = 0.1) -> list[tuple[float, ...]]:
    """Every weight vector of non-negative multiples of ``step`` summing
    to 1, in lexicographic order.

    ``step`` must divide 1 evenly (within 1e-9). Two objectives at step 0.1
    give 11 vectors, three give 66.
    """
    if not 0.0 < step <= 1.0:
        raise ValueError(f"step must be in (0, 1], got {step}")
    n = round(1.0 / step)
    if abs(n * step - 1.0) > 1e-9:
        raise ValueError(f"step {step} does not divide 1")

    def compositions(total: int, parts: int):
        if parts == 1:
            yield (total,)
            return
        for head in range(total + 1):
            for rest in compositions(total - head, parts - 1):
                yield (head, *rest)

    return [tuple(i / n for i in combo) for combo in compositions(n, num_objectives)]


def evaluate_policy(env, agent, gamma: float, max_steps: int | None = None, rng=None) -> Point:
    """Discounted return vector of one greedy rollout from reset.

    The rollout is truncated at ``max_steps`` (defaults to the
    environment's episode cap); a non-terminating greedy policy simply
    yields its truncated return.
    """
    limit = max_steps if max_steps is not None else env.max_episode_steps
    state = env.reset()
    returns = [0.0] * env.num_objectives
    discount = 1.0
    for _ in range(limit):
        outcome = env.step(agent.greedy(state, rng=rng))
        for o, r_o in enumerate(outcome.reward):
            returns[o] += discount * r_o
        discount *= gamma
        if outcome.terminated or outcome.truncated:
            break
        state = outcome.next_state
    return tuple(returns)


def aggregate_seeds(
    per_seed: list[list[MetricRecord]],
) -> tuple[list[MetricRecord], list[MetricRecord]]:
    """Pointwise mean and population standard deviation across seeds.

    All timelines must be aligned on identical timesteps.
    """
    if not per_seed:
        raise ValueError("no timelines to aggregate")
    length = len(per_seed[0])
    if any(len(tl) != length for tl in per_seed):
        raise ValueError("timelines have different lengths")
    mean_records: list[MetricRecord] = []
    sd_records: list[MetricRecord] = []
    n = len(per_seed)
    for k in range(length):
        rows = [tl[k] for tl in per_seed]
        t = rows[0].timestep
        if any(r.timestep != t for r in rows):
            raise ValueError(f"misaligned timesteps at index {k}")
        igd_defined = [r.igd is not None for r in rows]
        if any(igd_defined) and not all(igd_defined):
            raise ValueError(f"igd defined for only some seeds at t={t}")

        def stats(values):
            mu = sum(values) / n
            var = sum((v - mu) ** 2 for v in values) / n
            return mu, math.sqrt(var)

        hv_m, hv_s = stats([r.hypervolume for r in rows])
        sp_m, sp_s = stats([r.sparsity for r in rows])
        ca_m, ca_s = stats([r.cardinality for r in rows])
        if all(igd_defined):
            ig_m, ig_s = stats([r.igd for r in rows])
        else:
            ig_m = ig_s = None
        mean_records.append(MetricRecord(t, hv_m, sp_m, ca_m, ig_m))
        sd_records.append(MetricRecord(t, hv_s, sp_s, ca_s, ig_s))
    return mean_records, sd_records


def _substream_seed(trial_seed: int, config_index: int) -> int:
    ss = np.random.SeedSequence(trial_seed, spawn_key=(config_index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _moq_item(cfg: SweepConfig, weights: tuple[float, ...], sub_seed: int):
    env = make_env(cfg.env_id, cfg.max_episode_steps)
    config = MoqConfig(
        weights=weights,
        scalariser=cfg.scalariser,
        alpha=cfg.alpha,
        gamma=cfg.gamma,
        tau=cfg.tau,
        total_timesteps=cfg.total_timesteps,
        schedule=cfg.schedule(),
    )
    _, timeline = moq.train(env, config, sub_seed, cfg.eval_interval)
    return timeline


def _pql_item(cfg: SweepConfig, sub_seed: int):
    env = make_env(cfg.env_id, cfg.max_episode_steps)
    ref = cfg.ref_point if cfg.ref_point is not None else REFERENCE_POINTS.get(cfg.env_id)
    config = PqlConfig(
        gamma=cfg.gamma,
        total_timesteps=cfg.total_timesteps,
        set_eval=cfg.set_eval,
        ref_point=ref if cfg.set_eval == "hypervolume" else None,
        schedule=cfg.schedule(),
        state_cap=cfg.state_cap,
    )
    _, timeline = pql.train(env, config, sub_seed, cfg.eval_interval)
    return [(t, front.points) for t, front in timeline]


def _run_items(cfg: SweepConfig, items: list[tuple]):
    """Execute (fn, args...) work items; returns results in item order."""
    if cfg.workers <= 1 or len(items) <= 1:
        return [fn(*args) for fn, *args in items]
    with ProcessPoolExecutor(max_workers=min(cfg.workers, len(items))) as pool:
        futures = [pool.submit(fn, *args) for fn, *args in items]
        return [f.result() for f in futures]


def _metric_record(t: int, front: ParetoArchive, ref, truth) -> MetricRecord:
    return MetricRecord(
        timestep=t,
        hypervolume=hypervolume(front, ref),
        sparsity=sparsity(front),
        cardinality=float(cardinality(front)),
        igd=igd(front, truth) if truth is not None else None,
    )


def _pool_timeline(cfg: SweepConfig, per_iteration: list[tuple[int, list[Point]]], ref, truth):
    records: list[MetricRecord] = []
    archives: list[tuple[int, ParetoArchive]] = []
    cumulative: list[Point] = []
    for t, points in per_iteration:
        if cfg.archive:
            cumulative.extend(points)
            front = nondominated_filter(cumulative)
        else:
            front = nondominated_filter(points)
        records.append(_metric_record(t, front, ref, truth))
        archives.append((t, front))
    return records, archives


def resolve_weights(cfg: SweepConfig, num_objectives: int) -> tuple[tuple[float, ...], ...]:
    if cfg.fixed_weights is not None:
        return cfg.fixed_weights
    grid = weight_grid(num_objectives, cfg.weight_step)
    if cfg.max_configs is not None:
        grid = grid[: cfg.max_configs]
    return tuple(grid)


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Run the full outer-loop protocol and aggregate metrics over seeds.

    Incompatible algorithm/environment pairs (the Pareto Q-Learning
    capacity cap) abort before any training starts.
    """
    env = make_env(cfg.env_id, cfg.max_episode_steps)
    ref = cfg.ref_point if cfg.ref_point is not None else REFERENCE_POINTS[cfg.env_id]
    truth = env.true_front(cfg.gamma) if isinstance(env, DeepSeaTreasure) else None

    if cfg.algo == "pql":
        # Fail loudly before spending any compute.
        pql.PqlAgent(env.spec, PqlConfig(state_cap=cfg.state_cap, ref_point=tuple(ref)), moq.derive_streams(0, 1)[0])
        items = [(_pql_item, cfg, seed) for seed in cfg.seeds]
        outputs = _run_items(cfg, items)
        runs = []
        for seed, timeline in zip(cfg.seeds, outputs):
            per_iter = [(t, list(points)) for t, points in timeline]
            records, archives = _pool_timeline(cfg, per_iter, ref, truth)
            final = archives[-1][1].points if archives else ()
            runs.append(SeedRun(seed, records, archives, final))
        n_configs = 1
    else:
        weights = resolve_weights(cfg, env.num_objectives)
        items = [
            (_moq_item, cfg, w, _substream_seed(seed, i))
            for seed in cfg.seeds
            for i, w in enumerate(weights)
        ]
        outputs = _run_items(cfg, items)
        runs = []
        n_configs = len(weights)
        for s_idx, seed in enumerate(cfg.seeds):
            timelines = outputs[s_idx * n_configs : (s_idx + 1) * n_configs]
            lengths = {len(tl) for tl in timelines}
            if len(lengths) != 1:
                raise RuntimeError("configurations evaluated at different cadences")
            per_iter = []
            for k in range(lengths.pop()):
                t = timelines[0][k][0]
                per_iter.append((t, [tl[k][1] for tl in timelines]))
            records, archives = _pool_timeline(cfg, per_iter, ref, truth)
            final_returns = tuple(tl[-1][1] for tl in timelines) if per_iter else ()
            runs.append(SeedRun(seed, records, archives, final_returns))

    mean, sd = aggregate_seeds([run.records for run in runs])
    return SweepResult(
        config=cfg,
        environment=cfg.env_id,
        algorithm=cfg.algorithm_label,
        n_configs=n_configs,
        ref_point=tuple(ref),
        truth=truth,
        runs=runs,
        mean=mean,
        sd=sd,
    )


def single_run_config(cfg: SweepConfig, weights: tuple[float, ...] | None, seed: int) -> SweepConfig:
    """Narrow a sweep config to one configuration and one seed (CLI train)."""
    fixed = (weights,) if (weights is not None and cfg.algo == "moq") else cfg.fixed_weights
    return replace(cfg, fixed_weights=fixed, seeds=(seed,), workers=1)
