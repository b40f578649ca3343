"""Command-line entry points: train, sweep, metrics, plotdata.

Configuration can come from flags, from an INI-style config file
(``key = value`` under ``[env]``, ``[agent]`` and ``[sweep]`` sections,
``#`` comments), or both, with flags taking precedence. Per-environment
presets fill in the published step budgets, discounts and tau values when
nothing else is specified.

Exit codes: 0 success, 1 unexpected runtime failure, 2 usage/config errors
(including the Pareto Q-Learning capacity refusal, which aborts before any
training).
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from .envs import ENV_IDS
from .pareto import cardinality, hypervolume, igd, load_points, sparsity
from .pql import SET_EVAL_MODES, CapacityError
from .results import fmt, results_root, write_plotdata, write_sweep
from .scalarise import SCALARISERS
from .sweep import SweepConfig, run_sweep

# Published per-environment settings; overridable by config file or flags.
ENV_PRESETS: dict[str, dict] = {
    "dst-concave": {"total_timesteps": 400_000, "gamma": 0.9, "tau": 4.0},
    "four-room": {"total_timesteps": 800_000, "gamma": 0.99, "tau": 6.0},
}

_FLOATS = ("alpha", "gamma", "tau", "eps_initial", "eps_final", "eps_decay_fraction", "weight_step")
_INTS = ("total_timesteps", "eval_interval", "state_cap", "max_episode_steps", "workers", "max_configs", "seed")


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_seeds(text: str) -> tuple[int, ...]:
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, _, hi = part.partition("..")
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise ValueError(f"no seeds in {text!r}")
    return tuple(seeds)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _load_config_file(path: str) -> dict[str, str]:
    """Flatten [env]/[agent]/[sweep] sections into one key -> raw-text map."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    flat: dict[str, str] = {}
    for section in ("env", "agent", "sweep"):
        if parser.has_section(section):
            for key, value in parser.items(section):
                flat["env_id" if (section, key) == ("env", "id") else key] = value
    return flat


def _coerce(key: str, value):
    if not isinstance(value, str):
        return value
    if key in _FLOATS:
        return float(value)
    if key in _INTS:
        return int(value)
    if key == "seeds":
        return _parse_seeds(value)
    if key == "archive":
        return _parse_bool(value)
    if key in ("weights", "ref_point"):
        return _parse_floats(value)
    return value


def _resolve_settings(args: argparse.Namespace) -> dict:
    """Merge env presets < config file < explicit flags into one dict."""
    settings: dict = {}
    if getattr(args, "config", None):
        for key, value in _load_config_file(args.config).items():
            settings[key] = _coerce(key, value)
    for key, value in vars(args).items():
        if key in ("func", "command", "config", "out", "front", "truth", "ref", "run_dir"):
            continue
        if value is not None:
            settings[key] = _coerce(key, value)
    env_id = settings.get("env_id")
    if not env_id:
        raise ValueError("an environment is required: pass --env or [env] id in --config")
    if env_id not in ENV_IDS:
        raise ValueError(f"unknown environment {env_id!r} (known: {', '.join(ENV_IDS)})")
    for key, value in ENV_PRESETS[env_id].items():
        settings.setdefault(key, value)
    return settings


def _sweep_config(settings: dict, *, single_seed: bool) -> SweepConfig:
    seed = settings.pop("seed", None)
    weights = settings.pop("weights", None)
    if single_seed:
        settings["seeds"] = (seed if seed is not None else 42,)
        settings["workers"] = 1
        if settings.get("algo", "moq") == "moq":
            if weights is None:
                raise ValueError("train needs --weights for MO Q-Learning (e.g. --weights 0.5,0.5)")
            settings["fixed_weights"] = (weights,)
    known = SweepConfig.__dataclass_fields__
    unknown = [k for k in settings if k not in known]
    if unknown:
        raise ValueError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    return SweepConfig(**settings)


def _print_summary(result, run_dir: Path) -> None:
    last = result.mean[-1] if result.mean else None
    print(f"run: {run_dir}")
    print(f"algorithm: {result.algorithm}  environment: {result.environment}  configs: {result.n_configs}")
    if last is not None:
        igd_text = "" if last.igd is None else f"  igd={fmt(last.igd)}"
        print(
            f"final (t={last.timestep}): hypervolume={fmt(last.hypervolume)}  "
            f"sparsity={fmt(last.sparsity)}  cardinality={fmt(last.cardinality)}{igd_text}"
        )


def cmd_train(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    cfg = _sweep_config(settings, single_seed=True)
    result = run_sweep(cfg)
    run_dir = write_sweep(result, results_root(args.out))
    _print_summary(result, run_dir)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    cfg = _sweep_config(settings, single_seed=False)
    result = run_sweep(cfg)
    run_dir = write_sweep(result, results_root(args.out))
    _print_summary(result, run_dir)
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    front = load_points(args.front)
    ref = _parse_floats(args.ref)
    print(f"hypervolume = {fmt(hypervolume(front, ref))}")
    print(f"cardinality = {cardinality(front)}")
    print(f"sparsity = {fmt(sparsity(front))}")
    if args.truth:
        truth = load_points(args.truth)
        print(f"igd = {fmt(igd(front, truth))}")
    return 0


def cmd_plotdata(args: argparse.Namespace) -> int:
    for path in write_plotdata(Path(args.run_dir)):
        print(path)
    return 0


def _add_agent_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--env", dest="env_id", choices=ENV_IDS, help="environment id")
    p.add_argument("--algo", choices=("moq", "pql"), help="algorithm (default moq)")
    p.add_argument("--scalariser", choices=SCALARISERS, help="MO Q-Learning scalariser")
    p.add_argument("--alpha", type=float, help="learning rate")
    p.add_argument("--gamma", type=float, help="discount factor")
    p.add_argument("--tau", type=float, help="Chebyshev utopian offset")
    p.add_argument("--steps", dest="total_timesteps", type=int, help="training timesteps")
    p.add_argument("--eps-initial", dest="eps_initial", type=float)
    p.add_argument("--eps-final", dest="eps_final", type=float)
    p.add_argument("--eps-decay-fraction", dest="eps_decay_fraction", type=float)
    p.add_argument("--eval-interval", dest="eval_interval", type=int)
    p.add_argument("--set-eval", dest="set_eval", choices=SET_EVAL_MODES, help="PQL action-set score")
    p.add_argument("--ref-point", dest="ref_point", help="metric reference point, e.g. '0,-50'")
    p.add_argument("--state-cap", dest="state_cap", type=int, help="PQL state-action pair cap")
    p.add_argument("--max-episode-steps", dest="max_episode_steps", type=int)
    p.add_argument("--name", help="run directory name")
    p.add_argument("--out", help="results root (default $MORL_RESULTS_DIR or ./runs)")
    p.add_argument("--config", help="INI config file with [env]/[agent]/[sweep] sections")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morlbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a single configuration")
    _add_agent_options(p_train)
    p_train.add_argument("--weights", help="weight vector for MO Q-Learning, e.g. '0.5,0.5'")
    p_train.add_argument("--seed", type=int, help="run seed (default 42)")
    p_train.set_defaults(func=cmd_train)

    p_sweep = sub.add_parser("sweep", help="run the outer-loop protocol over the weight grid")
    _add_agent_options(p_sweep)
    p_sweep.add_argument("--weight-step", dest="weight_step", type=float, help="weight grid step (default 0.1)")
    p_sweep.add_argument("--seeds", help="seed list, e.g. '42..51' or '42,43,44'")
    p_sweep.add_argument("--workers", type=int, help="parallel work items")
    p_sweep.add_argument("--archive", action="store_const", const=True, help="cumulative approximation sets")
    p_sweep.add_argument("--max-configs", dest="max_configs", type=int, help="truncate the weight grid")
    p_sweep.set_defaults(func=cmd_sweep)

    p_metrics = sub.add_parser("metrics", help="score a point-set file")
    p_metrics.add_argument("front", help="point-set file to score")
    p_metrics.add_argument("--truth", help="true-front point-set file (enables IGD)")
    p_metrics.add_argument("--ref", required=True, help="reference point, e.g. '0,-50'")
    p_metrics.set_defaults(func=cmd_metrics)

    p_plot = sub.add_parser("plotdata", help="emit plot-ready CSV curves for a run directory")
    p_plot.add_argument("run_dir")
    p_plot.set_defaults(func=cmd_plotdata)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - unexpected runtime failure
        print(f"error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
