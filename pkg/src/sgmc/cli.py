"""Command-line harness: run configured sampling experiments and compare the
resulting samples against a closed-form posterior or the Metropolis oracle.

Exit codes: 0 success, 2 configuration error, 3 numeric chain failure
(partial outputs are kept).  Configuration comes from ``--demo`` presets
and/or a JSON config file; any same-named flag overrides both.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io as sample_io
from .core import RandomKey
from .diagnostics import diagnostics_summary, weighted_moments
from .errors import ChainError, ConfigurationError, IngestionError
from .models import get_model, rwmh_oracle, synth_data_generate
from .solver import SAMPLER_NAMES, build_sampler

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


@dataclass
class RunConfig:
    """Validated run description; mirrors the JSON config layout."""

    model: str = "gaussian_mean"
    model_args: dict = field(default_factory=dict)      # constructor kwargs
    true_params: dict = field(default_factory=dict)     # data-generating values
    n_obs: int = 200
    sampler: str = "sgld"
    sampler_args: dict = field(default_factory=dict)    # per-sampler knobs
    step_size_first: float | None = 0.01
    step_size_last: float | None = 0.0005
    step_size_decay: float = 0.33
    target_accept: float | None = None
    step_size_init: float | None = None
    iterations: int = 10000
    burn_in: int = 0
    selections: int | None = None
    batch_size: int = 32
    batch_strategy: str = "draw_replacement"
    cache_count: int = 1
    temperature: float = 1.0
    seed: int = 0
    chains: int = 1
    output: str = "runs/latest"
    format: str = "jsonl"

    def digest(self) -> str:
        return hashlib.sha256(
            json.dumps(asdict(self), sort_keys=True).encode()
        ).hexdigest()[:16]


DEMOS = {
    # conjugate normal-location target sampled with plain SGLD
    "gaussian": {
        "model": "gaussian_mean",
        "true_params": {"mu": 0.5},
        "n_obs": 200,
        "sampler": "sgld",
        "step_size_first": 0.01,
        "step_size_last": 0.0005,
        "step_size_decay": 0.33,
        "iterations": 100000,
        "burn_in": 20000,
        "selections": 8000,
        "batch_size": 32,
        "batch_strategy": "shuffle_in_epochs",
        "seed": 42,
    },
    # 4-weight regression with learned noise scale, pSGLD
    "regression": {
        "model": "linreg_sigma",
        "model_args": {"n_weights": 4},
        "true_params": {"w": [0.5, -1.0, 2.0, 0.25], "sigma": 0.25, "x_scale": 2.0},
        "n_obs": 256,
        "sampler": "psgld",
        "step_size_first": 0.05,
        "step_size_last": 0.001,
        "step_size_decay": 0.33,
        "iterations": 10000,
        "burn_in": 2000,
        "selections": 1000,
        "batch_size": 128,
        "batch_strategy": "shuffle_in_epochs",
        "seed": 7,
    },
    # bimodal target, replica-exchange SGLD against a tau=10 companion chain
    "mixture": {
        "model": "mixture_1d",
        "model_args": {"width": 0.7},
        "n_obs": 1,
        "sampler": "resgld",
        "sampler_args": {"tau_high": 10.0, "swap_interval": 50, "correction": 1.0,
                         "hot_step_factor": 100.0},
        "step_size_first": 3e-4,
        "step_size_last": 1.5e-4,
        "step_size_decay": 0.33,
        "iterations": 100000,
        "burn_in": 10000,
        "selections": 9000,
        "batch_size": 1,
        "seed": 3,
    },
}


def load_config(demo: str | None, config_path: str | None, overrides: dict) -> RunConfig:
    merged: dict = {}
    if demo is not None:
        if demo not in DEMOS:
            raise ConfigurationError(f"unknown demo {demo!r}", field="demo")
        merged.update(DEMOS[demo])
    if config_path is not None:
        with open(config_path, encoding="utf-8") as fh:
            merged.update(json.load(fh))
    merged.update({k: v for k, v in overrides.items() if v is not None})
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(merged) - known
    if unknown:
        raise ConfigurationError(f"unknown configuration keys {sorted(unknown)}",
                                 field=sorted(unknown)[0])
    cfg = RunConfig(**merged)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig):
    if cfg.sampler not in SAMPLER_NAMES:
        raise ConfigurationError(f"unknown sampler {cfg.sampler!r}", field="sampler")
    if cfg.iterations < 1:
        raise ConfigurationError("iterations must be >= 1", field="iterations")
    if cfg.chains < 1:
        raise ConfigurationError("chains must be >= 1", field="chains")
    if cfg.n_obs < 1:
        raise ConfigurationError("n_obs must be >= 1", field="n_obs")
    if not 0 <= cfg.burn_in <= cfg.iterations:
        raise ConfigurationError("burn_in outside [0, iterations]", field="burn_in")
    if cfg.batch_size < 1 or cfg.batch_size > cfg.n_obs:
        raise ConfigurationError("batch_size outside [1, n_obs]", field="batch_size")
    if cfg.format not in ("jsonl", "csv"):
        raise ConfigurationError(f"unknown format {cfg.format!r}", field="format")
    if cfg.selections is not None and cfg.selections > cfg.iterations - cfg.burn_in:
        raise ConfigurationError("selections exceed non-burn-in iterations",
                                 field="selections")


def _assemble(cfg: RunConfig):
    model = get_model(cfg.model, **cfg.model_args)
    dataset = synth_data_generate(model, RandomKey(cfg.seed).child(0), cfg.n_obs,
                                  cfg.true_params or None)
    bundle_cfg = {
        "model": model,
        "dataset": dataset,
        "iterations": cfg.iterations,
        "burn_in": cfg.burn_in,
        "selections": cfg.selections,
        "batch_size": cfg.batch_size,
        "batch_strategy": cfg.batch_strategy,
        "cache_count": cfg.cache_count,
        "temperature": cfg.temperature,
        "seed": cfg.seed,
        "step_size_first": cfg.step_size_first,
        "step_size_last": cfg.step_size_last,
        "step_size_decay": cfg.step_size_decay,
        "target_accept": cfg.target_accept,
        "step_size_init": cfg.step_size_init,
    }
    bundle_cfg.update(cfg.sampler_args)
    return model, dataset, build_sampler(cfg.sampler, bundle_cfg)


def _chain_summary(result) -> dict:
    variables = {}
    store = result["store"]
    flat = store.stacked()
    names = sample_io.flat_column_names(store.layout)
    for j, name in enumerate(names):
        col = flat[:, j]
        # partial stores from failed chains can hold absurd magnitudes
        usable = col.shape[0] >= 2 and np.all(np.isfinite(col)) \
            and np.abs(col).max() < 1e100
        if usable:
            variables[name] = diagnostics_summary(col)
        else:
            finite = float(col[0]) if col.size and np.isfinite(col[0]) else None
            variables[name] = {"mean": finite, "std": None, "ess": None}
    return {
        "chain_id": result["chain_id"],
        "sample_count": result["sample_count"],
        "acceptance_rate": result["acceptance_rate"],
        "runtime_s": result["runtime"],
        "gradient_evaluations": result["gradient_evaluations"],
        "variables": variables,
    }


def write_outputs(cfg: RunConfig, results: list[dict], out_dir: Path,
                  wall_time: float, error: dict | None = None) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    for result in results:
        store = result["store"]
        path = out_dir / f"samples_chain{store.chain_id}.{cfg.format}"
        sample_io.finalize_results(store, cfg.format, path)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "config": asdict(cfg),
        "config_digest": cfg.digest(),
        "sampler": cfg.sampler,
        "model": cfg.model,
        "seed": cfg.seed,
        "wall_time_s": wall_time,
        "chains": [_chain_summary(r) for r in results],
    }
    if error is not None:
        summary["error"] = error
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
    return out_dir / "summary.json"


def run_command(args) -> int:
    overrides = {
        k: getattr(args, k)
        for k in ("model", "sampler", "iterations", "burn_in", "selections",
                  "batch_size", "seed", "chains", "output", "format")
    }
    try:
        cfg = load_config(args.demo, args.config, overrides)
        model, dataset, bundle = _assemble(cfg)
    except (ConfigurationError, IngestionError, FileNotFoundError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(cfg.output)
    started = time.perf_counter()
    try:
        results = bundle.run(chains=cfg.chains, parallel=cfg.chains > 1,
                             metadata={"sampler": cfg.sampler, "seed": cfg.seed,
                                       "config_digest": cfg.digest()})
    except ChainError as exc:
        partial = [exc.partial] if exc.partial is not None else []
        write_outputs(cfg, partial, out_dir, time.perf_counter() - started,
                      error={"message": str(exc), "iteration": exc.iteration})
        print(f"chain failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    summary_path = write_outputs(cfg, results, out_dir, time.perf_counter() - started)
    total = sum(r["sample_count"] for r in results)
    print(f"collected {total} samples across {cfg.chains} chain(s) -> {summary_path}")
    return EXIT_OK


def _load_run(run_dir: Path):
    with open(run_dir / "summary.json", encoding="utf-8") as fh:
        summary = json.load(fh)
    cfg = RunConfig(**summary["config"])
    reader = sample_io.read_jsonl if cfg.format == "jsonl" else sample_io.read_csv_samples
    columns: dict[str, list[np.ndarray]] = {}
    for chain in summary["chains"]:
        path = run_dir / f"samples_chain{chain['chain_id']}.{cfg.format}"
        _, variables = reader(path)
        for name, mat in variables.items():
            columns.setdefault(name, []).append(np.atleast_2d(mat.T).T
                                                if mat.ndim == 1 else mat)
    merged = {name: np.concatenate(mats, axis=0) for name, mats in columns.items()}
    return summary, cfg, merged


def _flat_stats(samples: dict[str, np.ndarray]) -> dict[str, tuple[float, float]]:
    """mean/std per flattened coordinate, keyed like the CSV header."""
    out = {}
    for name, mat in samples.items():
        mat = np.atleast_2d(mat.T).T if mat.ndim == 1 else mat
        for j in range(mat.shape[1]):
            key = name if mat.shape[1] == 1 else f"{name}[{j}]"
            mean, var = weighted_moments(mat[:, j])
            out[key] = (mean, float(np.sqrt(var)))
    return out


def compare_command(args) -> int:
    run_dir = Path(args.run)
    try:
        summary, cfg, samples = _load_run(run_dir)
    except (FileNotFoundError, json.JSONDecodeError, TypeError) as exc:
        print(f"cannot load run artifacts: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sampler_stats = _flat_stats(samples)

    model = get_model(cfg.model, **cfg.model_args)
    dataset = synth_data_generate(model, RandomKey(cfg.seed).child(0), cfg.n_obs,
                                  cfg.true_params or None)
    if args.reference == "analytic":
        if model.analytic_posterior is None:
            print(f"model {cfg.model!r} has no analytic posterior", file=sys.stderr)
            return EXIT_CONFIG
        ref = model.analytic_posterior(dataset)
        ref_stats = {}
        for name, mean in ref["mean"].items():
            arr = np.atleast_1d(np.asarray(mean, dtype=np.float64))
            std = np.atleast_1d(np.asarray(ref["std"][name], dtype=np.float64))
            for j in range(arr.shape[0]):
                key = name if arr.shape[0] == 1 else f"{name}[{j}]"
                ref_stats[key] = (float(arr[j]), float(std[j]))
    else:
        scale = np.array([max(std, 1e-6) for _, std in sampler_stats.values()])
        scale = scale * 2.4 / np.sqrt(scale.shape[0])
        oracle = rwmh_oracle(model, dataset, model.init, scale,
                             steps=args.oracle_steps, key=RandomKey(cfg.seed).child(9))
        mat = oracle["samples"]
        names = sample_io.flat_column_names(model.layout)
        ref_stats = {
            name: (float(mat[:, j].mean()), float(mat[:, j].std(ddof=1)))
            for j, name in enumerate(names)
        }

    if set(ref_stats) != set(sampler_stats):
        print(
            f"variable mismatch: run has {sorted(sampler_stats)}, "
            f"reference has {sorted(ref_stats)}", file=sys.stderr)
        return EXIT_CONFIG

    report = {"schema_version": SCHEMA_VERSION, "reference": args.reference,
              "run": str(run_dir), "variables": {}}
    print(f"{'variable':<16}{'mean(run)':>12}{'mean(ref)':>12}"
          f"{'|dmean|/std':>14}{'std ratio':>12}")
    for name in ref_stats:
        m_s, s_s = sampler_stats[name]
        m_r, s_r = ref_stats[name]
        denom = s_r if s_r > 0 else 1.0
        disc = abs(m_s - m_r) / denom
        ratio = s_s / denom
        report["variables"][name] = {
            "mean_sampler": m_s, "std_sampler": s_s,
            "mean_reference": m_r, "std_reference": s_r,
            "mean_discrepancy": disc, "std_ratio": ratio,
        }
        print(f"{name:<16}{m_s:>12.5f}{m_r:>12.5f}{disc:>14.4f}{ratio:>12.4f}")
    report["max_mean_discrepancy"] = max(
        v["mean_discrepancy"] for v in report["variables"].values())
    out_path = Path(args.output) if args.output else run_dir / "compare_report.json"
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
    print(f"report -> {out_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgmc",
                                     description="stochastic-gradient MCMC harness")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sampling experiment")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--demo", choices=sorted(DEMOS), help="preset experiment")
    run.add_argument("--sampler", choices=SAMPLER_NAMES)
    run.add_argument("--model")
    run.add_argument("--iterations", type=int)
    run.add_argument("--burn-in", dest="burn_in", type=int)
    run.add_argument("--selections", type=int)
    run.add_argument("--batch-size", dest="batch_size", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--chains", type=int)
    run.add_argument("--output")
    run.add_argument("--format", choices=("jsonl", "csv"))
    run.set_defaults(fn=run_command)

    cmp_ = sub.add_parser("compare", help="compare a run against a reference")
    cmp_.add_argument("--run", required=True, help="run output directory")
    cmp_.add_argument("--reference", choices=("analytic", "rwmh"), default="rwmh")
    cmp_.add_argument("--oracle-steps", dest="oracle_steps", type=int, default=200000)
    cmp_.add_argument("--output", help="report path (default: <run>/compare_report.json)")
    cmp_.set_defaults(fn=compare_command)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
