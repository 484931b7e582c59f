"""Command-line entry points: cold start, both search modes, sharpness demo.

Each invocation makes a fresh run directory under the configured output
root, named by wall-clock timestamp plus seed, and only ever adds files —
nothing is overwritten.  Artifact contents carry no timestamps, so the
same config, seed, and scripted provider reproduce byte-identical files.

Exit codes: 0 success, 1 runtime failure, 2 config or validation failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

from ..mcts import SearchConfig, search
from ..policy import ProviderError, synthesize_knowledge
from ..ruledsl import RuleSet, ground_rules, load_ruleset, save_ruleset
from ..tasks import (
    PROPERTIES,
    OptimizationTask,
    PredictionTask,
    TaskSpec,
    improvement_stats,
    initial_features_from_rules,
    load_dataset,
    split_dataset,
)
from ..theory import (
    clamped_fit,
    error_lower_bound_check,
    exhaustive_convergence_check,
    find_cliffs,
    load_space,
    local_lipschitz,
    random_cliff_space,
    save_space,
)
from .config import PROVIDER_NAMES, ConfigError, RunConfig, build_provider, load_config

logger = logging.getLogger(__name__)

__all__ = ["main", "cmd_coldstart", "cmd_optimize", "cmd_predict", "cmd_cliff"]

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


# ----------------------------------------------------------------- plumbing

def _make_run_dir(out_root: Path, seed: int) -> Path:
    """Fresh directory named by timestamp and seed; never reuses one."""
    stamp = time.strftime("%Y%m%d-%H%M%S")
    base = out_root / f"{stamp}-seed{seed}"
    candidate, n = base, 1
    while candidate.exists():
        n += 1
        candidate = base.with_name(f"{base.name}-{n}")
    candidate.mkdir(parents=True)
    return candidate


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _write_csv(path: Path, header: list, rows: list) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _search_config(config: RunConfig, kind: str) -> SearchConfig:
    settings = dict(config.search)
    settings.pop("seed", None)  # the top-level seed is the only seed
    settings.pop("max_retries", None)
    try:
        return SearchConfig.for_kind(kind, seed=config.seed, **settings)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad search settings: {exc}") from exc


def _load_rules(config: RunConfig) -> RuleSet:
    if config.ruleset is None:
        return RuleSet()
    return load_ruleset(config.ruleset)


class _TaskBrief:
    """Minimal task handle for knowledge synthesis: kind + objective only."""

    def __init__(self, task_cfg: dict):
        self.kind = str(task_cfg.get("kind", "unknown"))
        objective = task_cfg.get("objective") or task_cfg.get("metric")
        if objective:
            self.objective = str(objective)


# ----------------------------------------------------------------- commands

def cmd_coldstart(config: RunConfig) -> int:
    """Synthesize knowledge sentences, ground them, persist the rule set."""
    provider = build_provider(config)
    retries = int(config.provider.get("max_retries", 3))
    try:
        sentences = synthesize_knowledge(_TaskBrief(config.task), provider)
    except ProviderError as exc:
        print(f"cold start produced no rules: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    rules, traces = ground_rules(sentences, provider, max_retries=retries)
    if len(rules) == 0:
        print(
            "cold start produced no rules: every sentence failed grounding",
            file=sys.stderr,
        )
        return EXIT_RUNTIME

    run_dir = _make_run_dir(config.out, config.seed)
    save_ruleset(rules, run_dir / "ruleset.json")
    dropped = len(sentences) - len(rules)
    _write_json(run_dir / "coldstart_summary.json", {
        "sentences": len(sentences),
        "accepted": len(rules),
        "dropped": dropped,
        "retries": {rule.id: rule.retries for rule in rules},
        "failures": [
            {"rule_id": t.rule_id, "phase": t.phase, "message": t.message}
            for t in traces
        ],
    })
    if dropped:
        print(f"warning: {dropped} sentence(s) never grounded", file=sys.stderr)
    print(f"accepted {len(rules)}/{len(sentences)} rules")
    print(f"run directory: {run_dir}")
    return EXIT_OK


def _read_start_set(path: Path) -> list:
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "smiles" not in reader.fieldnames:
            raise ValueError(f"start set {path} needs a smiles column")
        starts = [row["smiles"].strip() for row in reader if row["smiles"].strip()]
    if not starts:
        raise ValueError(f"start set {path} is empty")
    return starts


def cmd_optimize(config: RunConfig) -> int:
    """Run the structure search once per start molecule and aggregate."""
    if config.dataset is None:
        raise ConfigError("optimization needs a dataset: the start molecule CSV")
    objective = config.task.get("objective")
    if objective not in PROPERTIES:
        raise ConfigError(f"objective must be one of {PROPERTIES}, got {objective!r}")
    starts = _read_start_set(config.dataset)
    rules = _load_rules(config)
    provider = build_provider(config)
    engine_cfg = _search_config(config, "optimization")
    run_dir = _make_run_dir(config.out, config.seed)

    rows, runs, failures = [], [], 0
    for index, smiles in enumerate(starts):
        try:
            task = OptimizationTask(TaskSpec(
                kind="optimization", objective=objective, start_smiles=smiles,
                lam=engine_cfg.lam, gamma=engine_cfg.gamma,
            ))
            best, trace = search(task, provider, rules, engine_cfg)
            start_value = task.task_term(task.initial_state())
            best_value = task.task_term(best)
            valid = trace.header["best_node"] is not None
            trace.save(run_dir / f"trace_{index:03d}.json")
            runs.append((start_value, best_value, valid))
            rows.append([
                smiles, best.smiles, f"{start_value:.6f}", f"{best_value:.6f}",
                f"{best_value - start_value:.6f}", "valid" if valid else "invalid",
            ])
        except Exception as exc:  # noqa: BLE001 - one bad run must not stop the rest
            logger.warning("run %d (%s) failed: %s", index, smiles, exc)
            failures += 1
            rows.append([smiles, "", "", "", "", f"error: {exc}"])

    _write_csv(
        run_dir / "results.csv",
        ["start_smiles", "best_smiles", "start_value", "best_value", "delta", "status"],
        rows,
    )
    report = {
        "task": dict(config.task),
        "search": engine_cfg.as_dict(),
        "provider": provider.provider_id,
        "runs": len(starts),
        "failures": failures,
    }
    if runs:
        delta, sr = improvement_stats(runs)
        report["delta"] = delta
        report["success_rate"] = sr
        print(f"delta = {delta:.4f}   success rate = {sr:.1f}%")
    _write_json(run_dir / "report.json", report)
    print(f"run directory: {run_dir}")
    return EXIT_OK if failures == 0 and runs else EXIT_RUNTIME


def _trajectory(trace, metric: str) -> list:
    """Per-iteration best validation value, in metric units, from a trace."""
    per_iteration: dict[int, float] = {}
    for node in trace.nodes:
        reward = node["reward"]
        if not reward or not reward["valid"]:
            continue
        iteration = node["iteration"] or 0
        term = reward["task_term"]
        if iteration not in per_iteration or term > per_iteration[iteration]:
            per_iteration[iteration] = term
    rows, best = [], None
    last = trace.header["iterations_run"]
    for iteration in range(0, last + 1):
        if iteration in per_iteration:
            candidate = per_iteration[iteration]
            best = candidate if best is None or candidate > best else best
        if best is not None:
            value = -best if metric == "rmse" else best
            rows.append([iteration, f"{value:.6f}"])
    return rows


def cmd_predict(config: RunConfig) -> int:
    """Feature-evolution search scored on validation; one test read at the end."""
    if config.dataset is None:
        raise ConfigError("prediction needs a dataset: the labeled molecule CSV")
    dataset = split_dataset(load_dataset(config.dataset), seed=config.seed)
    rules = _load_rules(config)
    task_cfg = config.task
    features = tuple(task_cfg.get("initial_features", ()))
    if not features:
        features = initial_features_from_rules(
            rules, cap=int(task_cfg.get("feature_cap", 20))
        )
    if not features:
        features = ("molecular_weight",)
    engine_cfg = _search_config(config, "prediction")
    try:
        spec = TaskSpec(
            kind="prediction",
            metric=task_cfg.get("metric", "rmse"),
            evaluator=task_cfg.get("evaluator", "ridge"),
            dataset=dataset,
            lam=engine_cfg.lam,
            gamma=engine_cfg.gamma,
            feature_cap=int(task_cfg.get("feature_cap", 20)),
            ridge_reg=float(task_cfg.get("ridge_reg", 1e-3)),
            tree_depth=int(task_cfg.get("tree_depth", 4)),
            test_bonus_weight=float(task_cfg.get("test_bonus_weight", 0.0)),
        )
        task = PredictionTask(spec, features)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    provider = build_provider(config)

    metric = spec.metric
    baseline = task.task_term(task.initial_state())
    best, trace = search(task, provider, rules, engine_cfg)
    final_validation = task.task_term(best)
    closing = task.finalize(best)

    run_dir = _make_run_dir(config.out, config.seed)
    trace.save(run_dir / "trace.json")
    _write_csv(
        run_dir / "trajectory.csv",
        ["iteration", f"best_validation_{metric}"],
        _trajectory(trace, metric),
    )
    as_metric = (lambda term: -term) if metric == "rmse" else (lambda term: term)
    report = {
        "task": dict(task_cfg),
        "search": engine_cfg.as_dict(),
        "provider": provider.provider_id,
        "metric": metric,
        "initial_features": list(features),
        "baseline_validation": as_metric(baseline),
        "final_validation": as_metric(final_validation),
        "test_value": closing["test_value"],
        "features": closing["features"],
        "iterations_run": trace.header["iterations_run"],
        "truncated": trace.header["truncated"],
    }
    _write_json(run_dir / "report.json", report)
    print(
        f"validation {metric}: {as_metric(baseline):.4f} -> "
        f"{as_metric(final_validation):.4f}   test {metric}: "
        f"{closing['test_value']:.4f}   features: {len(closing['features'])}"
    )
    print(f"run directory: {run_dir}")
    return EXIT_OK


def cmd_cliff(args: argparse.Namespace) -> int:
    """Sharpness report: cliff census, forced-error table, convergence."""
    if args.space:
        try:
            space = load_space(args.space)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            print(f"config error: bad space file: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        space = random_cliff_space(args.seed, n_points=40, extra_edges=15)

    run_dir = _make_run_dir(Path(args.out), args.seed)
    if not args.space:
        save_space(space, run_dir / "space.json")

    cliffs = find_cliffs(space, args.threshold)
    rows, all_hold = [], True
    checks = [(x, args.kappa) for x in cliffs]
    if cliffs:
        # One cap-equals-jump row: the forced error degenerates to zero.
        first = cliffs[0]
        checks.append((first, local_lipschitz(space.f_star, first, space)))
    for x, kappa in checks:
        result = error_lower_bound_check(space, clamped_fit(space, x, kappa), x)
        all_hold = all_hold and result.holds
        rows.append([
            x, f"{kappa:.6f}", f"{result.bound:.6f}",
            f"{result.observed:.6f}", "yes" if result.holds else "NO",
        ])

    print(f"{len(space)} points, {len(cliffs)} cliffs at threshold {args.threshold}")
    print(f"{'point':<8} {'cap':>10} {'bound':>10} {'observed':>10}  holds")
    for row in rows:
        print(f"{row[0]:<8} {row[1]:>10} {row[2]:>10} {row[3]:>10}  {row[4]}")

    budget = 10 * len(space)
    converged = exhaustive_convergence_check(space, budget, seed=args.seed)
    print(f"convergence with budget {budget}: {'yes' if converged else 'NO'}")

    _write_csv(
        run_dir / "report.csv",
        ["point", "cap", "bound", "observed", "holds"],
        rows,
    )
    _write_json(run_dir / "summary.json", {
        "points": len(space),
        "cliffs": len(cliffs),
        "threshold": args.threshold,
        "kappa": args.kappa,
        "all_hold": all_hold,
        "convergence_budget": budget,
        "converged": converged,
    })
    print(f"run directory: {run_dir}")
    return EXIT_OK if all_hold and converged else EXIT_RUNTIME


# --------------------------------------------------------------- entry point

def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="run config JSON")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument(
        "--provider", choices=PROVIDER_NAMES, help="override the provider"
    )
    parser.add_argument("--out", help="override the output root directory")


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = argparse.ArgumentParser(
        prog="molsearch",
        description="Rule-guided tree search over molecules, plus its analysis tools.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for name, text in (
        ("coldstart", "synthesize and ground a rule set"),
        ("optimize", "search structures from each start molecule"),
        ("predict", "evolve a descriptor feature set for property prediction"),
    ):
        _add_config_flags(commands.add_parser(name, help=text))

    cliff = commands.add_parser("cliff", help="sharpness and convergence report")
    cliff.add_argument("--space", help="space document to analyze")
    cliff.add_argument("--demo", action="store_true", help="generate a demo landscape")
    cliff.add_argument("--seed", type=int, default=0)
    cliff.add_argument("--out", default="runs")
    cliff.add_argument("--threshold", type=float, default=2.0, help="cliff jump size")
    cliff.add_argument("--kappa", type=float, default=0.1, help="smooth-fit cap")

    args = parser.parse_args(argv)
    if args.command == "cliff":
        if not args.space and not args.demo:
            print("config error: cliff needs --space PATH or --demo", file=sys.stderr)
            return EXIT_CONFIG
        return cmd_cliff(args)

    try:
        config = load_config(
            args.config, seed=args.seed, provider=args.provider, out=args.out
        )
        handler = {
            "coldstart": cmd_coldstart,
            "optimize": cmd_optimize,
            "predict": cmd_predict,
        }[args.command]
        return handler(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProviderError as exc:
        print(f"provider failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, OSError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
