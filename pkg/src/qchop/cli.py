"""Experiment runner: generate or load instances, sweep algorithms, emit CSV/JSON.

``qchop run`` executes every (instance, algorithm, runtime) combination,
writing one CSV of checkpoint metrics per run and a JSON summary with final
values, aggregates, and the full configuration echo needed to reproduce the
sweep byte for byte.  ``qchop compare`` pairs two summaries instance by
instance and reports performance deltas.

Exit codes: 0 full success, 1 configuration error, 2 partial (some runs
failed).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .evolve import sweep
from .problems import (
    InstanceRejected,
    ParseError,
    gen_auction_instance,
    gen_dmds_instance,
    gen_etf_instance,
    gen_knapsack_instance,
    gen_mis_instance,
    load_instance,
)

GENERATORS = {
    "mis": gen_mis_instance,
    "dmds": gen_dmds_instance,
    "knapsack": gen_knapsack_instance,
    "auction": gen_auction_instance,
    "etf": gen_etf_instance,
}
ALGORITHMS = ("qchop", "qchop-cd", "saa")


class ConfigurationError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would sys.exit(2); route flag mistakes to exit code 1 instead
    def error(self, message):
        raise ConfigurationError(message)


@dataclass
class RunConfig:
    problem: str | None = None
    n: int | None = None
    instances: int = 1
    seed: int = 0
    edge_probability: float = 0.3
    instance_files: list[str] = field(default_factory=list)
    algorithms: list[str] = field(default_factory=lambda: ["qchop"])
    runtimes: list[str] = field(default_factory=lambda: ["2piN2"])
    lam: float | None = None
    epsilon: float | None = None
    checkpoints: int = 101
    rtol: float = 1e-9
    atol: float = 1e-9
    out: str = "results"

    def validate(self):
        if not self.instance_files:
            if self.problem is None or self.n is None:
                raise ConfigurationError("either --instance-file or both --problem and --n required")
            if self.problem not in GENERATORS:
                raise ConfigurationError(f"unknown problem kind {self.problem!r}")
            if self.n < 1:
                raise ConfigurationError("--n must be positive")
            if self.instances < 1:
                raise ConfigurationError("--instances must be positive")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigurationError(f"unknown algorithm {a!r}; choose from {ALGORITHMS}")
        if not self.algorithms or not self.runtimes:
            raise ConfigurationError("at least one algorithm and one runtime required")
        if self.checkpoints < 2:
            raise ConfigurationError("--checkpoints must be at least 2")
        if self.lam is not None and self.lam <= 0:
            raise ConfigurationError("--lambda must be positive")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _resolve_problems(config: RunConfig):
    if config.instance_files:
        return [load_instance(path) for path in config.instance_files]
    generator = GENERATORS[config.problem]
    problems = []
    for i in range(config.instances):
        seed = config.seed + i
        if config.problem in ("mis", "dmds"):
            problems.append(generator(config.n, seed, p=config.edge_probability))
        else:
            problems.append(generator(config.n, seed))
    return problems


def _csv_name(report) -> str:
    meta = report.metadata
    t_spec = str(meta.get("T_spec", meta.get("T"))).replace("/", "-")
    return f"{meta.get('instance', 'instance')}_{meta.get('variant')}_T{t_spec}.csv"


def _write_csv(report, path: Path) -> None:
    lines = ["t,r,p_feas,p_opt,p_eps"]
    for t, r, pf, po, pe in report.rows():
        lines.append(",".join(_fmt(v) for v in (t, r, pf, po, pe)))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _paired_deltas(runs: list[dict], first: str, second: str) -> dict:
    by_key: dict[tuple, dict] = {}
    for entry in runs:
        if entry.get("error"):
            continue
        key = (entry["instance"], entry["T_spec"], entry["variant"])
        by_key[key] = entry
    pairs = []
    wins = losses = ties = 0
    for (instance, t_spec, variant), entry in sorted(by_key.items()):
        if variant != first:
            continue
        other = by_key.get((instance, t_spec, second))
        if other is None:
            continue
        d_r = entry["final"]["r"] - other["final"]["r"]
        d_opt = entry["final"]["p_opt"] - other["final"]["p_opt"]
        pairs.append({"instance": instance, "T_spec": t_spec,
                      "delta_r": d_r, "delta_p_opt": d_opt})
        if d_opt > 0:
            wins += 1
        elif d_opt < 0:
            losses += 1
        else:
            ties += 1
    return {"first": first, "second": second, "pairs": pairs,
            "wins": wins, "losses": losses, "ties": ties}


def run(config: RunConfig) -> int:
    """Execute a sweep and write its artifacts; returns the process exit code."""
    config.validate()
    try:
        problems = _resolve_problems(config)
    except (OSError, ParseError, InstanceRejected, ValueError, RuntimeError) as exc:
        raise ConfigurationError(str(exc)) from exc
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    result = sweep(problems, config.algorithms, config.runtimes,
                   lam=config.lam, epsilon=config.epsilon,
                   n_checkpoints=config.checkpoints,
                   rtol=config.rtol, atol=config.atol)

    run_entries = []
    for report in result.runs:
        entry = {
            "instance": report.metadata.get("instance"),
            "variant": report.metadata.get("variant"),
            "T": report.metadata.get("T"),
            "T_spec": report.metadata.get("T_spec"),
            "lambda": report.metadata.get("lambda"),
            "epsilon": report.epsilon,
            "policy": report.metadata.get("policy"),
            "seed": report.metadata.get("seed"),
            "final": report.final,
            "integrator": report.integrator,
            "error": report.error,
        }
        if report.error is None:
            name = _csv_name(report)
            _write_csv(report, out_dir / name)
            entry["csv"] = name
        run_entries.append(entry)

    summary = {
        "config": asdict(config),
        "runs": run_entries,
        "aggregates": result.aggregates,
        "n_failures": result.n_failures,
    }
    if len(config.algorithms) == 2:
        summary["paired"] = _paired_deltas(run_entries, config.algorithms[0],
                                           config.algorithms[1])
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return 2 if result.n_failures else 0


def compare(summary_a: dict, summary_b: dict) -> dict:
    """Pair two run summaries by instance and runtime; delta = A - B."""
    def index(summary):
        out = {}
        for entry in summary.get("runs", []):
            if entry.get("error"):
                continue
            key = (entry["instance"], entry["T_spec"])
            if key in out:
                raise ValueError(f"summary holds multiple runs for {key}; "
                                 "compare one algorithm per file")
            out[key] = entry
        return out

    a, b = index(summary_a), index(summary_b)
    if set(a) != set(b):
        only_a = sorted(set(a) - set(b))
        only_b = sorted(set(b) - set(a))
        raise ValueError(f"instance sets differ (only in A: {only_a}, only in B: {only_b})")
    pairs = []
    wins = losses = ties = 0
    for key in sorted(a):
        d_r = a[key]["final"]["r"] - b[key]["final"]["r"]
        d_opt = a[key]["final"]["p_opt"] - b[key]["final"]["p_opt"]
        pairs.append({"instance": key[0], "T_spec": key[1],
                      "delta_r": d_r, "delta_p_opt": d_opt})
        if d_opt > 0:
            wins += 1
        elif d_opt < 0:
            losses += 1
        else:
            ties += 1
    return {"pairs": pairs, "wins": wins, "losses": losses, "ties": ties}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qchop", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an algorithm sweep")
    p_run.add_argument("--problem", choices=sorted(GENERATORS))
    p_run.add_argument("--n", type=int, help="problem size (vertices/items/bids/assets)")
    p_run.add_argument("--instances", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--p", dest="edge_probability", type=float, default=0.3,
                       help="edge probability for graph problems")
    p_run.add_argument("--instance-file", action="append", default=[],
                       dest="instance_files", help="JSON instance file (repeatable)")
    p_run.add_argument("--algorithm", default="qchop",
                       help="comma-separated list from: " + ", ".join(ALGORITHMS))
    p_run.add_argument("--T", dest="runtimes", default="2piN2",
                       help="comma-separated runtimes; presets 2piN and 2piN2 or numbers")
    p_run.add_argument("--lambda", dest="lam", type=float, default=None,
                       help="penalty factor override (default: qubit count)")
    p_run.add_argument("--epsilon", type=float, default=None,
                       help="near-optimality width (default per problem kind)")
    p_run.add_argument("--checkpoints", type=int, default=101)
    p_run.add_argument("--rtol", type=float, default=1e-9)
    p_run.add_argument("--atol", type=float, default=1e-9)
    p_run.add_argument("--out", default="results", help="output directory")

    p_cmp = sub.add_parser("compare", help="pair two run summaries")
    p_cmp.add_argument("summary_a")
    p_cmp.add_argument("summary_b")
    p_cmp.add_argument("--out", default=None, help="write the comparison JSON here")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            config = RunConfig(
                problem=args.problem, n=args.n, instances=args.instances,
                seed=args.seed, edge_probability=args.edge_probability,
                instance_files=list(args.instance_files),
                algorithms=[a.strip() for a in args.algorithm.split(",") if a.strip()],
                runtimes=[t.strip() for t in args.runtimes.split(",") if t.strip()],
                lam=args.lam, epsilon=args.epsilon, checkpoints=args.checkpoints,
                rtol=args.rtol, atol=args.atol, out=args.out,
            )
            return run(config)
        if args.command == "compare":
            try:
                summary_a = json.loads(Path(args.summary_a).read_text(encoding="utf-8"))
                summary_b = json.loads(Path(args.summary_b).read_text(encoding="utf-8"))
                result = compare(summary_a, summary_b)
            except (OSError, ValueError) as exc:
                raise ConfigurationError(str(exc)) from exc
            text = json.dumps(result, indent=1, sort_keys=True) + "\n"
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
            else:
                sys.stdout.write(text)
            return 0
        raise ConfigurationError(f"unknown command {args.command!r}")
    except ConfigurationError as exc:
        print(f"qchop: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
