"""Command-line front end.

Exit codes follow the solver convention: 0 for informational commands,
2 for usage or format errors, 10 for satisfiable / homomorphic, 20 for
unsatisfiable / non-homomorphic, 1 for runs stopped by the node budget.
Sampling commands require an explicit --seed; there is no wall-clock
default, so every run is reproducible from its command line.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .distributions import NamedDistribution, distribution_from_spec
from .homomorphism import has_homomorphism
from .iofmt import (ParseError, emit_instance, parse_instance, parse_target)
from .model import evaluate, sample_csp, sample_hat_csp
from .rng import derive_seed
from .scanner import (ScanResult, scan, scan_to_csv, scan_to_jsonable,
                      sharpness_verdict, threshold_estimate, transition_window)
from .solver import BudgetExceeded, solve

EXIT_OK = 0
EXIT_INDETERMINATE = 1
EXIT_USAGE = 2
EXIT_SAT = 10
EXIT_UNSAT = 20


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one scan."""

    dist: str
    model: str = "simple"
    n_list: list[int] = field(default_factory=list)
    c_grid: list[float] = field(default_factory=list)
    trials: int = 100
    seed: int = 0
    budget: int | None = 1_000_000
    workers: int = 1
    hi: float = 0.8
    lo: float = 0.2
    target: str | None = None
    base: str | None = None
    out_base: str | None = None
    plot: bool = True

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        data = json.loads(text)
        return cls(**data)

    def resolve_distribution(self) -> NamedDistribution:
        target = None
        if self.target is not None:
            path = Path(self.target)
            if not path.exists():
                raise ValueError(f"target file {path} does not exist")
            target = parse_target(path.read_text())
        return distribution_from_spec(self.dist, target=target, base=self.base)


PRESETS: dict[str, ExperimentConfig] = {
    "twosat-sharp": ExperimentConfig(
        dist="dkt:2,2,1", n_list=[100, 200, 400],
        c_grid=[round(1.0 + 0.1 * i, 10) for i in range(21)],
        trials=400, seed=20260809, budget=200_000),
    "ed3-coarse": ExperimentConfig(
        dist="ed3", n_list=[100, 200, 400], c_grid=[1.6, 2.0, 2.4],
        trials=400, seed=20260810, budget=500_000),
    "dkt-231": ExperimentConfig(
        dist="dkt:2,3,1", n_list=[40, 60, 90],
        c_grid=[round(10.0 + 2.0 * i, 10) for i in range(11)],
        trials=200, seed=20260811, budget=300_000),
    "hom-k3": ExperimentConfig(
        dist="hom-k3", n_list=[100, 200, 300],
        c_grid=[round(3.0 + 0.25 * i, 10) for i in range(13)],
        trials=200, seed=20260812, budget=150_000),
    "section3-sharp": ExperimentConfig(
        dist="section3:0.35", n_list=[100, 200, 400],
        c_grid=[round(2.0 + 0.2 * i, 10) for i in range(9)],
        trials=200, seed=20260813, budget=300_000),
    "section3-coarse": ExperimentConfig(
        dist="section3:0.18", n_list=[100, 200, 400],
        c_grid=[round(4.4 + 0.3 * i, 10) for i in range(8)],
        trials=150, seed=20260814, budget=150_000),
}


def _parse_c_grid(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("grid spec must be start:stop:step or a comma list")
        start, stop, step = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad grid spec {text!r}")
        out = []
        v = start
        while v <= stop + 1e-9:
            out.append(round(v, 10))
            v += step
        return out
    return [float(x) for x in text.split(",")]


def _parse_n_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",")]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    try:
        nd = distribution_from_spec(
            args.dist,
            target=parse_target(Path(args.target).read_text()) if args.target else None,
            base=args.base)
        k = nd.arity
        p = args.c / args.n ** (k - 1)
        sampler = sample_csp if args.model == "simple" else sample_hat_csp
        instance = sampler(args.n, p, nd.dist, args.seed)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    header = (f"# csplab {__version__}\n"
              f"# gen dist={nd.tag} model={args.model} n={args.n} c={args.c} "
              f"seed={args.seed}\n")
    text = header + emit_instance(instance)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args) -> int:
    try:
        instance = parse_instance(Path(args.instance).read_text())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = solve(instance, max_nodes=args.budget)
    except BudgetExceeded:
        print("indeterminate: node budget exhausted", file=sys.stderr)
        return EXIT_INDETERMINATE
    if result is None:
        print("unsatisfiable")
        return EXIT_UNSAT
    assert evaluate(instance, result)
    print("satisfiable")
    print(" ".join(f"{v}={result[v]}" for v in sorted(result)))
    return EXIT_SAT


def cmd_hom(args) -> int:
    try:
        from .hypergraph import Hypergraph

        g_target = parse_target(Path(args.g).read_text())
        h_target = parse_target(Path(args.h).read_text())
        g = Hypergraph(g_target.n, g_target.edges)
        mapping = has_homomorphism(g, h_target)
    except (OSError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if mapping is None:
        print("non-homomorphic")
        return EXIT_UNSAT
    print("homomorphic")
    print(" ".join(f"{v}->{mapping[v]}" for v in sorted(mapping)))
    return EXIT_SAT


def _config_from_args(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_json(Path(args.config).read_text())
    elif args.preset:
        if args.preset not in PRESETS:
            raise ValueError(f"unknown preset {args.preset!r}; "
                             f"choose from {sorted(PRESETS)}")
        cfg = ExperimentConfig(**asdict(PRESETS[args.preset]))
    else:
        if not args.dist or not args.n or not args.c_grid:
            raise ValueError("need --dist, --n and --c-grid (or --preset/--config)")
        cfg = ExperimentConfig(dist=args.dist)
    if args.dist and not args.preset and not args.config:
        cfg.dist = args.dist
    for name in ("model", "trials", "seed", "budget", "workers", "target",
                 "base", "out_base"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if args.n:
        cfg.n_list = _parse_n_list(args.n)
    if args.c_grid:
        cfg.c_grid = _parse_c_grid(args.c_grid)
    if args.no_plot:
        cfg.plot = False
    if cfg.seed is None:
        raise ValueError("--seed is required")
    if not cfg.n_list or not cfg.c_grid:
        raise ValueError("empty n list or c grid")
    return cfg


def cmd_scan(args) -> int:
    try:
        cfg = _config_from_args(args)
        nd = cfg.resolve_distribution()
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = scan(nd, cfg.model, cfg.n_list, cfg.c_grid, cfg.trials, cfg.seed,
                  budget=cfg.budget, workers=cfg.workers)
    windows = transition_window(result, cfg.hi, cfg.lo)
    verdict = sharpness_verdict(result, windows)
    provenance = asdict(cfg)
    csv_text = scan_to_csv(result, provenance=provenance)
    summary = scan_to_jsonable(result, windows, verdict, provenance=provenance)
    if cfg.out_base:
        base = Path(cfg.out_base)
        base.parent.mkdir(parents=True, exist_ok=True)
        base.with_suffix(".csv").write_text(csv_text)
        base.with_suffix(".json").write_text(json.dumps(summary, indent=2) + "\n")
        base.with_suffix(".config.json").write_text(cfg.to_json() + "\n")
        written = [str(base.with_suffix(".csv")), str(base.with_suffix(".json"))]
        if cfg.plot:
            from .plots import plot_scan

            written.append(str(plot_scan(result, windows, base.with_suffix(".svg"))))
        print("\n".join("wrote " + w for w in written))
    else:
        sys.stdout.write(csv_text)
    print(f"verdict: {verdict.verdict} ({verdict.detail})")
    print(f"indeterminate fraction: {result.indeterminate_fraction:.4f}")
    return EXIT_OK


def cmd_criticality(args) -> int:
    from .criticality import classify

    try:
        nd = distribution_from_spec(
            args.dist,
            target=parse_target(Path(args.target).read_text()) if args.target else None,
            base=args.base)
        if nd.arity != 2:
            print("error: criticality analysis supports k = 2 only", file=sys.stderr)
            return EXIT_USAGE
        report = classify(nd.dist, args.c)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_threshold(args) -> int:
    try:
        nd = distribution_from_spec(args.dist)
        estimate = threshold_estimate(nd, args.model, args.n, args.tol,
                                      args.trials, args.seed,
                                      bracket=(args.lo, args.hi),
                                      budget=args.budget)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps({"c": estimate.c, "phat_at_c": estimate.phat_at_c,
                      "probes": list(estimate.probes)}))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import BUNDLES

    if args.preset not in BUNDLES:
        print(f"error: unknown verify preset {args.preset!r}; "
              f"choose from {sorted(BUNDLES)}", file=sys.stderr)
        return EXIT_USAGE
    checks = BUNDLES[args.preset]()
    failed = 0
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        print(f"{status} {name}{suffix}")
        if not ok:
            failed += 1
    return EXIT_OK if failed == 0 else EXIT_INDETERMINATE


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csplab",
        description="Random CSP phase-transition laboratory: generators, exact "
                    "solving, forcing-chain criticality and threshold scans.")
    parser.add_argument("--version", action="version", version=f"csplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample one instance and write it as text")
    g.add_argument("--dist", required=True)
    g.add_argument("--target", help="target hypergraph file for hom specs")
    g.add_argument("--base", help="base distribution spec for prime:<q>")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--c", type=float, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--model", choices=["simple", "hat"], default="simple")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="decide satisfiability of an instance file")
    s.add_argument("instance")
    s.add_argument("--budget", type=int, default=None)
    s.set_defaults(func=cmd_solve)

    h = sub.add_parser("hom", help="decide hypergraph homomorphism G -> H")
    h.add_argument("g")
    h.add_argument("h")
    h.set_defaults(func=cmd_hom)

    sc = sub.add_parser("scan", help="Monte-Carlo satisfiability scan over (n, c)")
    sc.add_argument("--preset", help=f"one of {sorted(PRESETS)}")
    sc.add_argument("--config", help="load a saved experiment config")
    sc.add_argument("--dist")
    sc.add_argument("--target")
    sc.add_argument("--base")
    sc.add_argument("--model", choices=["simple", "hat"], default=None)
    sc.add_argument("--n", help="comma-separated instance sizes")
    sc.add_argument("--c-grid", dest="c_grid", help="start:stop:step or comma list")
    sc.add_argument("--trials", type=int, default=None)
    sc.add_argument("--seed", type=int, default=None)
    sc.add_argument("--budget", type=int, default=None)
    sc.add_argument("--workers", type=int, default=None)
    sc.add_argument("--out-base", dest="out_base")
    sc.add_argument("--no-plot", action="store_true")
    sc.set_defaults(func=cmd_scan)

    cr = sub.add_parser("criticality", help="analytic forcing-chain report (JSON)")
    cr.add_argument("--dist", required=True)
    cr.add_argument("--target")
    cr.add_argument("--base")
    cr.add_argument("--c", type=float, required=True)
    cr.add_argument("--out")
    cr.set_defaults(func=cmd_criticality)

    th = sub.add_parser("threshold", help="bisection estimate of the crossing density")
    th.add_argument("--dist", required=True)
    th.add_argument("--model", choices=["simple", "hat"], default="simple")
    th.add_argument("--n", type=int, required=True)
    th.add_argument("--lo", type=float, required=True)
    th.add_argument("--hi", type=float, required=True)
    th.add_argument("--tol", type=float, default=0.1)
    th.add_argument("--trials", type=int, default=200)
    th.add_argument("--seed", type=int, required=True)
    th.add_argument("--budget", type=int, default=1_000_000)
    th.set_defaults(func=cmd_threshold)

    v = sub.add_parser("verify", help="run a named verification bundle")
    v.add_argument("preset")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which matches our convention
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
