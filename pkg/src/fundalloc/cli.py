"""Command-line interface.

Subcommands wrap the library operations end to end: ``ingest`` (fetch or
load a dataset), ``cohort`` (build and export a cohort), ``allocate``
(deterministic shares), ``lottery`` (selection probabilities or a seeded
draw), ``backtest`` (grid search for either mechanism), ``synth``
(synthetic cohort), ``curve`` (allocation-curve data) and ``hist2d``
(joint-histogram data).

Every stochastic subcommand prints the seed it used; re-running with that
seed reproduces all outputs byte for byte. Exit codes: 0 success, 2 usage
error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import backtest, cohort, deterministic, formats, lottery, openalex
from .rng import fresh_seed


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip() != ""]


def _parse_ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip() != ""]


def _parse_window(text: str) -> cohort.Window:
    start, _, end = text.partition(":")
    return cohort.Window(int(start), int(end))


def _out(args, default_name: str) -> Path:
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / default_name


def _effective_seed(args) -> int:
    seed = args.seed if args.seed is not None else fresh_seed()
    print(f"seed: {seed}")
    return seed


def _load_scores(args) -> tuple[list[str], np.ndarray]:
    if getattr(args, "scores", None):
        values = _parse_floats(args.scores)
        return [str(i) for i in range(len(values))], np.asarray(values)
    path = getattr(args, "scores_file", None) or getattr(args, "cohort", None)
    if not path:
        raise ValueError("provide --scores or a cohort CSV")
    c = formats.read_cohort_csv(path)
    return c.ids, c.scores


def cmd_ingest(args) -> int:
    out = _out(args, "dataset.json")
    if args.input:
        records = formats.load_dataset(args.input)
    else:
        if not args.author and not args.institution:
            raise ValueError("provide --input, --author or --institution")
        if os.environ.get("NO_NETWORK"):
            raise RuntimeError("network fetch disabled by NO_NETWORK; use --input with a local file")
        config = openalex.FetchConfig(
            base_url=args.base_url,
            per_page=args.per_page,
            cache_dir=args.cache_dir,
            mailto=args.mailto,
        )
        records = openalex.fetch_openalex(args.author or args.institution, config)
    formats.save_dataset(records, out)
    print(f"wrote {out} ({len(records)} researchers)")
    return 0


def cmd_cohort(args) -> int:
    records = formats.load_dataset(args.dataset)
    if args.institute:
        records = [r for r in records if r.institute_id == args.institute]
    institutes = sorted({r.institute_id for r in records})
    if len(institutes) != 1:
        raise ValueError(f"dataset covers institutes {institutes}; pick one with --institute")
    if args.reference and args.future:
        reference, future = _parse_window(args.reference), _parse_window(args.future)
    elif args.year is not None:
        reference = cohort.Window.reference_for(args.year)
        future = cohort.Window.future_for(args.year)
    else:
        raise ValueError("provide --year or both --reference and --future")
    built = cohort.build_cohort(records, reference, future)
    out = _out(args, "cohort.csv")
    formats.write_cohort_csv(built, out, meta=formats.window_meta(reference, future))
    print(f"wrote {out} ({len(built)} members)")
    return 0


def cmd_allocate(args) -> int:
    ids, scores = _load_scores(args)
    params = deterministic.DetParams(
        alpha=args.alpha, lam=args.lam, gamma=args.gamma,
        lower_bound=args.lower, upper_bound=args.upper,
    )
    alloc = deterministic.allocate(scores, args.budget, params)
    if args.output:
        out = Path(args.output)
        if args.format == "json":
            payload = {
                "budget": args.budget,
                "params": {"alpha": args.alpha, "lambda": args.lam, "gamma": args.gamma},
                "shares": [{"researcher_id": rid, "share": repr(float(s))} for rid, s in zip(ids, alloc.shares)],
            }
            out.write_text(json.dumps(payload, indent=2) + "\n")
        else:
            formats.write_allocation_csv(
                ids, alloc.shares, out,
                params={"alpha": args.alpha, "lambda": args.lam, "gamma": args.gamma},
                budget=args.budget,
            )
        print(f"wrote {out}")
    else:
        print(",".join(f"{s:.6f}" for s in alloc.shares))
    return 0


def cmd_lottery(args) -> int:
    ids, scores = _load_scores(args)
    if args.draw:
        seed = _effective_seed(args)
        params = lottery.StochParams(
            alpha=args.alpha, tau=args.tau, k=args.k,
            seed_grant=args.seed_grant, gamma_cond=args.gamma_cond,
        )
        result = lottery.run_lottery(scores, args.budget, params, rng_seed=seed)
        out = Path(args.output) if args.output else _out(args, "draw.json")
        formats.write_draw_json(result, out, ids=ids)
        print(f"wrote {out}")
        return 0
    policy = lottery.selection_probabilities(scores, args.alpha, args.tau)
    if args.output:
        out = Path(args.output)
        if args.format == "json":
            payload = {"p": [repr(float(p)) for p in policy.probabilities]}
            out.write_text(json.dumps(payload, indent=2) + "\n")
        else:
            formats.write_probabilities_csv(ids, policy.probabilities, out)
        print(f"wrote {out}")
    else:
        print(",".join(f"{p:.6f}" for p in policy.probabilities))
    return 0


def cmd_backtest(args) -> int:
    c = formats.read_cohort_csv(args.cohort)
    if args.mechanism == "det":
        default = backtest.GridSpec.default_det()
        grid = backtest.GridSpec(
            alpha=args.alpha_grid or default.alpha,
            lam=args.lambda_grid or default.lam,
            gamma=args.gamma_grid or default.gamma,
        )
        if args.n_draws is not None:
            print("note: --n-draws is ignored by the deterministic mechanism")
        result = backtest.grid_search_det(c, args.budget, grid)
    else:
        seed = _effective_seed(args)
        default = backtest.GridSpec.default_stoch(args.budget)
        grid = backtest.GridSpec(
            alpha=args.alpha_grid or default.alpha,
            tau=args.tau_grid or default.tau,
            k=args.k_grid or default.k,
            seed_grant=args.seed_grant_grid or default.seed_grant,
            gamma_cond=args.gamma_cond_grid or default.gamma_cond,
        )
        result = backtest.optimize_stoch(
            c, args.budget, grid, n_draws=args.n_draws or backtest.DEFAULT_N_DRAWS, root_seed=seed
        )
    table = Path(args.output) if args.output else _out(args, "backtest.csv")
    formats.write_backtest_csv(result, table)
    summary = table.with_suffix(".summary.json")
    formats.write_backtest_summary(result, summary)
    print(f"wrote {table} and {summary}")
    print(f"best: {json.dumps(result.best.params)} utility={result.best.utility!r}")
    return 0


def cmd_synth(args) -> int:
    seed = _effective_seed(args)
    spec = backtest.SynthSpec(n=args.n, rho=args.rho, tail_exponent=args.tail, rng_seed=seed)
    c = backtest.synth_cohort(spec)
    out = Path(args.output) if args.output else _out(args, "synth.csv")
    formats.write_cohort_csv(c, out, meta={"rho": args.rho, "tail_exponent": args.tail, "rng_seed": seed})
    print(f"wrote {out} ({len(c)} members)")
    return 0


def cmd_curve(args) -> int:
    params = deterministic.DetParams(alpha=args.alpha, lam=args.lam, gamma=args.gamma)
    data = deterministic.allocation_curve(params, args.points, budget=args.budget)
    lines = ["s,share"] + [f"{repr(float(s))},{repr(float(b))}" for s, b in data]
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_hist2d(args) -> int:
    c = formats.read_cohort_csv(args.cohort)
    grid = cohort.joint_histogram(c, args.bins, smooth=args.smooth)
    out = Path(args.output) if args.output else _out(args, "hist2d.csv")
    formats.write_histogram_csv(grid, out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fundalloc",
        description="Research-funding allocation: cohorts, allocation rules, lotteries, backtests.",
    )
    parser.add_argument("--seed", type=int, default=None, help="root seed for stochastic subcommands")
    parser.add_argument("--output-dir", default=".", help="directory for default output files")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="output format where applicable")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="fetch a dataset from an OpenAlex-style API or load a local file")
    p.add_argument("--author", help="author id (A...)")
    p.add_argument("--institution", help="institution id (I...)")
    p.add_argument("--input", help="local dataset JSON to validate and normalize")
    p.add_argument("--base-url", default="https://api.openalex.org")
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--mailto", default=None)
    p.add_argument("--per-page", type=int, default=200)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("cohort", help="build a cohort from a dataset and export it")
    p.add_argument("--dataset", required=True)
    p.add_argument("--institute", default=None)
    p.add_argument("--year", type=int, default=None, help="split year Y: reference [Y-5,Y-1], future [Y,Y+4]")
    p.add_argument("--reference", default=None, help="reference window START:END")
    p.add_argument("--future", default=None, help="future window START:END")
    p.set_defaults(func=cmd_cohort)

    p = sub.add_parser("allocate", help="deterministic explore/exploit shares")
    p.add_argument("--scores", help="comma-separated scores")
    p.add_argument("--cohort", help="cohort CSV (uses the s column)")
    p.add_argument("--budget", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--lower", type=float, default=None)
    p.add_argument("--upper", type=float, default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("lottery", help="selection probabilities or a seeded draw")
    p.add_argument("--scores", help="comma-separated scores")
    p.add_argument("--scores-file", help="cohort CSV (uses the s column)")
    p.add_argument("--draw", action="store_true", help="run a seeded draw instead of printing probabilities")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--seed-grant", type=float, default=0.0)
    p.add_argument("--gamma-cond", type=float, default=1.0)
    p.add_argument("--budget", type=float, default=1.0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_lottery)

    p = sub.add_parser("backtest", help="grid search against realized outcomes")
    p.add_argument("--mechanism", choices=("det", "stoch"), required=True)
    p.add_argument("--cohort", required=True)
    p.add_argument("--budget", type=float, default=1.0)
    p.add_argument("--alpha-grid", type=_parse_floats, default=None)
    p.add_argument("--lambda-grid", type=_parse_floats, default=None)
    p.add_argument("--gamma-grid", type=_parse_floats, default=None)
    p.add_argument("--tau-grid", type=_parse_floats, default=None)
    p.add_argument("--k-grid", type=_parse_ints, default=None)
    p.add_argument("--seed-grant-grid", type=_parse_floats, default=None)
    p.add_argument("--gamma-cond-grid", type=_parse_floats, default=None)
    p.add_argument("--n-draws", type=int, default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("synth", help="generate a synthetic cohort")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--rho", type=float, default=0.8)
    p.add_argument("--tail", type=float, default=1.5)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("curve", help="allocation-curve data over an even score grid")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--budget", type=float, default=1.0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("hist2d", help="joint histogram of cohort (s, o)")
    p.add_argument("--cohort", required=True)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--smooth", action="store_true")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_hist2d)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
