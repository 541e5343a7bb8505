"""Command line interface.

    rjcd rjcd      --judgments J [--out DIR]
    rjcd eval      --judgments J [--overrides O] [--reranked R | --snippets S --profiles P [--corpus C]]
    rjcd gate      --judgments J [--threshold 0.05]
    rjcd correlate (--summary SUMMARY.csv | --judgments J ...)
    rjcd rerank    --snippets S --profiles P [--corpus C] [--k 5] [--tau 2.0]
    rjcd simulate  [--h 5] [--n-items 1000] [--p-unanimous 0 0.5 1] [--seed 0] [--n-seeds 20]
    rjcd report    same inputs as eval; adds correlation.csv and SVG figures

Exit codes: 0 success, 2 input validation, 3 unresolved ties,
4 numeric failure, 5 output could not be written.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import data_io, metrics, rerank, simulate
from .judgments import InvalidInputError, UnresolvedTieError, rjcd
from .metrics import UndefinedMetricError
from .pipeline import evaluate_query

log = logging.getLogger("rjcd")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_TIES = 3
EXIT_NUMERIC = 4
EXIT_OUTPUT = 5


class NumericFailure(Exception):
    pass


def _column_map(items):
    out = {}
    for item in items or ():
        canonical, sep, actual = item.partition("=")
        if not sep or not canonical or not actual:
            raise InvalidInputError(f"--column-map expects canonical=actual, got {item!r}")
        out[canonical.strip()] = actual.strip()
    return out


def _require(args, *names):
    missing = [n for n in names if not getattr(args, n, None)]
    if missing:
        raise InvalidInputError(f"{args.command} needs " + ", ".join("--" + n for n in missing))


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _evaluations(args):
    _require(args, "judgments")
    cmap = _column_map(args.column_map)
    matrices = data_io.load_judgments(args.judgments, cmap)
    overrides = data_io.load_overrides(args.overrides, cmap) if args.overrides else {}
    orders = {}
    if args.reranked:
        orders = data_io.load_rankings(args.reranked, cmap)
    elif args.snippets and args.profiles:
        results = _run_rerank(args, cmap)
        orders = {q: [it.snippet.rank for it in items] for q, items in results.items()}
    else:
        log.warning("no re-ranked run given; the baseline order is used for both runs")
    evals = []
    for m in matrices:
        order = orders.get(m.query_id)
        if order is not None and len(order) != m.n_items:
            # ranking covers more items than were judged: keep judged ranks only
            order = [r for r in order if r <= m.n_items]
        if orders and order is None:
            log.warning("query %r has no re-ranked order; using baseline", m.query_id)
        evals.append(evaluate_query(m, overrides, order))
    return evals


def _run_rerank(args, cmap):
    snippets = data_io.load_snippets(args.snippets, cmap)
    profiles = data_io.load_profiles(args.profiles, cmap)
    corpus = data_io.load_corpus(args.corpus) if args.corpus else rerank.toy_corpus()
    if not args.corpus:
        log.info("no --corpus given; training on the bundled toy corpus")
    model = rerank.train_nb(corpus)
    results = {}
    for qid, snips in snippets.items():
        profile = profiles.get(qid)
        if profile is None:
            raise InvalidInputError(f"no preference profile for query {qid!r}")
        results[qid] = rerank.rerank_query(snips, model, profile, args.k, args.tau)
    return results


def cmd_rjcd(args) -> int:
    _require(args, "judgments")
    matrices = data_io.load_judgments(args.judgments, _column_map(args.column_map))
    reports = [rjcd(m) for m in matrices]
    path = data_io.write_rjcd_csv(_outdir(args) / "rjcd.csv", reports)
    for r in reports:
        print(f"{r.query_id}\trho={r.rho:.6f}\tAN={r.AN}\tJN={r.JN}")
    log.info("wrote %s", path)
    return EXIT_OK


def cmd_eval(args) -> int:
    evals = _evaluations(args)
    files = data_io.write_reports(evals, _outdir(args), threshold=args.threshold, figures=False, include_correlation=False)
    for e in evals:
        base10, rer10 = e.p_at(10)
        print(
            f"{e.query_id}\tP@10 {base10:.4f} -> {rer10:.4f}\tmean precision "
            f"{e.mean_precision_baseline:.4f} -> {e.mean_precision_reranked:.4f} ({e.improvement:+.4f})"
        )
    log.info("wrote %d files to %s", len(files), args.out)
    return EXIT_OK


def cmd_gate(args) -> int:
    _require(args, "judgments")
    matrices = data_io.load_judgments(args.judgments, _column_map(args.column_map))
    kept, excluded = metrics.gate_queries([rjcd(m) for m in matrices], args.threshold)
    data_io.write_gate_csv(_outdir(args) / "gate.csv", kept, excluded)
    for r in kept:
        print(f"kept\t{r.query_id}\t{r.rho:.6f}")
    for r in excluded:
        print(f"excluded\t{r.query_id}\t{r.rho:.6f}")
    return EXIT_OK


def _correlation(rhos, imps):
    try:
        return metrics.pearson(rhos, imps)
    except InvalidInputError as exc:
        raise NumericFailure(f"correlation failed: {exc}") from None


def cmd_correlate(args) -> int:
    if args.summary:
        triples = data_io.load_summary(args.summary)
        rhos = [t[1] for t in triples]
        imps = [t[2] for t in triples]
    elif args.judgments:
        evals = _evaluations(args)
        rhos = [e.report.rho for e in evals]
        imps = [e.improvement for e in evals]
    else:
        raise InvalidInputError("correlate needs --summary or --judgments")
    res = _correlation(rhos, imps)
    data_io.write_correlation_csv(_outdir(args) / "correlation.csv", res)
    print(f"n={res.n}\tr={res.r:.4f}\tt={res.t_stat:.4f}\tp={res.p_value:.3g}")
    return EXIT_OK


def cmd_rerank(args) -> int:
    _require(args, "snippets", "profiles")
    results = _run_rerank(args, _column_map(args.column_map))
    path = data_io.write_reranked_csv(_outdir(args) / "reranked.csv", results)
    log.info("wrote %s", path)
    for qid, items in results.items():
        print(f"{qid}\t" + " ".join(str(it.snippet.rank) for it in items))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfgs = [
        simulate.PanelConfig(args.h, args.n_items, p, tuple(args.weights), args.seed + s)
        for p in args.p_unanimous
        for s in range(args.n_seeds)
    ]
    rows = simulate.sweep(cfgs)
    out = _outdir(args)
    data_io.write_sweep_csv(out / "sweep.csv", rows)
    if args.write_judgments:
        data_io.write_judgments(out / "simulated_judgments.csv", (simulate.simulate_panel(c) for c in cfgs))
    by_p = {}
    for r in rows:
        by_p.setdefault(r.p_unanimous, []).append(r.rho)
    for p, vals in by_p.items():
        print(f"p_unanimous={p:g}\tmean rho={sum(vals) / len(vals):.6f}\t(n_seeds={len(vals)})")
    return EXIT_OK


def cmd_report(args) -> int:
    evals = _evaluations(args)
    corr = None
    try:
        corr = _correlation([e.report.rho for e in evals], [e.improvement for e in evals])
    except NumericFailure as exc:
        log.warning("%s; correlation.csv left empty", exc)
    files = data_io.write_reports(evals, _outdir(args), threshold=args.threshold, correlation=corr)
    for e in evals:
        print(f"{e.query_id}\trho={e.report.rho:.4f}\timprovement={e.improvement:+.4f}")
    if corr is not None:
        print(f"pearson r={corr.r:.4f} t={corr.t_stat:.4f} p={corr.p_value:.3g} (n={corr.n})")
    log.info("wrote %d files to %s", len(files), args.out)
    return EXIT_OK


COMMANDS = {
    "rjcd": (cmd_rjcd, "RJCD (AN, JN, rho) per query"),
    "eval": (cmd_eval, "PR curves, recall-level profiles and P@10 for baseline vs re-ranked runs"),
    "gate": (cmd_gate, "split queries by an RJCD threshold"),
    "correlate": (cmd_correlate, "Pearson r between RJCD and precision improvement"),
    "rerank": (cmd_rerank, "topic-preference re-ranking of snippet lists"),
    "simulate": (cmd_simulate, "RJCD of synthetic assessor panels"),
    "report": (cmd_report, "eval + correlation + SVG figures"),
}


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="rjcd", description="Relevance judgment convergence and re-ranking evaluation.", formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = {}

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults (flags override it)")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--column-map", action="append", metavar="CANONICAL=ACTUAL", help="rename an input column; repeatable")
    common.add_argument("-v", "--verbose", action="store_true")

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--judgments", help="judgments.csv")
    inputs.add_argument("--overrides", help="overrides.csv resolving zero-score ties")
    inputs.add_argument("--reranked", help="reranked.csv giving the treated ordering")
    inputs.add_argument("--snippets", help="snippets.csv")
    inputs.add_argument("--queries", help="queries.csv (validated, informational)")
    inputs.add_argument("--profiles", help="profiles.csv")
    inputs.add_argument("--corpus", help="topic<TAB>text training corpus (default: bundled toy corpus)")
    inputs.add_argument("--threshold", type=float, default=0.05, help="RJCD gate threshold")
    inputs.add_argument("--k", type=int, default=rerank.DEFAULT_K, help="KNN neighbours")
    inputs.add_argument("--tau", type=float, default=rerank.DEFAULT_TAU, help="NB margin needed to overrule KNN")
    inputs.add_argument("--seed", type=int, default=0)

    for name, (_, help_text) in COMMANDS.items():
        parents = [common] if name == "simulate" else [common, inputs]
        p = sub.add_parser(name, parents=parents, help=help_text, formatter_class=fmt)
        parser.subcommands[name] = p
        if name == "correlate":
            p.add_argument("--summary", help="summary.csv with rho and improvement columns")
        if name == "simulate":
            p.add_argument("--h", type=int, default=5, help="assessors per item")
            p.add_argument("--n-items", type=int, default=1000)
            p.add_argument("--p-unanimous", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 1.0])
            p.add_argument("--weights", type=float, nargs=4, default=list(simulate.UNIFORM), metavar=("R", "P", "I", "N"))
            p.add_argument("--seed", type=int, default=0, help="first seed")
            p.add_argument("--n-seeds", type=int, default=20)
            p.add_argument("--write-judgments", action="store_true", help="also write simulated_judgments.csv")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            conf = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise InvalidInputError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(conf, dict):
            raise InvalidInputError("config file must hold a JSON object")
        # re-parse so explicit flags win over the file
        sub = parser.subcommands[args.command]
        known = set(vars(sub.parse_args([])))
        unknown = set(k.replace("-", "_") for k in conf) - known
        if unknown:
            raise InvalidInputError(f"unknown config keys: {', '.join(sorted(unknown))}")
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in conf.items()})
        args = parser.parse_args(argv)
    if not 0.0 <= getattr(args, "threshold", 0.05) <= 1.0:
        raise InvalidInputError("--threshold must lie in [0, 1]")
    if getattr(args, "k", 1) < 1:
        raise InvalidInputError("--k must be >= 1")
    return args


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args = parse_args(argv)
        log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
        if getattr(args, "queries", None):
            data_io.load_queries(args.queries, _column_map(args.column_map))
        return COMMANDS[args.command][0](args)
    except UnresolvedTieError as exc:
        log.error("%s", exc)
        return EXIT_TIES
    except InvalidInputError as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except (NumericFailure, UndefinedMetricError, ArithmeticError) as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_OUTPUT


if __name__ == "__main__":
    sys.exit(main())
