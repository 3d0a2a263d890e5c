"""Command-line entry point: ``gnplab <subcommand> ...``.

Exit codes: 0 success, 1 usage or parameter error, 2 a structural claim
failed during ``probe``, 3 an input or output file could not be used.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from ._parallel import THREADS_ENV, default_n_jobs
from ._validation import DegenerateInputError, NumericalError, ParameterError, check_int
from .clt import (clt_report, iter_clt_trials, mantle_histogram, mantle_profile,
                  profile_from_histograms, check_regime, trial_columns, CltTrial)
from .graph import RngStream, read_edgelist, sample_gnp, write_edgelist
from .io import CsvWriter, OutputError, completed_trials, dumps, metadata, read_csv, write_json
from .local import CENSUS_COLUMNS, census
from .probe import ClaimViolation, ProbeConfig, ResampleTrialRecord, run_probe, summarize
from .threshold import solve_c_hat

EXIT_OK, EXIT_USAGE, EXIT_CLAIM, EXIT_IO = 0, 1, 2, 3

PROBE_COLUMNS = ResampleTrialRecord.columns()


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _count(s):
    v = int(float(s)) if "e" in s.lower() else int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s}")
    return v


def _n_list(s):
    return [_count(x) for x in s.split(",") if x]


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help=f"worker processes (default: ${THREADS_ENV} or 1)")


def _add_mode(p, ell=True):
    p.add_argument("--mode", choices=("giant", "core"), required=True,
                   help="largest component or k-core")
    p.add_argument("--k", type=int, default=3, help="core order for --mode core (default 3)")
    if ell:
        p.add_argument("--ell", type=_positive_int, default=5, help="ball radius (default 5)")


def build_parser():
    ap = _Parser(prog="gnplab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"gnplab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="draw one G(n, c/n) and write it as an edge list")
    p.add_argument("--n", type=_count, required=True, help="number of vertices")
    p.add_argument("--c", type=float, required=True, help="mean degree; p = c/n")
    p.add_argument("--index", type=int, default=0, help="trial index within the seed")
    p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    _add_common(p)

    p = sub.add_parser("threshold", help="solve for c_hat_k")
    p.add_argument("--k", type=int, required=True, help="core order k >= 2")
    p.add_argument("--tol", type=float, default=1e-12, help="bisection tolerance")
    p.add_argument("--out", type=Path, default=None, help="also write the JSON here")

    p = sub.add_parser("probe", help="Efron-Stein resampling trials on coupled pairs")
    _add_mode(p)
    p.add_argument("--n", type=_count, default=None, help="number of vertices")
    p.add_argument("--c", type=float, default=None, help="mean degree; p = c/n")
    p.add_argument("--trials", type=_count, default=1000, help="number of trials")
    p.add_argument("--graph", type=Path, default=None,
                   help="resample random pairs of this edge-list graph instead of sampling")
    p.add_argument("--random-pair", action="store_true",
                   help="toggle a uniformly random pair rather than {0, 1}")
    p.add_argument("--exact", action="store_true", help="search every ball (slow reference path)")
    p.add_argument("--size-threshold", type=int, default=None,
                   help="override ceil((ln n)^4) as the small-component cut-off")
    p.add_argument("--no-abort", action="store_true",
                   help="record claim failures instead of stopping")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    _add_common(p)

    p = sub.add_parser("clt", help="Monte Carlo CLT sweep over a grid of n")
    p.add_argument("--mode", choices=("giant", "core"), required=True)
    p.add_argument("--k", type=int, default=3, help="core order (default 3)")
    p.add_argument("--n", type=_n_list, required=True, help="comma-separated vertex counts")
    p.add_argument("--c", type=float, required=True, help="mean degree; p = c/n")
    p.add_argument("--ell", type=_n_list, default=[],
                   help="comma-separated radii for Z~ and Z^ (default none)")
    p.add_argument("--t", type=_positive_int, default=None,
                   help="tree size cap (default min(ceil((4c)^ell), ceil((ln n)^4)))")
    p.add_argument("--trials", type=_count, default=2000, help="trials per n")
    p.add_argument("--force", action="store_true", help="run outside the theorem's regime")
    p.add_argument("--resume", action="store_true", help="continue existing trials_<n>.csv")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    _add_common(p)

    p = sub.add_parser("census", help="per-vertex ball statistics and indicators")
    _add_mode(p)
    p.add_argument("--graph", type=Path, default=None, help="edge-list input")
    p.add_argument("--n", type=_count, default=None, help="sample size when no --graph")
    p.add_argument("--c", type=float, default=None, help="mean degree when no --graph")
    p.add_argument("--size-threshold", type=int, default=None,
                   help="override ceil((ln n)^4)")
    p.add_argument("--out", type=Path, required=True, help="output CSV file")
    _add_common(p)

    p = sub.add_parser("mantle", help="component sizes of G - L or G - V(K)")
    _add_mode(p, ell=False)
    p.add_argument("--graph", type=Path, action="append", default=None,
                   help="edge-list input (repeatable) instead of sampling")
    p.add_argument("--n", type=_count, default=None, help="number of vertices")
    p.add_argument("--c", type=float, default=None, help="mean degree; p = c/n")
    p.add_argument("--trials", type=_count, default=500, help="number of sampled graphs")
    p.add_argument("--force", action="store_true", help="run outside the theorem's regime")
    p.add_argument("--out", type=Path, required=True, help="output JSON file")
    _add_common(p)
    return ap


def _config(args):
    skip = {"command", "threads", "out"}
    cfg = {}
    for key, val in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(val, Path):
            val = str(val)
        elif isinstance(val, list):
            val = [str(v) if isinstance(v, Path) else v for v in val]
        cfg[key] = val
    return cfg


def _n_jobs(args):
    return args.threads if args.threads is not None else default_n_jobs()


def _mkdir(path):
    try:
        Path(path).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"{path}: {exc.strerror or exc}") from exc


def _load_graph(path):
    try:
        return read_edgelist(path)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise OSError(f"{path}: malformed edge list ({exc})") from exc


def _require(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"gnplab {args.command}: missing {', '.join(missing)}")


def cmd_sample(args):
    _require(args, "n", "c")
    n = check_int(args.n, "n", minimum=1)
    g = sample_gnp(n, args.c / n, RngStream(args.seed, args.index).generator())
    meta = metadata("sample", _config(args), args.seed)
    line = json.dumps(meta, separators=(",", ":"))
    if args.out is None:
        sys.stdout.write(write_edgelist(g, None, line))
    else:
        try:
            write_edgelist(g, args.out, line)
        except OSError as exc:
            raise OutputError(f"{args.out}: {exc.strerror or exc}") from exc
    return EXIT_OK


def cmd_threshold(args):
    res = solve_c_hat(args.k, args.tol)
    meta = metadata("threshold", _config(args))
    payload = {"k": res.k, "c_hat": res.c_hat, "residual": res.residual,
               "asymptotic": res.asymptotic, "iterations": res.iterations}
    doc = {"meta": meta, **payload}
    if args.out is not None:
        write_json(args.out, meta, payload)
    sys.stdout.write(dumps(doc))
    return EXIT_OK


def cmd_probe(args):
    graph = None
    if args.graph is not None:
        graph = _load_graph(args.graph)
        if args.n is None:
            args.n = graph.n
        if args.c is None:
            args.c = 2.0 * graph.m / graph.n
    _require(args, "n", "c")
    cfg = ProbeConfig(mode=args.mode, n=args.n, c=args.c, ell=args.ell, k=args.k,
                      trials=args.trials, seed=args.seed,
                      random_pair=args.random_pair or graph is not None,
                      exact=args.exact, threshold=args.size_threshold).validate()
    _mkdir(args.out)
    meta = metadata("probe", _config(args), args.seed)
    records = []
    status = EXIT_OK
    with CsvWriter(args.out / "trials.csv", PROBE_COLUMNS, meta) as out:
        try:
            for rec in run_probe(cfg, n_jobs=_n_jobs(args), abort=not args.no_abort,
                                 graph=graph):
                out.write(rec.row())
                records.append(rec)
        except ClaimViolation as exc:
            out.write(exc.record.row())
            records.append(exc.record)
            print(f"gnplab probe: {exc}", file=sys.stderr)
            status = EXIT_CLAIM
    summary = summarize(records)
    summary["aborted"] = status == EXIT_CLAIM
    write_json(args.out / "summary.json", meta, summary)
    return status


def _read_trials(path, ells, n):
    _, cols, rows = read_csv(path)
    if cols and cols != trial_columns(ells):
        raise UsageError(f"{path}: columns {cols} do not match --ell {list(ells)}")
    m = len(ells)
    out = []
    for r in rows:
        v = [int(x) for x in r]
        out.append(CltTrial(trial=v[0], n=v[1], z=v[2], z_tilde=tuple(v[3:3 + m]),
                            z_hat=tuple(v[3 + m:3 + 2 * m])))
        if v[1] != n:
            raise UsageError(f"{path}: row for n={v[1]} in the file for n={n}")
    return out


def cmd_clt(args):
    check_regime(args.mode, args.c, args.k, args.force)
    if args.trials < 100 and not args.force:
        raise ParameterError("at least 100 trials are needed for a normality report "
                             "(pass --force to run fewer)")
    ells = tuple(args.ell)
    for e in ells:
        check_int(e, "ell", minimum=1)
    _mkdir(args.out)
    meta = metadata("clt", _config(args), args.seed)
    results = {}
    for n in args.n:
        n = check_int(n, "n", minimum=2)
        path = args.out / f"trials_{n}.csv"
        start = completed_trials(path) if args.resume else 0
        done = _read_trials(path, ells, n) if start else []
        with CsvWriter(path, trial_columns(ells), meta, resume=bool(start)) as out:
            for tr in iter_clt_trials(args.mode, n, args.c, args.k, ells, args.trials,
                                      args.seed, args.t, start=start, n_jobs=_n_jobs(args)):
                out.write(tr.row())
                done.append(tr)
        results[n] = done[:args.trials]
    write_json(args.out / "report.json", meta, clt_report(results, ells))
    return EXIT_OK


def cmd_census(args):
    if args.graph is not None:
        g = _load_graph(args.graph)
    else:
        _require(args, "n", "c")
        n = check_int(args.n, "n", minimum=1)
        g = sample_gnp(n, args.c / n, RngStream(args.seed, 0).generator())
    if args.mode == "core":
        check_int(args.k, "k", minimum=2)
    rows = census(g, args.mode, args.ell, args.k, args.size_threshold)
    meta = metadata("census", _config(args), args.seed)
    with CsvWriter(args.out, CENSUS_COLUMNS, meta) as out:
        for r in rows:
            out.write(r)
    return EXIT_OK


def cmd_mantle(args):
    if args.mode == "core":
        check_int(args.k, "k", minimum=2)
    if args.graph:
        graphs = [_load_graph(p) for p in args.graph]
        ns = {g.n for g in graphs}
        if len(ns) != 1:
            raise UsageError("gnplab mantle: all --graph inputs must have the same n")
        n = ns.pop()
        prof = profile_from_histograms(args.mode, n, args.c,
                                       (mantle_histogram(g, args.mode, args.k) for g in graphs))
    else:
        _require(args, "n", "c")
        prof = mantle_profile(args.mode, args.n, args.c, args.k, args.trials, args.seed,
                              args.force, _n_jobs(args))
    meta = metadata("mantle", _config(args), args.seed)
    write_json(args.out, meta, prof.to_dict())
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "threshold": cmd_threshold,
    "probe": cmd_probe,
    "clt": cmd_clt,
    "census": cmd_census,
    "mantle": cmd_mantle,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, DegenerateInputError, NumericalError) as exc:
        print(f"gnplab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"gnplab: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
