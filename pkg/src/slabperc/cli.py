"""Command-line front end: ``slabperc <command> [options]``.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 resource cap exceeded.
Data goes to stdout (or ``--output``); progress goes to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

from . import harness
from .estimation import mc_estimate, product_estimate, sweep
from .events import EventSpec, Step5Event, Truncation
from .geometry import SlabSpec
from .oracle import CapExceeded, exact_prob

log = logging.getLogger("slabperc")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
EVENT_KEYS = ("m", "n", "L", "lo", "hi")


class UsageError(Exception):
    pass


def _probability(text):
    p = float(text)
    if not 0 <= p <= 1:
        raise argparse.ArgumentTypeError(f"p must lie in [0, 1], got {text}")
    return p


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _default_seed():
    raw = os.environ.get("SLABPERC_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SLABPERC_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=_positive, default=2, help="fiber width (default 2)")
    common.add_argument("--d", type=int, default=3, help="dimension (default 3)")
    common.add_argument("--p", type=_probability, default=0.5, help="bond density (default 0.5)")
    common.add_argument("--trials", type=_positive, default=10_000)
    common.add_argument("--seed", type=int, default=None, help="master seed (default $SLABPERC_SEED or 0)")
    common.add_argument("--mult", type=_positive, default=1, help="truncation window multiplier")
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    common.add_argument("--quiet", action="store_true", help="no progress on stderr")

    def event_args(sp):
        sp.add_argument("--event", required=True, help="event tag, e.g. lr, step2, a1, xx_prime")
        sp.add_argument("--m", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--lo", type=int)
        sp.add_argument("--hi", type=int)
        sp.add_argument("--params", default=None, help="extra event parameters as a JSON object")

    parser = argparse.ArgumentParser(prog="slabperc", description="Crossing probabilities of percolation on slabs.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("estimate", parents=[common], help="Monte Carlo estimate of a catalog event")
    event_args(sp)
    sp = sub.add_parser("exact", parents=[common], help="exact probability by enumeration")
    event_args(sp)
    sp.add_argument("--cap", type=int, default=25, help="maximum bond count to enumerate")

    sp = sub.add_parser("verify", parents=[common], help="run one inequality check")
    sp.add_argument("check", choices=("recursive", "glue", "wide", "shortlong", "fkg", "ab-lemma"))
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--L", type=int, default=1)
    sp.add_argument("--arcs", default=None, help="glue: JSON list of four arcs of [x, y] points")
    sp.add_argument("--ps", type=_float_list, default=None, help="fkg / ab-lemma: densities to test")
    sp.add_argument("--instances", type=_positive, default=100, help="ab-lemma: random instances")

    sp = sub.add_parser("trace-proof", parents=[common], help="case report of the short-to-long argument")
    sp.add_argument("--n", type=_positive, default=1)
    sp.add_argument("--inner", type=_positive, default=50)
    sp.add_argument("--outer", type=_positive, default=None, help="outer samples of the nested estimate")

    sp = sub.add_parser("sweep", parents=[common], help="p(floor(rho n), n) over a list of n")
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--n-list", type=_int_list, required=True)

    sp = sub.add_parser("pc-scan", parents=[common], help="p(2n, n) over a grid of p (report only)")
    sp.add_argument("--n", type=_positive, default=4)
    sp.add_argument("--p-grid", type=_float_list, default=[0.1 * i for i in range(1, 10)])
    return parser


def run_spec(args) -> dict:
    skip = {"output", "quiet", "format"}
    spec = {k: v for k, v in vars(args).items() if k not in skip}
    spec["format"] = args.format
    return spec


# ---------------------------------------------------------------------------
# commands; each returns (records, passed)
# ---------------------------------------------------------------------------

def _event_spec(args) -> EventSpec:
    params = {}
    if args.params:
        try:
            params = json.loads(args.params)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--params is not valid JSON: {exc}") from None
        if not isinstance(params, dict):
            raise UsageError("--params must be a JSON object")
    for key in EVENT_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if "n" in params and "mult" not in params and args.mult != 1:
        params["mult"] = args.mult
    return EventSpec(args.event, params)


def _build(es: EventSpec, spec):
    try:
        return es.build(spec)
    except KeyError as exc:
        raise UsageError(f"event {es.tag!r} needs parameter {exc.args[0]!r}") from None


def cmd_estimate(args, spec):
    es = _event_spec(args)
    event = _build(es, spec)
    log.info("estimating %s with %d trials", es.tag, args.trials)
    if isinstance(event, Step5Event):
        est = product_estimate(event, args.p, args.trials, args.seed, args.workers)
    else:
        est = mc_estimate(event, args.p, args.trials, args.seed, args.workers)
    row = est.to_json()
    row["event_spec"] = es.to_json()
    return [row], True


def cmd_exact(args, spec):
    es = _event_spec(args)
    event = _build(es, spec)
    if isinstance(event, Step5Event):
        raise UsageError("exact enumeration is defined for single-configuration events only")
    res = exact_prob(event, args.p, args.cap)
    p = res.probability
    return [{"event_spec": es.to_json(), "p": args.p, "k": args.k, "d": args.d,
             "probability": float(p), "probability_exact": f"{p.numerator}/{p.denominator}",
             "bond_count": res.bond_count, "config_count": res.config_count}], True


def _need(args, *names):
    missing = [f"--{x}" for x in names if getattr(args, x) is None]
    if missing:
        raise UsageError(f"verify {args.check} needs {', '.join(missing)}")


def cmd_verify(args, spec):
    c = args.check
    common = {"p": args.p, "trials": args.trials, "seed": args.seed, "k": args.k, "d": args.d,
              "workers": args.workers}
    if c == "recursive":
        _need(args, "n")
        rep = harness.check_recursive(args.n, args.L, **common)
    elif c == "glue":
        _need(args, "m", "n")
        if args.arcs:
            try:
                arcs = [[tuple(pt) for pt in arc] for arc in json.loads(args.arcs)]
            except (json.JSONDecodeError, TypeError) as exc:
                raise UsageError(f"--arcs is not a JSON list of arcs: {exc}") from None
            if len(arcs) != 4:
                raise UsageError("--arcs needs exactly four arcs")
        else:
            arcs = harness.boundary_quarters(args.m, args.n)
        rep = harness.check_glue(args.m, args.n, *arcs, **common)
    elif c == "wide":
        _need(args, "m", "n")
        rep = harness.check_wide(args.m, args.n, **common)
    elif c == "shortlong":
        _need(args, "n")
        rep = harness.check_shortlong(args.n, **common)
    elif c == "fkg":
        out = harness.fkg_suite(tuple(args.ps or (0.3, 0.5, 0.7)))
        return [out], out["pass"]
    else:
        out = harness.ab_suite(args.instances, tuple(args.ps or (0.3, 0.5)), args.seed)
        return [out], out["pass"]
    return [rep.to_json()], rep.passed


def cmd_trace(args, spec):
    tr = Truncation.default(args.n, args.mult)
    rep = harness.trace_proof(args.n, args.p, args.trials, args.inner, args.seed, tr, args.k, args.d,
                              outer=args.outer, workers=args.workers)
    return [rep], rep["pass"]


def cmd_sweep(args, spec):
    ests = sweep(args.rho, args.n_list, args.p, args.k, args.d, args.trials, args.seed, args.workers)
    rows = []
    for n, est in zip(args.n_list, ests):
        row = est.to_json()
        row.update({"rho": args.rho, "m": est.event["params"]["m"], "n": n})
        rows.append(row)
    return rows, True


def cmd_pc_scan(args, spec):
    from .events import ev_lr
    from .sampling import derive_seed

    event = ev_lr(2 * args.n, args.n, spec)
    rows = []
    for j, p in enumerate(args.p_grid):
        if not 0 <= p <= 1:
            raise UsageError(f"grid value {p} is outside [0, 1]")
        log.info("p = %.4f", p)
        row = mc_estimate(event, p, args.trials, derive_seed(args.seed, j), args.workers).to_json()
        row.update({"m": 2 * args.n, "n": args.n})
        rows.append(row)
    return rows, True


COMMANDS = {"estimate": cmd_estimate, "exact": cmd_exact, "verify": cmd_verify, "trace-proof": cmd_trace,
            "sweep": cmd_sweep, "pc-scan": cmd_pc_scan}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

ESTIMATE_COLUMNS = ["event", "k", "d", "p", "m", "n", "trials", "seed", "successes", "p_hat", "ci_lo", "ci_hi",
                    "boundary_hits"]
CHECK_COLUMNS = ["check", "k", "d", "p", "trials", "seed", "lhs", "rhs", "log10_rhs", "slack", "pass",
                 "boundary_hit_fraction"]
TRACE_COLUMNS = ["branch", "name", "direction", "lhs", "rhs", "log10_lhs", "log10_rhs", "slack", "pass"]
EXACT_COLUMNS = ["event", "k", "d", "p", "probability", "probability_exact", "bond_count"]
SUITE_COLUMNS = ["check", "p", "E", "F", "box", "k", "d", "p_e", "p_f", "p_ef", "margin", "instance", "n", "s",
                 "p_a", "bound", "ok"]


def _csv_rows(command, records, runspec):
    if command == "trace-proof":
        rep = records[0]
        return TRACE_COLUMNS, [dict(row, branch=rep["branch"]) for row in rep["checks"]]
    if command == "exact":
        rows = [dict(r, event=r["event_spec"]["tag"]) for r in records]
        return EXACT_COLUMNS, rows
    if command == "verify":
        rep = records[0]
        if "results" in rep:
            return SUITE_COLUMNS, [dict(r, check=rep["check"]) for r in rep["results"]]
        row = dict(rep)
        row.update({key: rep["params"].get(key) for key in ("k", "d", "p", "trials", "seed")})
        return CHECK_COLUMNS, [row]
    rows = []
    for r in records:
        row = dict(r)
        row["event"] = r["event"]["tag"]
        params = r["event"]["params"]
        row.setdefault("m", params.get("m"))
        row["n"] = r.get("n") if r.get("n") is not None else params.get("n")
        rows.append(row)
    return ESTIMATE_COLUMNS, rows


def render(command, records, runspec, fmt) -> str:
    if fmt == "json":
        return harness.dumps({"runspec": runspec, "records": records}) + "\n"
    columns, rows = _csv_rows(command, records, runspec)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns + ["runspec"], extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    spec_text = json.dumps(runspec, sort_keys=True)
    for row in rows:
        writer.writerow(dict(row, runspec=spec_text))
    return buf.getvalue()


def _setup_logging(quiet):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("slabperc: %(message)s"))
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.WARNING if quiet else logging.INFO)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    _setup_logging(args.quiet)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        spec = SlabSpec(args.k, args.d)
        runspec = run_spec(args)
        records, passed = COMMANDS[args.command](args, spec)
        text = render(args.command, records, runspec, args.format)
    except CapExceeded as exc:
        print(f"slabperc: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ValueError) as exc:
        print(f"slabperc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
