"""Command-line frontend: deterministic, JSON-first, CI-friendly.

Subcommands: iterate, verify, toric, pit, division-check.  Exit codes
are fixed for CI use: 0 success, 1 usage error, 2 a non-Laurent iterate
(with a reproduction bundle on stderr), 3 budget exhaustion.

All JSON is emitted with sorted keys and no volatile fields (timings go
to stderr), so identical configuration and seed give byte-identical
output.  A config file in key=value form supplies defaults for any long
flag; the NCLAURENT_SEED environment variable overrides the default
seed but not an explicit --seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from nclaurent.blockring import validate_h
from nclaurent.commutative import comm_iterate, compare_abelian
from nclaurent.divcheck import SOLVED, left_divide
from nclaurent.errors import (
    BudgetExceeded,
    NCLaurentError,
    NotLaurent,
    UsageError,
)
from nclaurent.freealg import poly_eval_nc, render_element
from nclaurent.kontsevich import Budget, Engine
from nclaurent.pitoracle import DEFAULT_PRIME, verify_iterate
from nclaurent.toric import chart_checks, toric_report

ALL_CHECKS = ("laurent", "commutator", "inverse", "abelian", "recurrence",
              "division", "pit", "positivity", "toric", "charts")


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        # let bare negative values like -3 and ranges like -6:6 pass as values
        import re
        self._negative_number_matcher = re.compile(r"^-\d+(:-?\d+)?$")

    def error(self, message):
        raise UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _parse_h(text: str):
    try:
        return validate_h([Fraction(c.strip()) for c in text.split(",")],
                          allow_nonreversible=True)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad H coefficient list {text!r}: {exc}")


def _parse_range(text: str):
    try:
        if ":" in text:
            lo, hi = text.split(":")
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"bad k range {text!r}; use K or LO:HI")
    if lo > hi:
        raise UsageError(f"empty k range {text!r}")
    return lo, hi


def _load_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line without '=': {line!r}")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _extract_config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a path")
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("NCLAURENT_SEED")
    return int(env) if env else 0


def _budget(args) -> Budget:
    return Budget(max_k=int(args.max_k), max_terms=int(args.max_terms),
                  max_seconds=float(args.max_seconds) if args.max_seconds else None)


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- iterate ---------------------------------------------------------------


def cmd_iterate(args) -> int:
    h = _parse_h(args.H)
    for w in h.warnings:
        print(f"warning: {w}", file=sys.stderr)
    lo, hi = _parse_range(args.k)
    targets = ("x", "y") if args.target == "both" else (args.target,)
    engine = Engine(h, _budget(args))
    results = []
    for k in range(lo, hi + 1):
        for target in targets:
            res = engine.iterate(k, target)
            print(f"timing k={k} target={target}: {res.timings}", file=sys.stderr)
            results.append(res)
    if args.format == "json":
        payload = [r.to_json() for r in results]
        text = _dump(payload[0] if len(payload) == 1 else payload)
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            for r in results:
                path = os.path.join(args.out_dir, f"iterate_k{r.k}_{r.target}.json")
                with open(path, "w") as fh:
                    fh.write(_dump(r.to_json()))
        else:
            _emit(text, args.out)
    else:
        lines = []
        for r in results:
            lines.append(f"# k={r.k} target={r.target} laurent={r.laurent} "
                         f"terms={r.stats['term_count']}")
            lines.append(render_element(r.value))
        _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- verify ----------------------------------------------------------------


def _check_laurent(engine, lo, hi):
    per_k = {}
    ok = True
    for k in range(lo, hi + 1):
        entry = {}
        for target in ("x", "y"):
            res = engine.iterate(k, target)
            entry[target] = res.laurent
            ok = ok and res.laurent
        per_k[str(k)] = entry
    return {"pass": ok, "per_k": per_k}


def _check_abelian(engine, lo, hi):
    per_k = {}
    ok = True
    for k in range(lo, hi + 1):
        l1, l2 = comm_iterate(engine.h, k)
        good = (compare_abelian(engine.value(k, "x"), l1)
                and compare_abelian(engine.value(k, "y"), l2))
        per_k[str(k)] = good
        ok = ok and good
    return {"pass": ok, "per_k": per_k}


def _check_recurrence(engine, lo, hi):
    per_k = {}
    ok = True
    for k in range(lo, hi):
        good = engine.recurrence_check(k)
        per_k[str(k)] = good
        ok = ok and good
    return {"pass": ok, "per_k": per_k}


def _check_division(engine, lo, hi, rounds, max_steps=4):
    per_step = {}
    ok = True
    inconclusive = []
    for k in range(max(lo, 0), min(hi, max_steps)):
        w_k = engine.value(k, "y")
        p_k = poly_eval_nc(engine.h, engine.value(k, "x"))
        prob = left_divide(w_k, p_k, rounds=rounds)
        agrees = (prob.status == SOLVED
                  and prob.quotient == engine.value(k + 1, "x"))
        per_step[str(k)] = {"status": prob.status, "agrees": agrees,
                            "support_size": prob.support_size}
        if prob.status == SOLVED:
            ok = ok and agrees
        else:
            inconclusive.append(k)
    return {"pass": ok, "per_step": per_step, "inconclusive": inconclusive}


def _check_pit(engine, lo, hi, trials, dims, prime, seed):
    per_k = {}
    ok = True
    for k in range(lo, hi + 1):
        entry = {}
        for target in ("x", "y"):
            rep = verify_iterate(engine.h, engine.value(k, target), k, target,
                                 trials=trials, dims=dims, p=prime, seed=seed)
            entry[target] = rep.ok
            ok = ok and rep.ok
        per_k[str(k)] = entry
    return {"pass": ok, "per_k": per_k}


def cmd_verify(args) -> int:
    h = _parse_h(args.H)
    lo, hi = _parse_range(args.k_range)
    seed = _resolve_seed(args)
    checks = [c.strip() for c in args.checks.split(",")] if args.checks else list(ALL_CHECKS)
    for c in checks:
        if c not in ALL_CHECKS:
            raise UsageError(f"unknown check {c!r}; known: {', '.join(ALL_CHECKS)}")
    engine = Engine(h, _budget(args))
    dims = tuple(int(d) for d in args.dims.split(","))
    n = int(args.n) if args.n else h.n
    report = {
        "H": h.coeff_strings(),
        "k_range": [lo, hi],
        "seed": seed,
        "checks": {},
    }
    gate = []
    run = report["checks"]
    if "laurent" in checks:
        run["laurent"] = _check_laurent(engine, lo, hi)
        gate.append(run["laurent"]["pass"])
    if "commutator" in checks:
        run["commutator"] = {"pass": engine.check_commutator()}
        gate.append(run["commutator"]["pass"])
    if "inverse" in checks:
        run["inverse"] = {"pass": engine.check_inverse()}
        gate.append(run["inverse"]["pass"])
    if "abelian" in checks:
        run["abelian"] = _check_abelian(engine, lo, hi)
        gate.append(run["abelian"]["pass"])
    if "recurrence" in checks:
        run["recurrence"] = _check_recurrence(engine, lo, hi)
        gate.append(run["recurrence"]["pass"])
    if "division" in checks:
        run["division"] = _check_division(engine, lo, hi, int(args.rounds))
        gate.append(run["division"]["pass"])  # Inconclusive does not gate
    if "pit" in checks:
        run["pit"] = _check_pit(engine, lo, hi, int(args.trials), dims,
                                int(args.prime), seed)
        gate.append(run["pit"]["pass"])
    if "positivity" in checks:
        rep = engine.positivity_report(range(max(lo, 1), hi + 1))
        all_pos = all(entry[t]["all_positive"]
                      for entry in rep["per_k"].values() for t in entry)
        rep["all_positive"] = all_pos
        rep["pass"] = all_pos if rep["assertion_grade"] else None
        run["positivity"] = rep
        if rep["assertion_grade"]:
            gate.append(all_pos)
    if "toric" in checks:
        run["toric"] = toric_report(n, int(args.i) if args.i else None)
        gate.append(run["toric"]["pass"])
    if "charts" in checks:
        rep = chart_checks(h, raise_on_mismatch=False)
        run["charts"] = rep
        if h.reversible_ok:
            gate.append(rep["pass"])
    report["pass"] = all(gate)
    if args.format == "json":
        _emit(_dump(report), args.out)
    else:
        lines = [f"H = {h.render()}   k in [{lo}, {hi}]   seed = {seed}"]
        for name, body in report["checks"].items():
            status = body.get("pass")
            lines.append(f"  {name:12s} {'PASS' if status else 'FAIL' if status is False else '-'}")
        lines.append(f"overall: {'PASS' if report['pass'] else 'FAIL'}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if report["pass"] else 4


# -- thin wrappers ----------------------------------------------------------


def cmd_toric(args) -> int:
    n = int(args.n)
    report = toric_report(n, int(args.i) if args.i is not None else None)
    if args.H:
        h = _parse_h(args.H)
    else:
        h = validate_h([1] + [0] * (n - 1) + [1])
    report["charts"] = chart_checks(h, raise_on_mismatch=False)
    report["pass"] = report["pass"] and (report["charts"]["pass"]
                                         or not h.reversible_ok)
    _emit(_dump(report), args.out)
    return 0 if report["pass"] else 4


def cmd_pit(args) -> int:
    h = _parse_h(args.H)
    seed = _resolve_seed(args)
    lo, hi = _parse_range(args.k)
    dims = tuple(int(d) for d in args.dims.split(","))
    engine = Engine(h, _budget(args))
    targets = ("x", "y") if args.target == "both" else (args.target,)
    reports = []
    ok = True
    for k in range(lo, hi + 1):
        for target in targets:
            rep = verify_iterate(h, engine.value(k, target), k, target,
                                 trials=int(args.trials), dims=dims,
                                 p=int(args.prime), seed=seed)
            reports.append(rep.to_json())
            ok = ok and rep.ok
    payload = reports[0] if len(reports) == 1 else reports
    _emit(_dump(payload), args.out)
    return 0 if ok else 4


def cmd_division_check(args) -> int:
    h = _parse_h(args.H)
    k = int(args.k)
    engine = Engine(h, _budget(args))
    table = {}
    ok = True
    for j in range(k):
        w_j = engine.value(j, "y")
        p_j = poly_eval_nc(h, engine.value(j, "x"))
        prob = left_divide(w_j, p_j, rounds=int(args.rounds))
        agrees = (prob.status == SOLVED
                  and prob.quotient == engine.value(j + 1, "x"))
        table[str(j)] = {"status": prob.status, "agrees": agrees,
                         "support_size": prob.support_size}
        if prob.status == SOLVED:
            ok = ok and agrees
    payload = {"H": h.coeff_strings(), "steps": table, "pass": ok}
    _emit(_dump(payload), args.out)
    return 0 if ok else 4


# -- wiring ------------------------------------------------------------------


def _add_common(sp, with_h=True):
    if with_h:
        sp.add_argument("--H", default="1,0,1",
                        help="comma-separated rational coefficients, constant first")
    sp.add_argument("--config", help="key=value config file supplying defaults")
    sp.add_argument("--out", help="write output to this file instead of stdout")
    sp.add_argument("--max-k", dest="max_k", default=8, help="iteration budget on |k|")
    sp.add_argument("--max-terms", dest="max_terms", default=10_000_000,
                    help="term count budget per element")
    sp.add_argument("--max-seconds", dest="max_seconds", default=None,
                    help="wall clock budget per iterate call")


def build_parser():
    parser = _Parser(prog="nclaurent",
                     description="noncommutative Laurent phenomenon engine")
    sub = parser.add_subparsers(dest="command", required=True)
    sp_map = {}

    it = sub.add_parser("iterate", help="compute map^k of a generator")
    _add_common(it)
    it.add_argument("--k", default="1", help="power K or range LO:HI")
    it.add_argument("--target", choices=("x", "y", "both"), default="x")
    it.add_argument("--format", choices=("text", "json"), default="json")
    it.add_argument("--out-dir", dest="out_dir",
                    help="write one JSON file per (k, target) here")
    it.set_defaults(func=cmd_iterate)

    ver = sub.add_parser("verify", help="run the cross-validation suite")
    _add_common(ver)
    ver.add_argument("--k-range", dest="k_range", default="-6:6")
    ver.add_argument("--checks", default=None,
                     help=f"comma list from: {', '.join(ALL_CHECKS)}")
    ver.add_argument("--seed", default=None)
    ver.add_argument("--trials", default=20)
    ver.add_argument("--dims", default="2,3")
    ver.add_argument("--prime", default=DEFAULT_PRIME)
    ver.add_argument("--rounds", default=2, help="division support expansions")
    ver.add_argument("--n", default=None, help="toric degree (default: deg H)")
    ver.add_argument("--i", default=None, help="toric fan index to include")
    ver.add_argument("--format", choices=("text", "json"), default="json")
    ver.set_defaults(func=cmd_verify)

    to = sub.add_parser("toric", help="lattice checks for one degree")
    _add_common(to, with_h=False)
    to.add_argument("--H", default=None,
                    help="H for the chart checks (default 1 + x^n)")
    to.add_argument("--n", required=True)
    to.add_argument("--i", default=None)
    to.set_defaults(func=cmd_toric)

    pit = sub.add_parser("pit", help="matrix-evaluation identity testing")
    _add_common(pit)
    pit.add_argument("--k", default="3", help="power K or range LO:HI")
    pit.add_argument("--target", choices=("x", "y", "both"), default="both")
    pit.add_argument("--trials", default=20)
    pit.add_argument("--dims", default="2,3")
    pit.add_argument("--prime", default=DEFAULT_PRIME)
    pit.add_argument("--seed", default=None)
    pit.set_defaults(func=cmd_pit)

    dv = sub.add_parser("division-check", help="left-division agreement table")
    _add_common(dv)
    dv.add_argument("--k", default="4", help="verify the first K steps")
    dv.add_argument("--rounds", default=2)
    dv.set_defaults(func=cmd_division_check)

    sp_map.update({"iterate": it, "verify": ver, "toric": to, "pit": pit,
                   "division-check": dv})
    return parser, sp_map


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser, sp_map = build_parser()
    try:
        cfg_path = _extract_config_path(argv)
        if cfg_path:
            cfg = _load_config(cfg_path)
            command = next((a for a in argv if not a.startswith("-")), None)
            sp = sp_map.get(command)
            if sp is None:
                raise UsageError("--config needs a known subcommand")
            valid = {a.dest for a in sp._actions}
            unknown = sorted(set(cfg) - valid)
            if unknown:
                raise UsageError(f"unknown config keys: {', '.join(unknown)}")
            sp.set_defaults(**cfg)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NotLaurent as exc:
        print(f"NOT LAURENT: {exc}", file=sys.stderr)
        print(_dump(exc.bundle), file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except NCLaurentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
