"""Command-line front end: check, run, size-bound, time-bound, verify and corpus."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .cek import DEFAULT_FUEL, format_trace, run_cek
from .corpus import check_corpus
from .errors import (
    AtrError, AtrTypeError, DecompositionViolation, ExtractionFailure, ParseError,
    SoundnessViolation,
)
from .extract import extract
from .harness import (
    Subject, corpus_subjects, decomposition_trials, random_env, run_trial, run_trials,
)
from .oracle import DEFAULT_LMAX, RULES, OracleTable, load_env, validate_environment
from .parser import parse_program
from .sop.eval import length_env, sop_eval
from .syntax import Var, app
from .typecheck import DIALECTS, check_program
from .types import format_type

SCHEMA = "atr-report/1"
OK, FAILED, USAGE, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(report: dict, args) -> None:
    report = {"schema": SCHEMA, **report}
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
    if getattr(args, "report", None):
        Path(args.report).write_text(text + "\n")
    print(text)


def _read_program(path):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return parse_program(p.read_text())


def _read_env(path) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such environment file: {path}")
    return load_env(p)


def _subject(args):
    prog = _read_program(args.file)
    entry = args.entry or prog.main_name
    check_program(prog)
    ex = extract(prog.resolved(entry), prog.declared_type(entry), prog.context)
    return Subject(Path(args.file).stem, prog, entry, ex)


def _fill_env(subject: Subject, env: dict, rng: random.Random, L_max: int) -> dict:
    missing = {n: t for n, t in subject.gamma.items() if n not in env}
    return {**env, **random_env(rng, missing, L_max)}


# commands -------------------------------------------------------------------

def cmd_check(args) -> int:
    prog = _read_program(args.file)
    dialect = args.dialect or prog.dialect or "atr"
    try:
        ders = check_program(prog, dialect)
    except AtrTypeError as e:
        _emit({"command": "check", "file": args.file, "dialect": dialect, "ok": False,
               "error": type(e).__name__, "rule": e.rule, "message": str(e)}, args)
        return FAILED
    if args.emit_derivation:
        text = "\n\n".join(f"{n}:\n{d.render(1)}" for n, d in ders.items())
        Path(args.emit_derivation).write_text(text + "\n")
    _emit({"command": "check", "file": args.file, "dialect": dialect, "ok": True,
           "types": {n: format_type(d.type, True) for n, d in ders.items()}}, args)
    return OK


def _entry_term(prog, entry):
    from .syntax import strip_lams
    ty = prog.declared_type(entry)
    term = prog.resolved(entry)
    k = len(getattr(ty, "args", ()))
    names = [n for n, _ in strip_lams(term, k)[0]]
    return term, names, ty


def cmd_run(args) -> int:
    prog = _read_program(args.file)
    entry = args.entry or prog.main_name
    env = _read_env(args.env)
    term, names, ty = _entry_term(prog, entry)
    missing = [n for n in names if n not in env] + [n for n in prog.context if n not in env]
    if missing:
        raise UsageError(f"environment does not bind {', '.join(missing)}")
    res = run_cek(app(term, *(Var(n) for n in names)), env, args.fuel, args.trace)
    value = res.value if isinstance(res.value, str) else repr(res.value)
    if args.trace:
        print(format_trace(res), file=sys.stderr)
    _emit({"command": "run", "file": args.file, "entry": entry, "value": value,
           "length": len(value), "cost": res.cost, "steps": res.steps,
           "unfoldings": res.unfoldings, "breakdown": res.breakdown}, args)
    return OK


def _bound_report(args, kind: str) -> int:
    s = _subject(args)
    ex = s.extraction
    rep = {"command": kind, "file": args.file, "entry": s.entry,
           "type": format_type(s.program.declared_type(s.entry), True)}
    if kind == "size-bound":
        rep.update({"bound": str(ex.size_bound), "form": ex.size_form.to_json(),
                    "crec_sites": [r.to_json() for r in ex.reports]})
    else:
        rep.update({"cost": str(ex.cost), "potential": str(ex.pot),
                    "tc_polynomial": str(ex.time_bound)})
    status = OK
    if args.env or args.verify:
        env = _read_env(args.env)
        n = max(1, args.verify or 1)
        trials = []
        for i in range(n):
            rng = random.Random(f"{args.seed}:{i}")
            full = _fill_env(s, env, rng, args.lmax)
            t = run_trial(s, full, i, args.lmax, args.fuel)
            trials.append(t.to_json())
            if not t.ok:
                status = INTERNAL
        rep["trials"] = trials
        rep["ok"] = status == OK
    _emit(rep, args)
    return status


def cmd_size_bound(args) -> int:
    return _bound_report(args, "size-bound")


def cmd_time_bound(args) -> int:
    return _bound_report(args, "time-bound")


def cmd_verify(args) -> int:
    s = _subject(args)
    env = _read_env(args.env)
    given = {k: v for k, v in env.items() if k in s.gamma}
    rep = validate_environment(given, {k: s.gamma[k] for k in given}, args.lmax)
    if not rep.ok:
        _emit({"command": "verify", "file": args.file, "ok": False,
               "validation": rep.to_json()}, args)
        return FAILED
    rows = []
    ok = True
    for i in range(args.trials):
        rng = random.Random(f"{args.seed}:{i}")
        t = run_trial(s, _fill_env(s, given, rng, args.lmax), i, args.lmax, args.fuel)
        ok &= t.ok
        rows.append(t.to_json())
    print(f"{'#':>3} {'cost_cek':>9} {'cost(T)':>9} {'bound':>12} {'|v|':>5} {'Pot(T)':>7} "
          f"{'bound':>7}", file=sys.stderr)
    for r in rows:
        print(f"{r['index']:>3} {r['cek_cost']:>9} {r['t_cost']:>9} {r['bound_cost']:>12} "
              f"{r['value_len']:>5} {r['t_pot']:>7} {r['bound_pot']:>7}", file=sys.stderr)
    _emit({"command": "verify", "file": args.file, "entry": s.entry, "ok": ok,
           "trials": rows}, args)
    return OK if ok else INTERNAL


def cmd_corpus(args) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        raise UsageError(f"no such corpus directory: {args.dir}")
    typing = check_corpus(root)
    rep = {"command": "corpus", "dir": args.dir, "typing": typing.to_json()}
    ok = typing.ok
    internal = False
    if args.all:
        subjects = corpus_subjects(root)
        trials = run_trials(subjects, args.trials, args.seed, args.lmax, args.fuel)
        bad = [t.to_json() for t in trials if not t.ok]
        internal |= bool(bad)
        rep["trials"] = {"count": len(trials), "violations": bad}
        dec = []
        for s in subjects:
            for fname, i, r in decomposition_trials(s.program.resolved(s.entry), s.program.context,
                                                    args.decomposition, args.seed, args.lmax):
                if not r.ok:
                    dec.append({"subject": s.name, "fname": fname, "index": i, **r.to_json()})
        internal |= bool(dec)
        rep["affine_decomposition"] = {"violations": dec}
        patho = _pathologies(args.lmax)
        ok &= all(not v for v in patho.values())
        rep["pathologies_rejected"] = {k: not v for k, v in patho.items()}
    rep["ok"] = ok and not internal
    _emit(rep, args)
    if internal:
        return INTERNAL
    return OK if ok else FAILED


def _pathologies(L_max: int) -> dict:
    from .types import N, arrow
    cases = {
        "identity at N@d0 -> N@e": ("identity", arrow(N("d0"), N("e"))),
        "double at N@d0 -> N@d0": ("double", arrow(N("d0"), N("d0"))),
    }
    out = {}
    for label, (rule, ty) in cases.items():
        f = OracleTable.make("g", 1, rule=rule)
        out[label] = validate_environment({"g": f}, {"g": ty}, L_max).ok
    return out


# parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="atr", description="ATR type checker, machine and bound extractors")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, env=False):
        sp.add_argument("--report", metavar="PATH", help="also write the JSON report here")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--lmax", type=int, default=DEFAULT_LMAX, help="length grid bound")
        sp.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="machine step budget")
        if env:
            sp.add_argument("--env", metavar="ENV.json")
            sp.add_argument("--entry", help="declaration to use (default: main or the last one)")

    sp = sub.add_parser("check", help="type-check every declaration")
    sp.add_argument("file")
    sp.add_argument("--dialect", choices=DIALECTS)
    sp.add_argument("--emit-derivation", metavar="PATH")
    sp.add_argument("--report", metavar="PATH")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("run", help="run the entry point on the CEK machine")
    sp.add_argument("file")
    sp.add_argument("--trace", action="store_true", help="print one line per step to stderr")
    common(sp, env=True)
    sp.set_defaults(fn=cmd_run)

    for name, fn in (("size-bound", cmd_size_bound), ("time-bound", cmd_time_bound)):
        sp = sub.add_parser(name, help=f"extract the {name.replace('-', ' ')}")
        sp.add_argument("file")
        sp.add_argument("--verify", type=int, default=0, metavar="N",
                        help="run N randomized soundness trials")
        common(sp, env=True)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("verify", help="check the soundness chain side by side")
    sp.add_argument("file")
    sp.add_argument("--trials", type=int, default=20)
    common(sp, env=True)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("corpus", help="check the corpus; --all also runs the randomized suite")
    sp.add_argument("--dir", default="corpus")
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--decomposition", type=int, default=50, metavar="N",
                    help="environments per crec body for the affine decomposition check")
    common(sp)
    sp.set_defaults(fn=cmd_corpus)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "lmax", 1) < 1 or getattr(args, "fuel", 1) < 1:
        parser.error("--lmax and --fuel must be at least 1")
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"atr: {e}", file=sys.stderr)
        return USAGE
    except (SoundnessViolation, DecompositionViolation, ExtractionFailure) as e:
        print(f"atr: internal invariant violated: {type(e).__name__}: {e}", file=sys.stderr)
        return INTERNAL
    except (ParseError, AtrError) as e:
        print(f"atr: {type(e).__name__}: {e}", file=sys.stderr)
        return FAILED
    except ValueError as e:
        print(f"atr: {e}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
