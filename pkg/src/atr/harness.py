"""Randomized soundness trials tying the machine, the T-interpretation and the bounds together.

Each trial picks a corpus program, draws a validated environment for its
oracles and random input strings, then checks

* ``cost_cek ≤ cost(T) ≤ bound cost`` and ``|value| ≤ Pot(T) ≤ bound potential``,
* ``|value| ≤ size bound``,
* the deepest clock reached by each recursion ``≤`` its unfolding bound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .cek import DEFAULT_FUEL, run_cek
from .errors import SoundnessViolation
from .extract import Extraction, extract
from .oracle import DEFAULT_LMAX, OracleTable, strings_upto, validate_environment
from .parser import Program, parse_program
from .sop.eval import length_env, sop_eval
from .syntax import Var, app, strip_lams
from .tc import TInterp, tc_env
from .types import Arrow, Base, format_type

TABLE_STRING_LEN = 4


@dataclass
class Subject:
    """A program entry point prepared for trials."""

    name: str
    program: Program
    entry: str
    extraction: Extraction

    @property
    def gamma(self) -> dict:
        return self.extraction.sigma

    @property
    def params(self) -> tuple:
        return self.extraction.params

    def term(self):
        return app(self.program.resolved(self.entry), *(Var(n) for n, _ in self.params))


def load_subject(path, entry: Optional[str] = None) -> Subject:
    prog = parse_program(Path(path).read_text())
    entry = entry or prog.main_name
    term = prog.resolved(entry)
    ex = extract(term, prog.declared_type(entry), prog.context)
    return Subject(Path(path).stem, prog, entry, ex)


def random_string(rng: random.Random, max_len: int) -> str:
    n = rng.randint(0, max_len)
    return "".join(rng.choice("01") for _ in range(n))


def random_table(rng: random.Random, name: str, arity: int, max_len: int = TABLE_STRING_LEN) -> OracleTable:
    pool = list(strings_upto(max_len))
    entries = {}
    for _ in range(rng.randint(1, 6)):
        args = tuple(rng.choice(pool) for _ in range(arity))
        entries[args] = random_string(rng, max_len)
    return OracleTable.make(name, arity, entries, "")


def random_oracle(rng: random.Random, name: str, ty: Arrow, L_max: int = DEFAULT_LMAX) -> OracleTable:
    """A table (or occasionally the identity rule) that passes validation at ``ty``."""
    k = len(ty.args)
    if rng.random() < 0.3:
        ident = OracleTable.make(name, k, rule="identity")
        if validate_environment({name: ident}, {name: ty}, L_max).ok:
            return ident
    for _ in range(20):
        t = random_table(rng, name, k)
        if validate_environment({name: t}, {name: ty}, L_max).ok:
            return t
    return OracleTable.make(name, k, rule="const")


def random_env(rng: random.Random, gamma: dict, L_max: int = DEFAULT_LMAX) -> dict:
    env = {}
    for name, ty in sorted(gamma.items()):
        if isinstance(ty, Base):
            env[name] = random_string(rng, L_max)
        else:
            env[name] = random_oracle(rng, name, ty, L_max)
    return env


@dataclass
class TrialResult:
    index: int
    subject: str
    inputs: dict
    value_len: int
    cek_cost: int
    t_cost: int
    t_pot: int
    bound_cost: int
    bound_pot: int
    size_bound: int
    unfoldings: dict
    depth_bounds: dict
    t_unfoldings: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "index": self.index, "subject": self.subject, "inputs": self.inputs,
            "value_len": self.value_len, "cek_cost": self.cek_cost, "t_cost": self.t_cost,
            "t_pot": self.t_pot, "bound_cost": self.bound_cost, "bound_pot": self.bound_pot,
            "size_bound": self.size_bound, "unfoldings": self.unfoldings,
            "depth_bounds": self.depth_bounds, "t_unfoldings": self.t_unfoldings,
            "violations": self.violations,
        }


def _inputs_json(env: dict) -> dict:
    out = {}
    for k, v in sorted(env.items()):
        out[k] = v if isinstance(v, str) else v.to_json()
    return out


def run_trial(subject: Subject, env: dict, index: int = 0, L_max: int = DEFAULT_LMAX,
              fuel: int = DEFAULT_FUEL) -> TrialResult:
    gamma = subject.gamma
    rep = validate_environment(env, gamma, L_max)
    if not rep.ok:
        raise ValueError(f"environment rejected: {rep.violations}")
    term = subject.term()
    res = run_cek(term, env, fuel)
    if not isinstance(res.value, str):
        raise SoundnessViolation("program did not produce a string")
    ti = TInterp(fuel)
    t = ti.run(term, tc_env(env, gamma, L_max))
    lenv = length_env(env, gamma, L_max, rep.q_tables)
    ex = subject.extraction
    b_cost = sop_eval(ex.cost, lenv, L_max)
    b_pot = sop_eval(ex.pot, lenv, L_max)
    size = sop_eval(ex.size_form.body(), lenv, L_max)
    depth = {}
    for r in ex.reports:
        depth[r.fname] = max(depth.get(r.fname, 0), sop_eval(r.depth, lenv, L_max))
    n = len(res.value)
    out = TrialResult(index, subject.name, _inputs_json(env), n, res.cost, t.cost, t.pot,
                      b_cost, b_pot, size, dict(sorted(res.unfoldings.items())), dict(sorted(depth.items())),
                      dict(sorted(ti.unfoldings.items())))
    checks = [
        ("cost_cek <= cost(T)", res.cost <= t.cost),
        ("cost(T) <= bound cost", t.cost <= b_cost),
        ("|value| <= Pot(T)", n <= t.pot),
        ("Pot(T) <= bound potential", t.pot <= b_pot),
        ("|value| <= size bound", n <= size),
    ]
    for f, u in res.unfoldings.items():
        checks.append((f"unfoldings of {f} <= depth bound", u <= depth.get(f, -1)))
    out.violations = [name for name, ok in checks if not ok]
    return out


DEFAULT_SUBJECTS = ("reverse", "prn", "cat", "fcat", "findk", "dup", "apply_g",
                    "oracle_twice", "e1", "e2")


def corpus_subjects(corpus_dir, names=DEFAULT_SUBJECTS) -> list:
    return [load_subject(Path(corpus_dir) / f"{n}.atr") for n in names]


def run_trials(subjects: list, n: int = 200, seed: int = 0, L_max: int = DEFAULT_LMAX,
               fuel: int = DEFAULT_FUEL) -> list:
    """``n`` seeded trials cycling through ``subjects``; replayable by index."""
    out = []
    for i in range(n):
        rng = random.Random(f"{seed}:{i}")
        s = subjects[i % len(subjects)]
        env = random_env(rng, s.gamma, L_max)
        out.append(run_trial(s, env, i, L_max, fuel))
    return out


def describe_params(subject: Subject) -> list:
    return [[n, format_type(t, True)] for n, t in subject.params]


# affine decomposition trials ------------------------------------------------

def random_arrow_tc(rng: random.Random, k: int):
    """A monotone value-form time complexity of a k-ary first-order function."""
    from .tc import TC
    a = [rng.randint(1, 5) for _ in range(k + 1)]
    b = [rng.randint(0, 3) for _ in range(k + 1)]

    def step(done: tuple):
        def pot(p):
            args = done + (p,)
            if len(args) == k:
                return TC(a[0] + sum(x * y for x, y in zip(a[1:], args)),
                          b[0] + sum(x * y for x, y in zip(b[1:], args)))
            return TC(1, step(args))
        return pot

    return TC(1, step(()))


def random_tc(rng: random.Random, ty, L_max: int = DEFAULT_LMAX):
    from .tc import val
    if isinstance(ty, Base):
        return val(rng.randint(0, L_max))
    if all(isinstance(a, Base) for a in ty.args):
        return random_arrow_tc(rng, len(ty.args))
    return None


def crec_sites(term) -> list:
    """Every crec subterm with the types of the λ-binders enclosing it."""
    from .syntax import Crec, Lam, children
    out = []

    def walk(t, ctx):
        if isinstance(t, Crec):
            out.append((t, dict(ctx)))
        if isinstance(t, Lam) and t.ty is not None:
            walk(t.body, {**ctx, t.name: t.ty})
            return
        for c in children(t):
            walk(c, ctx)

    walk(term, {})
    return out


def decomposition_trials(term, gamma: dict, n: int = 50, seed: int = 0,
                         L_max: int = DEFAULT_LMAX) -> list:
    """Affine decomposition reports for every crec body in ``term``, ``n`` environments each."""
    from .syntax import free_vars, pretty
    from .tc import affine_decomposition_check
    out, seen = [], set()
    for site, ctx in crec_sites(term):
        key = pretty(site)
        if key in seen:
            continue
        seen.add(key)
        k = len(site.fty.args)
        params, body = strip_lams(site.body, k)
        types = {**gamma, **ctx, **dict(params)}
        rng = random.Random(f"{seed}:{site.fname}:{len(seen)}")
        for i in range(n):
            env = {site.fname: random_arrow_tc(rng, k)}
            for v in sorted(free_vars(body) - {site.fname}):
                tc = random_tc(rng, types.get(v), L_max) if v in types else None
                if tc is None:
                    raise ValueError(f"no type for free variable {v} of {site.fname}")
                env[v] = tc
            out.append((site.fname, i, affine_decomposition_check(body, site.fname, k, env)))
    return out
