"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Tolerances are pinned: every comparison below is exact (integer equality or
``<=``) and every randomized check must see zero violations.
"""

import itertools
import random
from pathlib import Path

import pytest

from atr.bigstep import eval_bigstep
from atr.cek import eval_cek, run_cek
from atr.cli import _pathologies
from atr.corpus import check_corpus
from atr.errors import AffinityError, AtrTypeError, TailPosError
from atr.harness import corpus_subjects, decomposition_trials, random_env, run_trials
from atr.labels import BOX, Label
from atr.oracle import OracleTable, validate_environment
from atr.parser import parse_program, parse_term
from atr.sop.eval import length_env, sop_eval
from atr.sop.gr import GR_SIGMA, gr_safe_bound, random_gr
from atr.syntax import App, Const, app
from atr.tc import TC, TInterp, dally, lambda_star, star_all, tc_of_oracle, val
from atr.typecheck import check, check_program
from atr.types import N, arrow, format_type, shift_D, shifts_to, undo

from termgen import random_env as random_term_env, random_term

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
TRIALS = 200
SEED = 0
L_MAX = 8
GRID = range(L_MAX + 1)


def verdict(n: int, title: str, failures: list, summary: str = "") -> None:
    ok = not failures
    detail = summary if ok else "; ".join(failures[:6])
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {title}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def trials():
    subjects = corpus_subjects(CORPUS)
    return subjects, run_trials(subjects, TRIALS, SEED, L_MAX)


def test_1_typing_corpus():
    fails = []
    expected = {
        "reverse": ("reverse", "N@e -> N@d0"),
        "prn": ("prn", "(N@d0 -> N@d0 -> N@d0) -> N@e -> N@d0"),
        "cat": ("cat", "N@e -> N@d0 -> N@d0"),
        "fcat": ("fcat", "(N@d0 -> N@b1) -> N@e -> N@d1"),
        "findk": ("findk", "(N@d0 -> N@b1) -> N@e -> N@e"),
        "bcl_cat": ("cat", "N@e -> N@d0 -> N@d0"),
        "bcl_dup": ("dup", "N@e -> N@e -> N@d0"),
    }
    for file, (name, ty) in expected.items():
        prog = parse_program((CORPUS / f"{file}.atr").read_text())
        got = format_type(check_program(prog)[name].type, True)
        if got != ty:
            fails.append(f"{file}: {name} : {got}, want {ty}")
    for src, err in (('crec "0" (lamr (f : N@e -> N@e) . lam (x : N@e) . f (f x))', AffinityError),
                     ('crec "0" (lamr (f : N@e -> N@d0) . lam (x : N@e) . c0 (f x))', TailPosError)):
        try:
            check(parse_term(src))
            fails.append(f"accepted {src}")
        except AtrTypeError as e:
            if not isinstance(e, err):
                fails.append(f"{src} rejected with {type(e).__name__}, want {err.__name__}")
    rep = check_corpus(CORPUS)
    fails += [f"{e.file}: {e.outcome} {e.detail}" for e in rep.entries if not e.ok]
    verdict(1, "typing corpus", fails, f"{len(rep.entries)} corpus files as declared")


def test_2_shift_algebra():
    fails = []
    step = arrow(N("e"), N("b1"))
    for d in range(1, 7):
        for side in (BOX, "◇"):
            got = undo(step, Label.of(side, d))
            if got != Label.of(BOX, d - 1):
                fails.append(f"undo(N_□0→N_□1, {side}{d}) = {got}")
    level2 = arrow(step, N("b3"))
    wider = arrow(N("e"), N("b2"))
    d = shift_D(level2, [wider])
    if 3 + d != 6:
        fails.append(f"level-2 shift reaches depth {3 + d}, want 6")
    if not shifts_to(level2, arrow(wider, N("b6"))) or shifts_to(level2, arrow(wider, N("b5"))):
        fails.append("shifts_to disagrees with the depth-6 bound")
    prog = parse_program((CORPUS / "oracle_twice.atr").read_text())
    got = check_program(prog)["main"].type
    if got != N("b2"):
        fails.append(f"f (f x) : {got}, want N_□◇□◇")
    verdict(2, "shift algebra", fails, "undo for d=1..6, D=3 so depth 6, f (f x) : N_□◇□◇")


def test_3_worked_time_identities():
    """Asserted exactly as stated; see the README for why parts of this fail."""
    fails = []
    ti = TInterp()
    g = parse_term("lam (y : N@e) . c0 (c0 y)")
    A = parse_term("lam (f : N@e -> N@d0) . lam (x : N@e) . f x")
    tg = ti.ev(g, {})
    tag = ti.ev(App(A, g), {})
    want_g = {p: (max(1, p) + 4, p + 2) for p in GRID}
    if tg.cost != 1 or {p: tuple(tg.pot(p)) for p in GRID} != want_g:
        fails.append("⟦g⟧ ≠ (1, λp.(1∨p+4, p+2))")
    want_ag = dally(7, tg)
    got_tab = {p: tuple(tag.pot(p)) for p in GRID}
    want_tab = {p: tuple(want_ag.pot(p)) for p in GRID}
    if tag.cost != want_ag.cost or got_tab != want_tab:
        fails.append(f"⟦A g⟧ = ({tag.cost}, p=1↦{got_tab[1]}) but dally(7,⟦g⟧) = "
                     f"({want_ag.cost}, p=1↦{want_tab[1]})")

    for k in (1, 2, 3):
        names = [f"x{i}" for i in range(k)]
        body = lambda env: TC(sum(env[n].pot for n in names) + 2, sum(env[n].pot for n in names))
        grid = list(itertools.product(range(4), repeat=k))
        bad = []
        for ps in grid:
            rho = [val(p) for p in ps]
            lhs = star_all(lambda_star(names, body, {}), *rho)
            x = body(dict(zip(names, rho)))
            rhs = dally(5 * k + 4 + sum(t.cost for t in rho), x)
            if (lhs.cost, lhs.pot) != (rhs.cost, rhs.pot):
                bad.append((ps, lhs.cost, rhs.cost))
        if bad:
            ps, l, r = bad[0]
            fails.append(f"curry k={k}: {len(bad)}/{len(grid)} grid points differ, e.g. {ps}: {l} vs {r}")

    for k in (1, 2, 3):
        rng = random.Random(f"oracle:{k}")
        table = {tuple(rng.choice(["", "0", "1", "01"]) for _ in range(k)): rng.choice(["", "1", "011"])
                 for _ in range(4)}
        f = OracleTable.make("f", k, table, "0")
        grid = list(itertools.product(range(4), repeat=k))
        bad = []
        for lens in grid:
            out = star_all(tc_of_oracle(f), *(TC(max(1, n), n) for n in lens))
            fl = out.pot
            want = sum(max(1, n) for n in lens) + max(1, fl) + 5 * k - 1
            if out.cost != want:
                bad.append((lens, out.cost, want))
        if bad:
            lens, l, r = bad[0]
            fails.append(f"oracle k={k}: {len(bad)}/{len(grid)} grid points differ, e.g. {lens}: {l} vs {r}")
    verdict(3, "worked time-complexity identities", fails, "all identities hold on the grid")


def test_4_size_bound_soundness(trials):
    subjects, results = trials
    fails = [f"trial {t.index} ({t.subject}): |v|={t.value_len} > {t.size_bound}"
             for t in results if "|value| <= size bound" in t.violations]
    if len(results) != TRIALS:
        fails.append(f"ran {len(results)} trials")
    prn = next(s for s in subjects if s.name == "prn")
    e_ty = prn.gamma["e"]
    checked = 0
    for i in range(20):
        rng = random.Random(f"prn:{i}")
        env = random_env(rng, {"e": e_ty}, L_MAX)
        rep = validate_environment(env, {"e": e_ty}, L_MAX)
        for n in GRID:
            y = "".join(rng.choice("01") for _ in range(n))
            lenv = length_env({**env, "y": y}, prn.gamma, L_MAX, rep.q_tables)
            q, r = lenv["e"].q(), lenv["e"].r()
            bound = sop_eval(prn.extraction.size_form.body(), lenv, L_MAX)
            behaviour = (n + 1) * q + r
            value = run_cek(prn.term(), {**env, "y": y}).value
            checked += 1
            if not len(value) <= behaviour <= bound:
                fails.append(f"prn e={i} |y|={n}: |v|={len(value)}, (|y|+1)q+r={behaviour}, bound={bound}")
    verdict(4, "size-bound soundness", fails,
            f"{len(results)} trials and {checked} prn grid points, 0 violations")


CHAIN = ("cost_cek <= cost(T)", "cost(T) <= bound cost", "|value| <= Pot(T)",
         "Pot(T) <= bound potential")


def test_5_time_bound_chain(trials):
    _, results = trials
    fails = [f"trial {t.index} ({t.subject}): {v}" for t in results for v in t.violations if v in CHAIN]
    verdict(5, "time-bound soundness chain", fails, f"{len(results)} trials, 0 violations")


def test_6_recursion_depth(trials):
    _, results = trials
    fails = [f"trial {t.index} ({t.subject}): {v} {t.unfoldings} vs {t.depth_bounds}"
             for t in results for v in t.violations if v.startswith("unfoldings")]
    observed = sum(1 for t in results if t.unfoldings)
    if not observed:
        fails.append("no trial exercised a recursion")
    verdict(6, "recursion-depth bound", fails, f"{observed} trials with recursion, 0 violations")


def test_7_pathologies():
    fails = [f"{k} accepted" for k, ok in _pathologies(L_MAX).items() if ok]
    for name, g, rule, grow in (("e1", "g1", "identity", lambda l: l * l),
                                ("e2", "g2", "double", lambda l: 2 * l)):
        prog = parse_program((CORPUS / f"{name}.atr").read_text())
        oracle = OracleTable.make(g, 1, rule=rule)
        if validate_environment({g: oracle}, prog.context, L_MAX).ok:
            fails.append(f"{name}: {rule} binding for {g} validated")
        for n in (1, 2, 3):
            want = n
            for _ in range(n):
                want = grow(want)
            got = len(eval_cek(app(prog.resolved(name), Const("1" * n)), {g: oracle}))
            if got != want:
                fails.append(f"{name}(n={n}) has length {got}, want {want}")
    verdict(7, "pathology rejection", fails, "both bindings rejected; n^(2^n) and n·2^n reproduced")


def test_8_machine_vs_bigstep():
    fails = []
    for i in range(500):
        rng = random.Random(f"cek:{i}")
        e, env = random_term(rng, 5), random_term_env(rng)
        a, b = eval_cek(e, env), eval_bigstep(e, env)
        if a != b:
            fails.append(f"term {i}: {a!r} vs {b!r}")
    subjects = corpus_subjects(CORPUS)
    for s in subjects:
        for i in range(5):
            env = random_env(random.Random(f"cek:{s.name}:{i}"), s.gamma, 4)
            a, b = eval_cek(s.term(), env), eval_bigstep(s.term(), env)
            if a != b:
                fails.append(f"{s.name} env {i}: {a!r} vs {b!r}")
    verdict(8, "machine determinism and oracle equivalence", fails,
            f"500 random terms and {len(subjects)} corpus programs agree")


def test_9_affine_decomposition():
    fails, count = [], 0
    for s in corpus_subjects(CORPUS):
        for fname, i, rep in decomposition_trials(s.program.resolved(s.entry), s.program.context,
                                                  50, SEED, L_MAX):
            count += 1
            if not rep.ok:
                fails.append(f"{s.name}/{fname} env {i}: {rep.to_json()}")
    if not count:
        fails.append("no recursion bodies found")
    verdict(9, "affine decomposition", fails, f"{count} body/environment pairs, 0 violations")


def test_10_gr_safe_bounds():
    fails, points = [], 0
    fns = {"g": (lambda v: v + 1, lambda v: 2 * v), "h": (lambda v: v * v, lambda v: v + 3)}
    for i in range(100):
        s, _ = random_gr(random.Random(f"gr:{i}"), 3)
        bound = gr_safe_bound(s, GR_SIGMA)
        for x, y, m, w in itertools.product(range(3), repeat=4):
            for g, h in itertools.product(*fns.values()):
                env = {"x": x, "y": y, "m": m, "w": w, "g": g, "h": h}
                points += 1
                a, b = sop_eval(s, env), sop_eval(bound, env)
                if a > b:
                    fails.append(f"term {i} at {(x, y, m, w)}: {a} > {b}")
    verdict(10, "GR safe bounds", fails, f"100 terms, {points} grid points, 0 violations")
