import json
import shutil
from pathlib import Path

import pytest

from atr.cli import FAILED, OK, USAGE, main

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
ENVS = ROOT / "envs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out


def report(out) -> dict:
    return json.loads(out.out)


def test_check_ok(capsys):
    code, out = run(capsys, "check", CORPUS / "findk.atr")
    assert code == OK
    rep = report(out)
    assert rep["schema"] == "atr-report/1"
    assert rep["types"]["findk"] == "(N@d0 -> N@b1) -> N@e -> N@e"


def test_check_rejects_double_use(capsys):
    code, out = run(capsys, "check", CORPUS / "neg" / "double_use.atr")
    assert code == FAILED
    assert report(out)["error"] == "AffinityError"


def test_missing_file_is_usage_error(capsys):
    code, out = run(capsys, "check", CORPUS / "nope.atr")
    assert code == USAGE and "no such file" in out.err


def test_unknown_command(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == USAGE


def test_run_reverse(capsys, tmp_path):
    env = tmp_path / "env.json"
    env.write_text(json.dumps({"w": "0011"}))
    code, out = run(capsys, "run", CORPUS / "reverse.atr", "--env", env)
    assert code == OK
    rep = report(out)
    assert rep["value"] == "1100" and rep["unfoldings"] == {"f": 4}


def test_run_needs_bindings(capsys):
    code, out = run(capsys, "run", CORPUS / "reverse.atr", "--env", ENVS / "empty.json")
    assert code == USAGE and "w" in out.err


def test_run_trace(capsys, tmp_path):
    env = tmp_path / "env.json"
    env.write_text(json.dumps({"w": "1"}))
    code, out = run(capsys, "run", CORPUS / "reverse.atr", "--env", env, "--trace")
    assert code == OK and len(out.err.splitlines()) == report(out)["steps"]


def test_verify_cat(capsys):
    code, out = run(capsys, "verify", CORPUS / "cat.atr", "--env", ENVS / "empty.json", "--trials", 5)
    assert code == OK
    rep = report(out)
    assert rep["ok"] and len(rep["trials"]) == 5
    assert "cost_cek" in out.err


def test_verify_rejects_bad_oracle(capsys, tmp_path):
    env = tmp_path / "env.json"
    env.write_text(json.dumps({"g2": {"name": "g2", "arity": 1, "rule": "double", "entries": []}}))
    code, out = run(capsys, "verify", CORPUS / "e2.atr", "--env", env, "--trials", 1)
    assert code == FAILED and not report(out)["ok"]


def test_size_bound(capsys):
    code, out = run(capsys, "size-bound", CORPUS / "reverse.atr")
    assert code == OK and report(out)["bound"] == "lam |w| : T@e . 1 + |w|"


def test_time_bound_with_trials(capsys):
    code, out = run(capsys, "time-bound", CORPUS / "cat.atr", "--verify", 3)
    rep = report(out)
    assert code == OK and rep["ok"] and len(rep["trials"]) == 3


def test_reports_are_byte_identical(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, _ = run(capsys, "size-bound", CORPUS / "dup.atr", "--verify", 4, "--seed", 7, "--report", p)
        assert code == OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_seed_changes_trials(capsys):
    a = report(run(capsys, "verify", CORPUS / "cat.atr", "--trials", 3, "--seed", 1)[1])
    b = report(run(capsys, "verify", CORPUS / "cat.atr", "--trials", 3, "--seed", 2)[1])
    assert a["trials"] != b["trials"]


def test_corpus_typing_only(capsys):
    code, out = run(capsys, "corpus", "--dir", CORPUS)
    assert code == OK and report(out)["typing"]["ok"]


def test_corrupted_corpus_file_is_localized(capsys, tmp_path):
    shutil.copy(CORPUS / "cat.atr", tmp_path / "cat.atr")
    (tmp_path / "broken.atr").write_text("dialect atr;\ndef oops : N@e = (c0 eps;\n")
    code, out = run(capsys, "corpus", "--dir", tmp_path)
    assert code == FAILED
    bad = [e for e in report(out)["typing"]["entries"] if not e["ok"]]
    assert [e["file"] for e in bad] == ["broken.atr"]
    assert bad[0]["outcome"] == "ParseError"


def test_corpus_all_small(capsys):
    code, out = run(capsys, "corpus", "--dir", CORPUS, "--all", "--trials", 20, "--decomposition", 3)
    rep = report(out)
    assert code == OK, rep
    assert rep["trials"]["count"] == 20 and not rep["trials"]["violations"]
    assert all(rep["pathologies_rejected"].values())


def test_bad_lmax(capsys):
    with pytest.raises(SystemExit) as e:
        main(["verify", str(CORPUS / "cat.atr"), "--lmax", "0"])
    assert e.value.code == USAGE
