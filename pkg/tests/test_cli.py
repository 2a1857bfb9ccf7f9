import json
import subprocess
import sys

import pytest

from kgtab.cli import EXIT_LIMIT, EXIT_NO, EXIT_OK, EXIT_USAGE, main
from kgtab.formula import Logic, parse
from kgtab.kripke import eval_fmodel, load_model, save_model

from models import snapped_model_b, weighted_model


@pytest.fixture
def run(capsys):
    def go(*argv):
        code = main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err
    return go


@pytest.fixture
def model_file(tmp_path):
    def make(m, name="m.json"):
        path = tmp_path / name
        path.write_bytes(save_model(m))
        return str(path)
    return make


def test_prove_valid(run, tmp_path):
    code, out, _ = run("prove", "p -> p", "--logic", "kginv",
                       "--countermodel", str(tmp_path / "cm.json"))
    assert code == EXIT_OK and out.startswith("VALID")
    assert not (tmp_path / "cm.json").exists()


def test_prove_involution_biconditional(run):
    code, out, _ = run("prove", "(inv inv p -> p) & (p -> inv inv p)", "--json")
    assert code == EXIT_OK and json.loads(out)["status"] == "VALID"


def test_prove_invalid_writes_verified_countermodel(run, tmp_path):
    cm = tmp_path / "cm.json"
    code, out, _ = run("prove", "box p -> inv dia inv p", "--logic", "kginv", "--json",
                       "--countermodel", str(cm))
    payload = json.loads(out)
    assert code == EXIT_NO and payload["status"] == "INVALID"
    assert payload["countermodel"] == str(cm)
    data = json.loads(cm.read_text())
    assert {"root", "achieved", "query", "logic"} <= set(data)
    m = load_model(cm.read_bytes())
    got = eval_fmodel(m, parse(data["query"]), data["root"], Logic.KGINV)
    assert str(got.pos) == data["achieved"]["pos"] or got.pos == eval(data["achieved"]["pos"])
    assert got.pos < 1


def test_prove_kgbl_second_tableau(run, tmp_path):
    cm = tmp_path / "cm.json"
    code, out, _ = run("prove", "p iimpl p", "--logic", "kgbl", "--json",
                       "--countermodel", str(cm))
    payload = json.loads(out)
    assert code == EXIT_NO
    assert [t["index"] for t in payload["tableaux"]] == [1, 2]
    data = json.loads(cm.read_text())
    got = eval_fmodel(load_model(cm.read_bytes()), parse("p iimpl p"), data["root"], Logic.KGBL)
    assert got.negv > 0


def test_prove_trace(run, tmp_path):
    trace = tmp_path / "trace.json"
    code, _, _ = run("prove", "p & q -> p", "--trace", str(trace))
    rows = json.loads(trace.read_text())
    assert code == EXIT_OK
    assert rows and {"tableau", "branch", "rule", "principal", "children"} <= set(rows[0])


def test_prove_limit(run):
    code, out, _ = run("prove", "box(p -> q) -> box p -> box q", "--max-branches", "2")
    assert code == EXIT_LIMIT and out.startswith("LIMIT")


def test_prove_limit_from_environment(run, monkeypatch):
    monkeypatch.setenv("KGTAB_MAX_BRANCHES", "2")
    code, _, _ = run("prove", "box(p -> q) -> box p -> box q")
    assert code == EXIT_LIMIT
    monkeypatch.setenv("KGTAB_MAX_BRANCHES", "lots")
    code, _, err = run("prove", "p -> p")
    assert code == EXIT_USAGE and "KGTAB_MAX_BRANCHES" in err


@pytest.mark.parametrize("argv", [
    ("prove", "p -> -> q"),
    ("prove", "neg p", "--logic", "kginv"),
    ("prove",),
    ("prove", "p", "--logic", "k45"),
    ("frobnicate",),
    ("translate", "box1 p", "--dir", "oplus"),
])
def test_usage_errors(run, argv):
    assert run(*argv)[0] == EXIT_USAGE


def test_corpus(run, tmp_path):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("# comment\nVALID: p -> p\nINVALID: p -> box p\n")
    code, out, _ = run("prove", "--corpus", str(corpus))
    assert code == EXIT_OK and out.count("ok ") == 2
    corpus.write_text("INVALID: p -> p\n")
    assert run("prove", "--corpus", str(corpus))[0] == EXIT_NO
    corpus.write_text("MAYBE: p\n")
    assert run("prove", "--corpus", str(corpus))[0] == EXIT_USAGE


def test_eval_weighted_model(run, model_file):
    code, out, _ = run("eval", "box p", "--model", model_file(weighted_model()), "--world", "w")
    assert code == EXIT_OK and out.strip() == "w: pos 1/5, negv 0"


def test_eval_snapped_model_b(run, model_file):
    code, out, _ = run("eval", "box p", "--model", model_file(snapped_model_b()), "--world", "w",
                       "--fmodel", "--json")
    assert code == EXIT_OK and json.loads(out)["w"]["pos"] == "9/10"


def test_eval_constant_all_worlds(run, model_file):
    code, out, _ = run("eval", "1", "--model", model_file(weighted_model()), "--all", "--json")
    assert json.loads(out) == {w: {"pos": "1", "negv": "0"} for w in ("w", "w1", "w2")}


def test_eval_errors(run, model_file, tmp_path):
    path = model_file(weighted_model())
    assert run("eval", "p", "--model", path, "--world", "nowhere")[0] == EXIT_USAGE
    assert run("eval", "p", "--model", path, "--fmodel")[0] == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text('{"worlds": ["w"], "v1": [["p", "w", "7/3"]]}')
    code, _, err = run("eval", "p", "--model", str(bad))
    assert code == EXIT_USAGE and "v1[0][2]" in err
    assert run("eval", "p", "--model", str(tmp_path / "missing.json"))[0] == EXIT_USAGE


@pytest.mark.parametrize("formula,direction,expected", [
    ("box(p -> idia(neg q)) or conf r", "oplus", "box1(p -> dia1 q_star) or inv r_star"),
    ("p", "ominus", "p_star"),
    ("box1(p & q) -> dia2 p", "join", "box(p & q) -> neg box neg p"),
    ("dia2 p", "embed-bl", "B -> neg box neg p"),
    ("p", "embed-inv", "p & snot p_star"),
])
def test_translate(run, formula, direction, expected):
    code, out, _ = run("translate", formula, "--dir", direction)
    assert code == EXIT_OK and out.strip() == expected


@pytest.mark.parametrize("text,code,status", [
    ("w:1:p < c\nc < 1\n", EXIT_OK, "SAT"),
    ("c < d\nd < c\n", EXIT_NO, "UNSAT"),
    ("t0@w:1 < t0@w:1#1\nt0@w:1#1 < t1@w:1\n", EXIT_NO, "UNSAT"),
])
def test_solve(run, tmp_path, text, code, status):
    path = tmp_path / "sys.txt"
    path.write_text(text)
    got, out, _ = run("solve", "--constraints", str(path), "--json", "--explain")
    payload = json.loads(out)
    assert got == code and payload["status"] == status
    assert "variables" in payload["system"]
    if status == "SAT":
        assert all("/" in x or x in ("0", "1") for x in payload["witness"].values())


def test_solve_format_error(run, tmp_path):
    path = tmp_path / "sys.txt"
    path.write_text("c <\n")
    assert run("solve", "--constraints", str(path))[0] == EXIT_USAGE


def test_parse_command(run):
    code, out, _ = run("parse", "box(p -> idia(neg q)) or conf r", "--json")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["modal_depth"] == 2 and payload["props"] == ["p", "q", "r"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "kgtab", "prove", "p -> box p",
                           "--countermodel", str(tmp_path / "cm.json")],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_NO and proc.stdout.startswith("INVALID")
