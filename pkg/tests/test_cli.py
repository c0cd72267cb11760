import orjson
import pytest
from typer.testing import CliRunner

from inqml.main import app
from tests.conftest import M0_DOC

runner = CliRunner()


@pytest.fixture(autouse=True)
def quiet_logging(monkeypatch):
    monkeypatch.setattr("inqml.main.setup_logging", lambda level=None: None)


def run(*args: str):
    return runner.invoke(app, [str(a) for a in args])


def payload(result) -> dict:
    assert result.exit_code == 0, result.output
    return orjson.loads(result.stdout)


# ----------------------------
# check / translate / grade
# ----------------------------
@pytest.mark.parametrize(
    "point, formula, verdict",
    [
        (("--state", "w0,w1"), "?p", "unsupported"),
        (("--state", ""), "bot", "supported"),
        (("--world", "w0"), "[+] ?p", "supported"),
        (("--state", "w0"), "p", "supported"),
        (("--state", "w0,w1"), "p \\/ ~p", "supported"),
    ],
)
@pytest.mark.parametrize("strategy", ["naive", "graded"])
def test_check(m0_file, point, formula, verdict, strategy):
    out = payload(run("check", m0_file, formula, *point, "--strategy", strategy, "--json"))
    assert out["verdict"] == verdict
    assert out["supported"] is (verdict == "supported")
    assert out["strategy"] == strategy


def test_check_uses_stored_point(write_doc):
    path = write_doc("pointed.json", {**M0_DOC, "state": ["w1"]})
    assert payload(run("check", path, "~p", "--json"))["verdict"] == "supported"


def test_check_trace(m0_file):
    out = payload(run("check", m0_file, "?p", "--state", "w0,w1", "--trace", "--json"))
    assert out["trace"][-1] == "{w0, w1} ⊭ p vv (p -> bot)"


@pytest.mark.parametrize(
    "args",
    [
        ("q", "--state", "w0"),
        ("p &", "--state", "w0"),
        ("p", "--state", "w7"),
        ("p",),
        ("p", "--state", "w0", "--world", "w0"),
    ],
)
def test_check_errors(m0_file, args):
    result = run("check", m0_file, *args, "--json")
    assert result.exit_code == 1


def test_check_rejects_invalid_model(write_doc):
    path = write_doc("invalid.json", {"worlds": ["w0", "w1"], "sigma": {"w0": [[]]}})
    assert run("check", path, "p", "--state", "w0").exit_code == 1


def test_missing_model_file(tmp_path):
    assert run("check", tmp_path / "nope.json", "p", "--state", "").exit_code == 1


def test_translate():
    out = payload(run("translate", "p", "--json"))
    assert out["translation"] == "forall x1. (x1 in L -> P(x1))"
    assert out["flatness"] == 0
    assert out["tuple_length"] == 1
    out = payload(run("translate", "?p", "--json"))
    assert out["flatness"] == 1
    assert out["tuple_length"] == 2
    assert out["world_variables"] == 4


def test_translate_world_variant():
    assert payload(run("translate", "p", "--variant", "world", "--json"))["translation"] == "P(x)"
    out = payload(run("translate", "bot", "--variant", "world", "--json"))
    assert out["translation"] == "~(x = x)"
    assert out["tuple_length"] == 1


def test_translate_rejects_unknown_variant():
    assert run("translate", "p", "--variant", "team").exit_code == 1


def test_grade():
    out = payload(run("grade", "?p & [] (q vv r)", "--json"))
    assert out["flatness"] == 1
    assert out["tuple_length"] == 2
    assert out["modal_depth"] == 1


# ----------------------------
# validate / closure / encode
# ----------------------------
def test_validate(m0_file, p0_file, write_doc):
    assert payload(run("validate", m0_file, "--json"))["level"] == "proper"
    assert payload(run("validate", p0_file, "--json"))["level"] == "pseudo"
    path = write_doc("invalid.json", {"worlds": ["w0", "w1"], "sigma": {"w0": [[]]}})
    out = payload(run("validate", path, "--json"))
    assert out == {"level": "invalid", "world": "w1", "reason": "empty-assignment"}


def test_closure_writes_document(p0_file, tmp_path):
    target = tmp_path / "closed.json"
    assert run("closure", p0_file, "--out", target).exit_code == 0
    closed = orjson.loads(target.read_bytes())
    assert sorted(map(sorted, closed["sigma"]["w0"])) == [[], ["w0"], ["w0", "w1"], ["w1"]]
    assert payload(run("validate", target, "--json"))["level"] == "proper"


def test_encode_and_validate_relational(m0_file, p0_file, tmp_path):
    full = orjson.loads(run("encode", m0_file, "--state", "w0", "--policy", "full").stdout)
    assert len(full["states"]) == 4
    target = tmp_path / "rel.json"
    assert run("encode", p0_file, "--world", "w0", "--out", target).exit_code == 0
    out = payload(run("validate", target, "--relational", "--json"))
    assert out["level"] == "pseudo"
    assert out["condition"] == "downward-closure"
    closed = tmp_path / "rel-closed.json"
    assert run("closure", target, "--relational", "--out", closed).exit_code == 0
    assert payload(run("validate", closed, "--relational", "--json"))["level"] == "model"


# ----------------------------
# bisim / ef
# ----------------------------
def test_bisim_level_one(m0_file):
    out = payload(
        run("bisim", m0_file, m0_file, "--left-state", "w0", "--right-state", "w1", "--level", "1", "--json")
    )
    assert out["equivalent"] is False
    assert out["bulk_equivalent"] is False
    assert out["witness"][0] == {"kind": "world", "side": "left", "challenge": ["w0"], "response": ["w1"]}


def test_bisim_full(m0_file):
    out = payload(run("bisim", m0_file, m0_file, "--left-state", "w0,w1", "--right-state", "w1,w0", "--json"))
    assert out["level"] == "omega"
    assert out["equivalent"] is True
    assert out["witness"] is None


def test_ef(m0_file):
    out = payload(
        run(
            "ef", m0_file, m0_file,
            "--left-world", "w0", "--right-world", "w1",
            "--level", "1", "--samples", "30", "--json",
        )
    )
    assert out["equivalent"] is False
    assert out["distinguishing"] is not None
    assert out["sampled"] == 30


# ----------------------------
# fuzz / replay
# ----------------------------
def test_fuzz_clean_run(tmp_path):
    report = tmp_path / "report.json"
    out = payload(
        run(
            "fuzz", "--seed", "3", "--trials", "3", "--max-worlds", "2", "--props", "2", "--depth", "2",
            "--checks", "fragment,graded,persistency,closure,roundtrip", "--out", report, "--json",
        )
    )
    assert out["failures"] == 0
    assert out["trials"] == 15
    assert orjson.loads(report.read_bytes())["summary"] == "0 failures / 15 trials"


def test_fuzz_with_mutation_writes_replayable_bundles(tmp_path):
    bundles = tmp_path / "bundles"
    result = run(
        "fuzz", "--seed", "1", "--trials", "2", "--max-worlds", "2", "--props", "1",
        "--checks", "fragment", "--mutate", "closure-drops-empty", "--bundle-dir", bundles, "--json",
    )
    assert result.exit_code == 1
    assert orjson.loads(result.stdout)["failures"] == 2
    written = sorted(bundles.glob("*.json"))
    assert [p.name for p in written] == ["fragment-0.json", "fragment-1.json"]
    replayed = run("replay", written[0], "--json")
    assert replayed.exit_code == 1
    assert orjson.loads(replayed.stdout)["failed"] is True


@pytest.mark.parametrize(
    "args",
    [("--checks", "bogus"), ("--policy", "sideways"), ("--mutate", "no-such-bug"), ("--trials", "0")],
)
def test_fuzz_rejects_bad_options(args):
    assert run("fuzz", *args).exit_code in (1, 2)
