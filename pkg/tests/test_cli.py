import json
import numpy as np
import pytest

from agti import cli
from agti.files import ParseError, read_decisions, read_ids, write_decisions, write_ids
from agti.model import GroundTruthStats, forward_three_indep
from agti.sketch import PatternSketch, tally
from agti.synth import GeneratorSpec, IdGeneratorSpec, evaluate, generate, generate_ids

from conftest import CANONICAL_FREQS, FOUR_CLASSIFIERS, MUSHROOM_LIKE


def write_sketch(tmp_path, counts, name="s.json"):
    path = tmp_path / name
    n = int(np.log2(len(counts)))
    path.write_text(PatternSketch(n, counts).dumps())
    return path


def write_spec(tmp_path, spec, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(spec.to_dict()))
    return path


def test_tally_two_rows(tmp_path, capsys):
    f = tmp_path / "d.csv"
    f.write_text("c1,c2,c3\nalpha,alpha,alpha\nbeta,beta,beta\n")
    assert cli.main(["tally", str(f)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["total"] == 2 and doc["counts"] == [1, 0, 0, 0, 0, 0, 0, 1]


def test_tally_ragged_row_names_line(tmp_path, capsys):
    f = tmp_path / "d.csv"
    f.write_text("c1,c2,c3\nalpha,alpha,alpha\nalpha,beta,beta,alpha\n")
    assert cli.main(["tally", str(f)]) == cli.EXIT_PARSE
    assert "line 3" in capsys.readouterr().err
    with pytest.raises(ParseError) as info:
        read_decisions(f)
    assert info.value.line == 3


def test_tally_custom_labels_and_truth_column(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("c1,c2,truth\nyes,no,yes\nno,no,no\n")
    out = tmp_path / "s.json"
    assert cli.main(["tally", str(f), "--labels", "yes,no", "--out", str(out)]) == 0
    assert PatternSketch.loads(out.read_text()).counts == (0, 1, 0, 1)
    assert cli.main(["tally", str(f)]) == cli.EXIT_PARSE


def test_tally_generated_file_matches(tmp_path):
    spec = GeneratorSpec(**FOUR_CLASSIFIERS, sample_size=100000, seed=9)
    sp = write_spec(tmp_path, spec)
    d = tmp_path / "d.csv"
    out = tmp_path / "s.json"
    assert cli.main(["simulate", str(sp), "--out", str(d)]) == 0
    assert cli.main(["tally", str(d), "--out", str(out)]) == 0
    sk = PatternSketch.loads(out.read_text())
    assert sk.total == 100000
    assert sk == tally(generate(spec))


def test_decisions_file_roundtrip(tmp_path):
    s = generate(GeneratorSpec(0.4, (0.8, 0.7), (0.9, 0.6), 300, seed=2))
    path = tmp_path / "d.csv"
    write_decisions(s, path, ("x", "y"))
    again = read_decisions(path, ("x", "y"))
    assert (again.decisions == s.decisions).all() and (again.truth == s.truth).all()


def test_solve_perfect(tmp_path, capsys):
    p = write_sketch(tmp_path, (5, 0, 0, 0, 0, 0, 0, 5))
    assert cli.main(["solve", str(p)]) == 0
    doc = json.loads(capsys.readouterr().out)
    a, b = doc["roots"]["a"], doc["roots"]["b"]
    assert a["prevalence"] == b["prevalence"] == 0.5
    assert a["acc_alpha"] == a["acc_beta"] == [1.0] * 3
    assert b["acc_alpha"] == b["acc_beta"] == [0.0] * 3
    assert doc["selected"] == "a" and doc["alarms"] == []


def test_solve_round_trip_fixture(tmp_path, canonical_gt):
    counts = tuple(int(x * 80000) for x in CANONICAL_FREQS)
    p = write_sketch(tmp_path, counts)
    out = tmp_path / "r.json"
    assert cli.main(["solve", str(p), "--out", str(out), "--tol-residual", "1e-6"]) == 0
    doc = json.loads(out.read_text())
    sel = doc["roots"][doc["selected"]]
    got = [sel["prevalence"], *sel["acc_alpha"], *sel["acc_beta"]]
    want = [0.3, 0.8, 0.7, 0.9, 0.75, 0.85, 0.65]
    assert np.abs(np.array(got) - want).max() <= 1e-9
    assert set(doc) >= {"frequencies", "moments", "r", "roots", "selected", "policy", "alarms"}


def test_solve_correlated_alarm(tmp_path):
    spec = GeneratorSpec(**MUSHROOM_LIKE, sample_size=100000, seed=3, pair_flip=(0, 1, 0.9))
    p = write_sketch(tmp_path, tally(generate(spec)).counts)
    out = tmp_path / "r.json"
    assert cli.main(["solve", str(p), "--out", str(out)]) == cli.EXIT_UNPHYSICAL
    doc = json.loads(out.read_text())
    assert any(a.startswith("unphysical") and "acc_" in a for a in doc["alarms"])


def test_solve_exit_codes(tmp_path):
    assert cli.main(["solve", str(tmp_path / "missing.json")]) == cli.EXIT_IO
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["solve", str(bad)]) == cli.EXIT_PARSE
    assert cli.main(["solve", str(write_sketch(tmp_path, (1,) * 8))]) == cli.EXIT_DEGENERATE
    assert cli.main(["solve", str(write_sketch(tmp_path, (1, 1, 1, 1)))]) == cli.EXIT_PARSE
    # covariance product c12 * c13 * c23 < 0
    counts = (3, 1, 1, 0, 0, 1, 2, 0)
    assert cli.main(["solve", str(write_sketch(tmp_path, counts, "v.json"))]) == cli.EXIT_INDEPENDENCE


def test_solve_policy_flags(tmp_path):
    gt = GroundTruthStats(0.01, (0.9, 0.8, 0.85), (0.95, 0.9, 0.9))
    counts = tuple(round(x * 10**8) for x in forward_three_indep(gt))
    p = write_sketch(tmp_path, counts)
    out = tmp_path / "r.json"
    assert cli.main(["solve", str(p), "--policy", "prior=0.99", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["roots"][doc["selected"]]["prevalence"] == pytest.approx(0.99, abs=1e-6)
    assert cli.main(["solve", str(p), "--policy", "manual=b", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["selected"] == "b"
    with pytest.raises(SystemExit) as info:
        cli.main(["solve", str(p), "--policy", "best"])
    assert info.value.code == 2


def test_triplets_decisions(tmp_path):
    spec = GeneratorSpec(**FOUR_CLASSIFIERS, sample_size=100000, seed=4)
    d = tmp_path / "d.csv"
    write_decisions(generate(spec), d)
    out = tmp_path / "t.json"
    assert cli.main(["triplets", str(d), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["triplets"]) == 4
    assert doc["consistency_score"] < 0.02


def test_triplets_n3_and_insufficient(tmp_path):
    d = tmp_path / "d.csv"
    write_decisions(generate(GeneratorSpec(0.3, (0.8, 0.7, 0.9), (0.75, 0.85, 0.65), 5000, seed=1)), d)
    out = tmp_path / "t.json"
    assert cli.main(["triplets", str(d), "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["triplets"]) == 1
    d2 = tmp_path / "d2.csv"
    d2.write_text("c1,c2\nalpha,beta\n")
    assert cli.main(["triplets", str(d2)]) == cli.EXIT_INSUFFICIENT


def test_triplets_binarize(tmp_path):
    systems, _ = generate_ids(IdGeneratorSpec(800, 1000, (0.02, 0.05, 0.1, 0.03), (0.01, 0.03, 0.15, 0.02), seed=0))
    systems[0][:3] = ["A", "B", "A"]
    ids = tmp_path / "ids.csv"
    write_ids(systems, ids)
    assert read_ids(ids) == systems
    out = tmp_path / "t.json"
    code = cli.main(["triplets", str(ids), "--binarize", "--out", str(out)])
    doc = json.loads(out.read_text())
    assert code == cli.alarm_exit_code([a for t in doc["triplets"] for a in t["alarms"]])
    assert doc["total"] == 1000 and len(doc["triplets"]) == 4
    assert doc["unique_count_estimate"] is None or doc["unique_count_estimate"] > 0


def test_binarize_command(tmp_path):
    ids = tmp_path / "ids.csv"
    ids.write_text("id1,id2\nA,x\nB,x\nA,y\n")
    out = tmp_path / "d.csv"
    assert cli.main(["binarize", str(ids), "--out", str(out)]) == 0
    assert out.read_text() == "c1,c2\nalpha,alpha\nalpha,beta\nbeta,alpha\n"


def test_evaluate_command(tmp_path):
    spec = GeneratorSpec(0.3, (0.8, 0.7, 0.9), (0.75, 0.85, 0.65), 10000, seed=0)
    sp = write_spec(tmp_path, spec)
    out = tmp_path / "e.json"
    assert cli.main(["evaluate", str(sp), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert max(doc["errors"].values()) <= 0.02
    assert cli.main(["evaluate", str(sp), "--exact", "--out", str(out)]) == 0
    assert max(json.loads(out.read_text())["errors"].values()) <= 1e-9
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"prevalence": 2, "acc_alpha": [1], "acc_beta": [1], "sample_size": 5}))
    assert cli.main(["evaluate", str(bad)]) == cli.EXIT_PARSE


def test_pipeline_equivalence(tmp_path):
    spec = GeneratorSpec(0.3, (0.8, 0.7, 0.9), (0.75, 0.85, 0.65), 20000, seed=12)
    sp = write_spec(tmp_path, spec)
    d, s, r, e = (tmp_path / n for n in ("d.csv", "s.json", "r.json", "e.json"))
    assert cli.main(["simulate", str(sp), "--out", str(d)]) == 0
    assert cli.main(["tally", str(d), "--out", str(s)]) == 0
    assert cli.main(["solve", str(s), "--out", str(r)]) == 0
    assert cli.main(["evaluate", str(sp), "--out", str(e)]) == 0
    solved, evaluated = json.loads(r.read_text()), json.loads(e.read_text())
    assert [solved["roots"]["a"], solved["roots"]["b"]] == evaluated["roots"]
    assert list(solved["frequencies"].values()) == evaluated["frequencies"]
    assert solved["roots"][solved["selected"]] == evaluated["estimated"]


def test_simulate_seed_override(tmp_path):
    sp = write_spec(tmp_path, GeneratorSpec(0.5, (0.8,) * 3, (0.8,) * 3, 200, seed=1))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["simulate", str(sp), "--out", str(a), "--seed", "5"])
    cli.main(["simulate", str(sp), "--out", str(b), "--seed", "5"])
    assert a.read_text() == b.read_text()
