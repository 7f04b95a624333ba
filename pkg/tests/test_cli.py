import csv
import json
import math

import pytest
from hypothesis import given

from tailsum.cli import main, parse_spec, serialize_spec, spec_from_dict
from tailsum.distmodel import rademacher
from tailsum.errors import EmptySequence, FlagMismatch, ParseError
from tailsum.rearrange import IndependentSequence

from strategies import sequences

RAD_SPEC = {"variables": [{"type": "atomic", "atoms": [[1, 0.5], [-1, 0.5]]}],
            "flags": {"symmetric": True}}
PAIR_SPEC = {"variables": [{"type": "atomic", "atoms": [[5, 0.3]]},
                           {"type": "atomic", "atoms": [[2, 0.5]]}]}


@pytest.fixture
def write(tmp_path):
    def _write(doc, name="spec.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)
    return _write


class TestSpec:
    def test_rademacher(self, write):
        seq = parse_spec(write(RAD_SPEC))
        assert len(seq) == 1 and seq[0] == rademacher()
        assert seq.levy_constants == (1.0, 2.0)

    def test_iid_block(self):
        seq = spec_from_dict({"variables": [
            {"type": "iid-block", "count": 100, "variable": RAD_SPEC["variables"][0]}]})
        assert len(seq) == 100 and seq.iid and seq.symmetric

    def test_family(self):
        seq = spec_from_dict({"variables": [
            {"type": "family", "family": "uniform", "params": [0, 1], "eps_mass": 0.25,
             "eps_value": 1}]})
        assert seq[0].values.size == 4

    def test_flag_mismatch(self):
        with pytest.raises(FlagMismatch):
            spec_from_dict({"variables": [{"type": "atomic", "atoms": [[1, 1.0]]}],
                            "flags": {"symmetric": True}})

    def test_errors(self, write, tmp_path):
        with pytest.raises(EmptySequence):
            spec_from_dict({"variables": []})
        for bad in ({"variables": [{"type": "weird"}]}, {"variables": [{"atoms": []}]},
                    {"variables": [{"type": "atomic", "atoms": [["a", 1]]}]},
                    {"variables": [{"type": "iid-block", "count": 0,
                                    "variable": RAD_SPEC["variables"][0]}]},
                    {"variables": RAD_SPEC["variables"], "flags": {"odd": True}}, []):
            with pytest.raises(ParseError):
                spec_from_dict(bad)
        (tmp_path / "broken.json").write_text("{")
        with pytest.raises(ParseError):
            parse_spec(str(tmp_path / "broken.json"))
        with pytest.raises(ParseError):
            parse_spec(str(tmp_path / "missing.json"))

    @given(sequences())
    def test_round_trip(self, seq):
        text = json.dumps(serialize_spec(seq))
        assert spec_from_dict(json.loads(text)) == seq

    def test_round_trip_keeps_explicit_flags(self):
        seq = IndependentSequence.build([rademacher()] * 3, flags={"iid": False},
                                        levy_constants=(3, 4))
        assert spec_from_dict(serialize_spec(seq)) == seq


class TestCommands:
    def test_estimate_tail(self, write, tmp_path, capsys):
        out, table = tmp_path / "r.json", tmp_path / "r.csv"
        code = main(["estimate-tail", "--spec", write(RAD_SPEC), "--t", "0.1,1.5",
                     "--out", str(out), "--csv", str(table)])
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["results"][0]["lambda"] == pytest.approx(math.log(10) / math.acosh(10), rel=1e-9)
        assert rep["results"][1]["lambda"] == 0.0
        assert rep["version"] and rep["spec"]["variables"]
        rows = list(csv.reader(table.open()))
        assert rows[0] == ["t", "value"] and len(rows) == 3

    def test_tail_grid(self, write, capsys):
        assert main(["estimate-tail", "--spec", write(RAD_SPEC), "--t-grid", "0.01:0.5:5",
                     "--mode", "mstar"]) == 0
        assert len(json.loads(capsys.readouterr().out)["results"]) == 5

    def test_verify(self, write, capsys):
        assert main(["verify", "--spec", write(PAIR_SPEC), "--suite", "ellmax,kn"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["passed"] and [r["suite"] for r in rep["results"]] == ["ELLMAX", "KN"]

    def test_verify_failure_exit_code(self, write, monkeypatch, capsys):
        import tailsum.mcengine.verify as verify
        monkeypatch.setattr(verify, "_suite_ellmax",
                            lambda seq, cfg: [verify.Check("forced", False, -1.0)])
        assert main(["verify", "--spec", write(PAIR_SPEC), "--suite", "ellmax"]) == 1

    def test_usage_errors(self, write, capsys):
        assert main(["verify", "--spec", write(PAIR_SPEC), "--suite", "bogus"]) == 2
        assert main(["estimate-tail", "--spec", write(PAIR_SPEC)]) == 2
        assert main(["estimate-tail", "--spec", "/nonexistent.json", "--t", "0.1"]) == 2
        bad = write({"variables": [{"type": "atomic", "atoms": [[1, 1.0]]}],
                     "flags": {"symmetric": True}}, "bad.json")
        assert main(["estimate-tail", "--spec", bad, "--t", "0.1"]) == 2
        assert main(["bound", "--spec", write(PAIR_SPEC), "--kind", "vk"]) == 2

    def test_moment(self, write, capsys):
        spec = write({"variables": [{"type": "iid-block", "count": 2,
                                     "variable": RAD_SPEC["variables"][0]}]})
        assert main(["estimate-moment", "--spec", spec, "--p", "1", "--source", "enum"]) == 0
        assert json.loads(capsys.readouterr().out)["results"][0]["estimate"] == 3.0
        assert main(["estimate-moment", "--spec", spec, "--p", "1,2", "--samples", "5000",
                     "--seed", "4"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["config"]["seed"] == 4 and rep["results"][1]["p"] == 2
        assert main(["estimate-moment", "--spec", spec, "--p", "12", "--samples", "5000"]) == 2

    def test_bounds(self, write, capsys):
        spec = write(PAIR_SPEC)
        assert main(["bound", "--spec", spec, "--kind", "vk", "--r", "0.5", "--k", "2",
                     "--t", "0.25"]) == 0
        assert json.loads(capsys.readouterr().out)["results"]["bound"] == 4.0
        assert main(["bound", "--spec", spec, "--kind", "large-lp", "--r", "0.5", "--p", "20"]) == 0
        assert json.loads(capsys.readouterr().out)["results"]["bound"] == "inf"
        assert main(["bound", "--spec", spec, "--kind", "kn", "--t", "1", "--K", "2"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["config"]["oracle"] == "enum"
        assert rep["results"]["observed"] <= rep["results"]["bound"]

    def test_enumerate(self, write, tmp_path):
        out = tmp_path / "e.json"
        assert main(["enumerate", "--spec", write(PAIR_SPEC), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["results"]["outcome_count"] == 4

    def test_reproducible_reports(self, write, tmp_path):
        spec = write({"variables": [{"type": "iid-block", "count": 5,
                                     "variable": RAD_SPEC["variables"][0]}]})
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["verify", "--spec", spec, "--suite", "tail", "--samples", "20000", "--seed", "9"]
        assert main(args + ["--out", str(a)]) == 0
        rep = json.loads(a.read_text())
        cfg = rep["config"]
        # re-run from the embedded spec and config
        spec2 = write(rep["spec"], "embedded.json")
        assert main(["verify", "--spec", spec2, "--suite", ",".join(cfg["suites"]),
                     "--samples", str(cfg["n"]), "--seed", str(cfg["seed"]),
                     "--delta", str(cfg["delta"]), "--chunk", str(cfg["chunk"]),
                     "--out", str(b)]) == 0
        assert a.read_text() == b.read_text()
