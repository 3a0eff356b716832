import json
import subprocess
import sys

import numpy as np
import pytest

from qconf import io
from qconf.cli import main
from qconf.families import example_ghz
from qconf.linalg import DimProfile, projector
from qconf.states import Instrument, MultipartiteState


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    ghz3 = tmp_path / "ghz3.json"
    io.save_state(example_ghz(3), ghz3)
    basis = tmp_path / "basis.json"
    io.save_instruments([Instrument.basis("*", 2)], basis)
    corr = tmp_path / "corr.json"
    io.save_state(example_ghz(2), corr)
    return tmp_path


class TestRoundTrip:
    def test_state(self, tmp_path):
        rng = np.random.default_rng(0)
        g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        rho = g @ g.conj().T
        st = MultipartiteState(rho / np.trace(rho).real, DimProfile([2, 3], ["A", "E"]), eve_index=1)
        io.save_state(st, tmp_path / "s.json")
        back = io.load_state(tmp_path / "s.json")
        assert np.array_equal(back.matrix, st.matrix)
        assert back.eve_label == "E" and back.profile == st.profile

    def test_instrument(self, tmp_path):
        ins = Instrument.from_povm("A", [np.diag([1.0, 0.3]), np.diag([0.0, 0.7])])
        io.save_instruments([ins], tmp_path / "i.json")
        (back,) = io.load_instruments(tmp_path / "i.json")
        assert back.outcomes == ins.outcomes
        for b1, b2 in zip(back.branches, ins.branches):
            assert all(np.array_equal(k1, k2) for k1, k2 in zip(b1.kraus, b2.kraus))

    def test_wildcard(self, files):
        ins = io.load_instruments(files / "basis.json", ["A1", "A2", "A3"])
        assert [i.party for i in ins] == ["A1", "A2", "A3"]

    def test_shape_mismatch(self, tmp_path):
        doc = {"dims": [2, 2], "matrix": [[1, 0], [0, 0]]}
        with pytest.raises(Exception, match="does not match"):
            io.state_from_json(doc)


class TestVerbs:
    def test_example_ghz(self, capsys, tmp_path):
        code, out, _ = run(capsys, "example", "ghz", "--m", 3, "--d", 2, "--out", tmp_path / "g.json")
        assert code == 0
        assert run(capsys, "validate", tmp_path / "g.json")[0] == 0
        code, out, _ = run(capsys, "entropy", "--state", tmp_path / "g.json", "--of", "A1")
        assert code == 0 and "= 1 bits" in out

    def test_example_against_co(self, capsys, tmp_path):
        code, out, _ = run(capsys, "--json", "example", "against-co", "--d", 2, "--k", 2, "--out", tmp_path / "a.json")
        doc = json.loads(out)
        assert code == 0 and abs(doc["trace"] - 1) < 1e-12 and doc["dims"][-1] == 8 and doc["eve"] == "E"

    def test_example_pbit_leaky(self, capsys, tmp_path):
        shield = {
            "d": 2,
            "shield_state": [[1, 0], [0, 0]],
            "shield_dims": [1],
            "eve_dim": 2,
            "unitaries": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]],
        }
        (tmp_path / "leak.json").write_text(json.dumps(shield))
        code, _, err = run(capsys, "example", "pbit", "--shield", tmp_path / "leak.json", "--out", tmp_path / "p.json")
        assert code == 2 and "differ by 2" in err

    def test_validate_all_examples(self, capsys, tmp_path):
        for name in ("ghz", "against-co", "against-co-pure", "pbit"):
            path = tmp_path / f"{name}.json"
            assert run(capsys, "example", name, "--out", path)[0] == 0
            assert run(capsys, "validate", path)[0] == 0

    def test_rates_key_c(self, capsys, files):
        code, out, _ = run(capsys, "rates", "--state", files / "ghz3.json", "--povm", files / "basis.json", "--theorem", "key-c")
        assert code == 0 and "rate (raw)     1" in out

    def test_rates_json_schema(self, capsys, files):
        code, out, _ = run(
            capsys, "--json", "rates", "--state", files / "ghz3.json", "--povm", files / "basis.json", "--theorem", "key-cq"
        )
        doc = json.loads(out)
        io.validate(doc, "rate_report")
        assert abs(doc["raw"] - 1) < 1e-9

    def test_rates_ghz_not_pure(self, capsys, files):
        mixed = Instrument("*", [("0", [np.diag([1, 0]), np.diag([0, 1]) / np.sqrt(2)]), ("1", [np.diag([0, 1]) / np.sqrt(2)])])
        io.save_instruments([mixed], files / "mixed.json")
        code, _, err = run(capsys, "rates", "--state", files / "ghz3.json", "--instrument", files / "mixed.json", "--theorem", "ghz-cq")
        assert code == 2 and "instrument branch not rank one" in err

    def test_ghz_combing(self, capsys, files):
        code, out, _ = run(capsys, "--json", "ghz", "--state", files / "ghz3.json", "--method", "combing")
        doc = json.loads(out)
        assert code == 0 and abs(doc["raw"] - 0.5) < 1e-9 and doc["root"] in ("A1", "A2", "A3")

    def test_ghz_tree_disconnected(self, capsys, tmp_path):
        v = np.zeros(8)
        v[0] = v[6] = 2**-0.5
        io.save_state(MultipartiteState(projector(v), DimProfile([2, 2, 2])), tmp_path / "e.json")
        code, out, _ = run(capsys, "ghz", "--state", tmp_path / "e.json", "--method", "tree")
        assert code == 0 and "disconnected" in out and "rate (tree)    0" in out

    def test_ghz_tree_weights(self, capsys, tmp_path):
        w = {"m": 3, "edges": [{"i": "A1", "j": "A2", "weight": 2}, {"i": 0, "j": 2, "weight": 2}, {"i": 1, "j": 2, "weight": 1}]}
        (tmp_path / "w.json").write_text(json.dumps(w))
        code, out, _ = run(capsys, "--json", "ghz", "--weights", tmp_path / "w.json", "--method", "tree")
        doc = json.loads(out)
        assert code == 0 and doc["raw"] == 1.0 and doc["tree"] == [["A1", "A2"], ["A1", "A3"]]

    def test_simulate_corr(self, capsys, files):
        spec = {"state": "corr.json", "instruments": "basis.json", "n": 2, "bin_counts": [1, 1], "key_size": 4,
                "binning": "identity", "key_hash": "identity"}
        (files / "spec.json").write_text(json.dumps(spec))
        code, out, _ = run(capsys, "--json", "simulate", "--spec", files / "spec.json", "--seed", 5)
        doc = json.loads(out)
        assert code == 0 and abs(doc["reliability"] - 1) < 1e-12 and doc["secrecy"] == 0 and doc["seed"] == 5

    def test_simulate_against_co(self, capsys, tmp_path):
        (tmp_path / "s.json").write_text(json.dumps({"protocol": "against-co-direct", "d": 2, "k": 2}))
        code, out, _ = run(capsys, "--json", "simulate", "--spec", tmp_path / "s.json", "--seed", 0)
        doc = json.loads(out)
        assert code == 0 and doc["achieved_key_bits"] == 1 and doc["secrecy"] <= 1e-9

    def test_simulate_requires_seed(self, capsys, tmp_path):
        (tmp_path / "s.json").write_text(json.dumps({"protocol": "against-co-direct", "d": 2}))
        with pytest.raises(SystemExit) as info:
            main(["simulate", "--spec", str(tmp_path / "s.json")])
        assert info.value.code == 2

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as info:
            main(["entropy", "--bogus"])
        assert info.value.code == 2


class TestErrors:
    def test_parse_error_line(self, capsys, tmp_path):
        (tmp_path / "bad.json").write_text('{"dims": [2],\n "matrix": [[1, 0], [0')
        code, _, err = run(capsys, "validate", tmp_path / "bad.json")
        assert code == 2 and "line 2" in err

    def test_field_error(self, capsys, tmp_path):
        (tmp_path / "bad.json").write_text(json.dumps({"dims": [2], "matrix": [[1, 0], ["x", 0]]}))
        code, _, err = run(capsys, "validate", tmp_path / "bad.json")
        assert code == 2 and "matrix/1/0" in err

    def test_invalid_state(self, capsys, tmp_path):
        (tmp_path / "bad.json").write_text(json.dumps({"dims": [2], "matrix": [[1, 0], [0, 1]]}))
        code, _, err = run(capsys, "validate", tmp_path / "bad.json")
        assert code == 2 and "trace" in err

    def test_budget(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("QCONF_MAX_DIM", "64")
        code, _, err = run(capsys, "example", "against-co", "--out", tmp_path / "a.json")
        assert code == 3 and "budget" in err

    def test_invariant_exit_code(self, capsys, monkeypatch, files):
        from qconf import cli
        from qconf.errors import InvariantError

        def broken(*a, **k):
            raise InvariantError("simplex exceeded the pivot limit")

        monkeypatch.setitem(cli.THEOREMS, "key-c", broken)
        code, _, err = run(capsys, "rates", "--state", files / "ghz3.json", "--povm", files / "basis.json", "--theorem", "key-c")
        assert code == 4 and "invariant" in err


def test_module_entry_point(tmp_path):
    out = tmp_path / "g.json"
    res = subprocess.run([sys.executable, "-m", "qconf", "example", "ghz", "--out", str(out)], capture_output=True, text=True)
    assert res.returncode == 0 and out.exists()


def test_schemas_are_valid():
    from jsonschema import Draft202012Validator

    for name in io.SCHEMAS:
        Draft202012Validator.check_schema(io.schema(name))
