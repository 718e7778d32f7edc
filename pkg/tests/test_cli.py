import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vecmeasure import Euclidean, InputError, Lp, Polygonal, SumOfCircles
from vecmeasure.cli import main, parse_norm_arg
from vecmeasure.schema import (
    dumps,
    load_json,
    measure_to_json,
    parse_body,
    parse_measure,
    parse_norm,
    parse_scenario,
    parse_set,
    rows_to_csv,
)
from vecmeasure.suites import SUITES, run_suite

E1E2 = {"space_dim": 1, "dim": 2, "atoms": [{"x": [0], "v": [1, 0]}, {"x": [1], "v": [0, 1]}]}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestSchema:
    def test_norms(self):
        assert isinstance(parse_norm('{"kind": "euclidean"}'), Euclidean)
        lp = parse_norm({"kind": "lp", "p": "inf", "weights": [1, 2]})
        assert lp.p == math.inf and lp.weights.tolist() == [1, 2]
        assert isinstance(parse_norm({"kind": "polygonal", "generators": [[1, 0]]}), Polygonal)
        assert isinstance(parse_norm({"kind": "sum_of_circles"}), SumOfCircles)

    @pytest.mark.parametrize("bad", [
        {"kind": "euclidean", "p": 2},
        {"kind": "lp"},
        {"kind": "lp", "p": 0.5},
        {"kind": "polygonal", "generators": [[1, 0], [1]]},
        {"kind": "chebyshev"},
        [1, 2],
    ])
    def test_bad_norms(self, bad):
        with pytest.raises(InputError):
            parse_norm(bad)

    def test_measure_round_trip(self):
        mu = parse_measure(E1E2)
        assert parse_measure(measure_to_json(mu)) == mu

    @pytest.mark.parametrize("bad, field", [
        ({"space_dim": 1, "dim": 2, "atoms": [{"x": [0], "v": [1]}]}, "atoms[0].v"),
        ({"space_dim": 1, "dim": 2, "atoms": [{"x": [0], "v": [1, "a"]}]}, "atoms[0].v[1]"),
        ({"space_dim": 1, "dim": 2, "atoms": [{"x": [0], "w": [1, 0]}]}, "atoms[0]"),
        ({"space_dim": 0, "dim": 2, "atoms": []}, "space_dim"),
    ])
    def test_field_context(self, bad, field):
        with pytest.raises(InputError, match=field.replace("[", r"\[").replace("]", r"\]")):
            parse_measure(bad)

    def test_line_context(self):
        with pytest.raises(InputError, match="line 3"):
            load_json('{\n"a": 1,\n"b": }')

    def test_sets(self):
        assert parse_set({"all": True}).kind == "all"
        assert parse_set({"boxes": [{"lo": [0], "hi": [1]}]}, 1).kind == "boxes"
        assert parse_set({"sites": [[0.5]]}).kind == "sites"
        with pytest.raises(InputError):
            parse_set({"all": True, "sites": []})

    def test_body_from_vertices_or_measure(self):
        assert len(parse_body({"vertices": [[0, 0], [1, 0], [0, 1], [0.2, 0.2]]})) == 3
        assert parse_body(E1E2).support([1, 1]) == 2.0

    def test_scenarios(self):
        s = parse_scenario({"builtin": "dirac_split", "N": 5, "norm": {"kind": "lp", "p": 1}})
        assert len(s.sequence) == 5 and isinstance(s.norm, Lp)
        explicit = parse_scenario({"sequence": [E1E2], "limit": E1E2})
        assert explicit.name == "custom"
        with pytest.raises(InputError, match="builtin"):
            parse_scenario({"builtin": "nope"})

    @given(st.floats(allow_nan=False))
    def test_float_round_trip(self, x):
        text = dumps([x])
        back = json.loads(text, parse_constant=float)
        value = back[0] if not isinstance(back[0], str) else float(back[0])
        assert value == x

    def test_dumps_is_deterministic_json(self):
        obj = {"a": [0.1, 2.0, math.inf], "b": {"c": None, "d": True}, "e": np.float64(1 / 3)}
        assert dumps(obj) == dumps(obj)
        assert json.loads(dumps(obj))["a"] == [0.1, 2, "inf"]
        assert "0.33333333333333331" in dumps(obj)

    def test_csv(self):
        assert rows_to_csv([{"n": 1, "x": 0.5}, {"n": 2, "x": 0.1}]) == "n,x\n1,0.5\n2,0.10000000000000001\n"


class TestNormArg:
    def test_shorthands(self):
        assert isinstance(parse_norm_arg(None), Euclidean)
        assert parse_norm_arg("l1").p == 1.0
        assert parse_norm_arg("linf").p == math.inf
        assert parse_norm_arg("lp:3.5").p == 3.5
        assert isinstance(parse_norm_arg("sum_of_circles"), SumOfCircles)

    def test_json_file(self, tmp_path):
        path = write(tmp_path, "n.json", {"kind": "polygonal", "generators": [[1, 0], [0, 1]]})
        assert isinstance(parse_norm_arg(path), Polygonal)


class TestCommands:
    def test_tv(self, capsys, tmp_path):
        f = write(tmp_path, "m.json", E1E2)
        assert run(capsys, "tv", f, "--norm", "l1")[1] == "2.0\n"
        empty = write(tmp_path, "z.json", {"space_dim": 1, "dim": 2, "atoms": []})
        assert run(capsys, "tv", empty)[1] == "0.0\n"

    def test_tv_oracle(self, capsys, tmp_path, rng):
        atoms = [{"x": [float(i)], "v": rng.standard_normal(2).tolist()} for i in range(8)]
        f = write(tmp_path, "m.json", {"space_dim": 1, "dim": 2, "atoms": atoms})
        code, out, _ = run(capsys, "tv", f, "--oracle", "--norm", "l4")
        tv, oracle, gap = out.split("\n")[:3]
        assert code == 0 and float(gap.split()[1]) <= 1e-12 * float(tv)

    def test_tv_with_set(self, capsys, tmp_path):
        f = write(tmp_path, "m.json", E1E2)
        assert run(capsys, "tv", f, "--set", '{"sites": [[1]]}')[1] == "1.0\n"

    def test_range(self, capsys, tmp_path, rng):
        code, out, _ = run(capsys, "range", write(tmp_path, "m.json", E1E2))
        js = json.loads(out)
        assert sorted(map(tuple, js["vertices"])) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        one = {"space_dim": 1, "dim": 2, "atoms": [{"x": [0], "v": [1, 2]}]}
        assert json.loads(run(capsys, "range", json.dumps(one))[1])["vertices"] == [[0, 0], [1, 2]]
        ang = np.linspace(0.1, 3.0, 6)
        six = {"space_dim": 1, "dim": 2,
               "atoms": [{"x": [float(i)], "v": [math.cos(a), math.sin(a)]} for i, a in enumerate(ang)]}
        assert len(json.loads(run(capsys, "range", json.dumps(six))[1])["vertices"]) == 12
        three = {"space_dim": 1, "dim": 3, "atoms": [{"x": [0], "v": [1, 2, 3]}]}
        assert "vertices" not in json.loads(run(capsys, "range", json.dumps(three))[1])

    def test_perimeter_and_hausdorff(self, capsys, tmp_path):
        f = write(tmp_path, "m.json", E1E2)
        assert float(run(capsys, "perimeter", f, "--norm", "l1")[1]) == 4.0
        diag = write(tmp_path, "d.json", {"vertices": [[0, 0], [1, 1]]})
        assert float(run(capsys, "hausdorff", diag, f)[1]) == pytest.approx(math.sqrt(0.5), abs=1e-15)

    def test_zonal(self, capsys):
        js = json.loads(run(capsys, "zonal", "--norm", "l1")[1])
        assert js["method"] == "exact" and js["max_rel_error"] == 0
        js = json.loads(run(capsys, "zonal", "--nodes", "1000")[1])
        assert js["kappa"] == 0.25 and len(js["atoms"]) == 500
        js = json.loads(run(capsys, "zonal", "--norm", "l4", "--eps", "0.01")[1])
        assert js["max_rel_error"] <= 0.01

    def test_scenario_csv(self, capsys, tmp_path):
        out = tmp_path / "r.csv"
        code, _, err = run(capsys, "scenario", "--builtin", "dirac_split", "--N", 50, "--norm", "l1",
                           "--format", "csv", "--out", out)
        lines = out.read_text().splitlines()
        col = lines[0].split(",").index("range_dH")
        assert code == 0 and len(lines) == 51
        assert {float(l.split(",")[col]) for l in lines[1:]} == {math.sqrt(0.5)}
        assert "range=not-converging" in err

    def test_scenario_file(self, capsys, tmp_path):
        f = write(tmp_path, "s.json", {"builtin": "aligned_merge", "N": 10})
        js = json.loads(run(capsys, "scenario", f)[1])
        assert js["verdicts"]["range"] == "converging"

    @pytest.mark.parametrize("argv", [
        ["tv", '{"space_dim": 1, "dim": 2, "atoms": [], "extra": 1}'],
        ["tv", "/nonexistent/measure.json"],
        ["tv", json.dumps(E1E2), "--norm", '{"kind": "polygonal", "generators": [[1, 0, 0]]}'],
        ["range", json.dumps({"space_dim": 1, "dim": 4, "atoms": [{"x": [0], "v": [1, 2, 3, 4]}]})],
        ["scenario"],
        ["zonal", "--norm", "sum_of_circles"],
        ["verify", "tv-oracle", "--norm", '{"kind": "lp", "p": -1}'],
    ])
    def test_input_errors_exit_2(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2 and err.startswith("error:")

    def test_argparse_errors_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "tv-oracle", "--tol", "0"])
        assert exc.value.code == 2


class TestVerify:
    @pytest.mark.parametrize("suite", list(SUITES))
    def test_suites_pass(self, suite):
        rep = run_suite(suite, seed=7, trials=min(SUITES[suite].default_trials, 40))
        assert rep["passed"], rep["counterexamples"][:1]

    def test_exit_code_and_report(self, capsys, tmp_path):
        out = tmp_path / "rep.json"
        code, _, err = run(capsys, "verify", "perimeter-identity", "--trials", 500, "--seed", 42, "--out", out)
        rep = json.loads(out.read_text())
        assert code == 0 and rep["passed"] and rep["trials"] == 500 and err.startswith("PASS")

    def test_zonal_identity_l1_is_exact(self):
        rep = run_suite("zonal-identity", seed=3, trials=100, norm=Lp(1))
        assert rep["max_error"] <= 1e-15

    def test_failure_dumps_reusable_instance(self, capsys, tmp_path):
        """Euclidean quadrature cannot meet an absurd tolerance on the mass identity."""
        rep = run_suite("perimeter-identity", seed=1, trials=5, tol=1e-30, norm=Euclidean())
        assert not rep["passed"]
        inst = rep["counterexamples"][0]["instance"]
        mu_file = write(tmp_path, "m.json", inst["measure"])
        code, out, _ = run(capsys, "tv", mu_file, "--norm", json.dumps(inst["norm"]))
        assert code == 0 and float(out) == inst["total_variation"]
        code, _, err = run(capsys, "verify", "perimeter-identity", "--trials", 5, "--seed", 1, "--tol", "1e-30")
        assert code == 1 and err.startswith("FAIL")

    def test_thread_count_does_not_change_report(self, monkeypatch):
        monkeypatch.setenv("VECMEASURE_THREADS", "1")
        a = dumps(run_suite("monotonicity", seed=11, trials=30))
        monkeypatch.setenv("VECMEASURE_THREADS", "4")
        b = dumps(run_suite("monotonicity", seed=11, trials=30))
        assert a == b

    def test_bad_thread_env(self, monkeypatch):
        monkeypatch.setenv("VECMEASURE_THREADS", "many")
        with pytest.raises(InputError):
            run_suite("tv-oracle", trials=2)

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "vecmeasure", "tv", json.dumps(E1E2), "--norm", "l1"],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout == "2.0\n"
