import json

import pytest

from entmono.cli import main


def run(tmp_path, name, *argv):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out.read_bytes()


def test_region_tangle_csv(tmp_path):
    code, data = run(tmp_path, "r.csv", "region", "--samples", "100", "--seed", "0",
                     "--measure", "tangle")
    assert code == 0
    lines = data.decode().splitlines()
    assert lines[0] == "index,seed,measure,e_abc,e_ab,e_ac,residual"
    assert len(lines) == 101
    residuals = [float(line.split(",")[6]) for line in lines[1:]]
    assert min(residuals) >= -1e-9


def test_region_eof_has_negative_residuals(tmp_path):
    code, data = run(tmp_path, "r.csv", "region", "--samples", "100", "--seed", "0",
                     "--measure", "eof")
    assert code == 0
    residuals = [float(line.split(",")[6]) for line in data.decode().splitlines()[1:]]
    assert min(residuals) < 0


def test_region_json_format(tmp_path):
    code, data = run(tmp_path, "r.json", "region", "--samples", "5", "--seed", "3",
                     "--measure", "tangle", "--format", "json")
    assert code == 0
    payload = json.loads(data)
    assert payload["schema_version"] == 1
    assert len(payload["records"]) == 5
    assert payload["records"][0]["seed"] == 3


def test_curve_eof_vs_csq(tmp_path):
    code, data = run(tmp_path, "c.csv", "curve", "--curve", "eof_vs_csq")
    assert code == 0
    lines = data.decode().splitlines()
    assert lines[0] == "c_squared,e_f"
    assert len(lines) == 1001
    first = [float(x) for x in lines[1].split(",")]
    last = [float(x) for x in lines[-1].split(",")]
    assert first == [0.0, 0.0]
    assert last == [1.0, 1.0]
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_curve_alpha_level_sets(tmp_path):
    code, data = run(tmp_path, "a.csv", "curve", "--curve", "alpha_level_set",
                     "--alphas", "1,50", "--grid-points", "101")
    assert code == 0
    lines = data.decode().splitlines()[1:]
    assert len(lines) == 202
    rows = [[float(x) for x in line.split(",")] for line in lines]
    line1 = [r for r in rows if r[0] == 1.0]
    assert all(abs(r[1] + r[2] - 1.0) < 1e-12 for r in line1)
    # Large alpha pushes the level set toward the unit square's corner.
    big = {round(r[1], 6): r[2] for r in rows if r[0] == 50.0}
    assert big[0.9] > 0.99


def test_counterexample_report(tmp_path):
    code, data = run(tmp_path, "ce.json", "counterexample")
    assert code == 0
    payload = json.loads(data)
    assert abs(payload["e_abc"] - 1.0) < 1e-9
    assert abs(payload["e_ab"] - payload["e_ac"]) < 1e-9
    assert payload["violates_additive_bound"] is True


def test_alpha_fit_tangle(tmp_path):
    code, data = run(tmp_path, "af.json", "alpha-fit", "--measure", "tangle",
                     "--samples", "400", "--seed", "0", "--validate-samples", "400")
    payload = json.loads(data)
    assert payload["finite"] is True
    assert payload["alpha_min"] <= 1.0 + 1e-6
    assert payload["fit_violations"] == 0
    assert len(payload["per_record_alphas"]) == 400
    assert code == (0 if payload["validation"]["violations"] == 0 else 1)


def test_equality_audit_clean(tmp_path):
    code, data = run(tmp_path, "eq.json", "equality-audit", "--measure", "tangle",
                     "--samples", "400", "--seed", "11")
    assert code == 0
    payload = json.loads(data)
    assert payload["candidate_count"] == 0


def test_bounds_sampled_self_estimate(tmp_path):
    code, data = run(tmp_path, "b.json", "bounds", "--samples", "400", "--seed", "21")
    assert code == 0
    payload = json.loads(data)
    assert payload["c_empirical"] > 0
    assert payload["violations"] == 0
    assert payload["c"] == payload["c_empirical"]


def test_bounds_arithmetic_triple(tmp_path):
    code, data = run(tmp_path, "b.json", "bounds", "--triple", "0.5", "0.5", "0.5",
                     "--c", "1", "--exponent", "4")
    assert code == 1
    payload = json.loads(data)
    assert payload["passed"] is False
    assert abs(payload["slack"] + 1.0 / 64.0) < 1e-12


def test_ckw_pure(tmp_path):
    code, data = run(tmp_path, "k.json", "ckw", "--samples", "300", "--seed", "5")
    assert code == 0
    payload = json.loads(data)
    assert payload["violations"] == 0
    assert payload["min_residual"] >= -1e-9


def test_ckw_mixed(tmp_path):
    code, data = run(tmp_path, "km.json", "ckw", "--samples", "3", "--seed", "5",
                     "--mixed", "--rank", "2", "--roof-restarts", "8")
    assert code == 0
    payload = json.loads(data)
    assert payload["mode"] == "mixed"
    assert payload["min_residual"] >= -1e-6


def test_teleport_forced(tmp_path):
    code, data = run(tmp_path, "t.json", "teleport", "--seed", "7",
                     "--outcome", "1", "1")
    assert code == 0
    payload = json.loads(data)
    assert payload["correction"] == "XZ"
    assert payload["fidelity"] >= 1.0 - 1e-12


def test_env_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("ENTMONO_SEED", "99")
    code, data = run(tmp_path, "r.json", "region", "--samples", "2",
                     "--measure", "tangle", "--format", "json")
    assert code == 0
    assert json.loads(data)["seed"] == 99
    # An explicit flag wins over the environment.
    code, data = run(tmp_path, "r2.json", "region", "--samples", "2", "--seed", "1",
                     "--measure", "tangle", "--format", "json")
    assert json.loads(data)["seed"] == 1


def test_bad_output_path_exits_2(tmp_path):
    code = main(["counterexample", "--out", str(tmp_path / "missing" / "x.json")])
    assert code == 2


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["region", "--measure", "bogus"])
    assert exc.value.code == 2
