"""CLI plumbing: JSON determinism, the cache, exit codes."""
import json
import os

from tracecoef.cli import JsonlCache, main, render_json


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_coeff_command(capsys):
    code, out = run_cli(capsys, "coeff", "--group", "sp2", "--orbit", "min",
                        "--alpha", "1", "--S", "2", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["terms"]
    assert abs(doc["result"]["value"] - 2.043379170155876) < 1e-10
    names = [f["name"] for t in doc["result"]["terms"] for f in t["factors"]]
    assert "zeta^S(2)" in names


def test_shintani_command(capsys):
    code, out = run_cli(capsys, "shintani", "--alpha", "-1", "--S", "2",
                        "--X", "15000", "--json")
    assert code == 0
    doc = json.loads(out)
    r = doc["result"]
    assert r["residue_exact"] == "1/8"
    assert abs(r["residue_estimate"] - 0.125) / 0.125 < 0.05
    assert set(r["grid_values"]) == {"0.2", "0.15", "0.1", "0.05"}


def test_lfun_orbit_chars_weights_commands(capsys):
    code, out = run_cli(capsys, "lfun", "--chi", "-4", "--s", "2", "--S", "2", "--json")
    assert code == 0 and abs(json.loads(out)["result"]["value"] - 0.915965594177219) < 1e-12
    code, out = run_cli(capsys, "lfun", "--laurent", "--S", "2", "--json")
    assert json.loads(out)["result"]["residue"] == 0.5
    code, out = run_cli(capsys, "orbits", "--group", "gsp2", "--S", "2", "--json")
    assert json.loads(out)["result"]["count"] == 19
    code, out = run_cli(capsys, "chars", "--S", "2,3", "--cubic", "--json")
    doc = json.loads(out)
    assert doc["result"]["cubic_moduli"] == [9, 9]
    code, out = run_cli(capsys, "weights", "--which", "m0", "--nu", "3,1,1,1",
                        "--T", "0,0", "--S", "2", "--engine", "--json")
    doc = json.loads(out)
    assert doc["result"]["deviation"] < 1e-9


def test_diff_command(capsys):
    code, out = run_cli(capsys, "diff", "--orbit", "min", "--alpha", "1",
                        "--S", "2", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["deviation"] < 1e-10


def test_reruns_byte_identical(capsys):
    argv = ["coeff", "--group", "sl2", "--orbit", "min", "--alpha", "7",
            "--S", "2,3", "--json"]
    _, out1 = run_cli(capsys, *argv)
    _, out2 = run_cli(capsys, *argv)
    assert out1 == out2


def test_usage_and_instability_exit_codes(capsys):
    # unknown group: argparse usage error
    code = main(["coeff", "--group", "nope", "--S", "2"])
    capsys.readouterr()
    assert code == 2
    # pole request: rejected as a usage error with a JSON error object
    code, out = run_cli(capsys, "lfun", "--chi", "1", "--s", "1", "--S", "2", "--json")
    assert code == 2
    assert json.loads(out)["error"]["code"] == "usage"
    # sp2 without 2 in S
    code, out = run_cli(capsys, "shintani", "--alpha", "-1", "--S", "3", "--json")
    assert code == 2


def test_cache_roundtrip(tmp_path):
    path = str(tmp_path / "cache.jsonl")
    c = JsonlCache(path)
    c.put({"D": -4, "L1": 0.7853981633974483, "method": "class-number-formula", "digits": 15})
    c.put({"D": 8, "L1": 1.2, "method": "x", "digits": 15})
    c2 = JsonlCache(path)
    assert c2.get(-4)["L1"] == 0.7853981633974483
    assert c2.get(8)["L1"] == 1.2
    assert c2.get(5) is None


def test_cache_highest_digits_wins(tmp_path):
    path = str(tmp_path / "cache.jsonl")
    with open(path, "w") as fh:
        fh.write(json.dumps({"D": -4, "L1": 0.78, "digits": 10}) + "\n")
        fh.write(json.dumps({"D": -4, "L1": 0.785398, "digits": 20}) + "\n")
        fh.write(json.dumps({"D": -4, "L1": 0.79, "digits": 10}) + "\n")
        fh.write("not json at all\n")
        fh.write(json.dumps({"D": 8, "L1": 1.1, "digits": 10}) + "\n")
        fh.write(json.dumps({"D": 8, "L1": 1.2, "digits": 10}) + "\n")
    c = JsonlCache(path)
    assert c.get(-4)["L1"] == 0.785398  # highest digits wins
    assert c.get(8)["L1"] == 1.2        # ties: last wins
    # an in-memory put with fewer digits must not clobber
    c.put({"D": -4, "L1": 0.7, "digits": 5})
    assert c.get(-4)["L1"] == 0.785398


def test_cache_env_default(tmp_path, monkeypatch, capsys):
    path = str(tmp_path / "envcache.jsonl")
    monkeypatch.setenv("TRACECOEF_CACHE", path)
    code, _ = run_cli(capsys, "shintani", "--alpha", "-1", "--S", "2",
                      "--X", "2000", "--json")
    assert code == 0
    assert os.path.exists(path)
    with open(path) as fh:
        recs = [json.loads(line) for line in fh]
    assert any(r["D"] == -4 for r in recs)


def test_render_json_deterministic_types():
    from fractions import Fraction
    from mpmath import mpf, mpc

    doc = render_json({"a": Fraction(1, 8), "b": mpf("0.25"), "c": mpc(1, 2),
                       "s": {3, 1, 2}}, pretty=False)
    assert doc == '{"a":"1/8","b":0.25,"c":[1.0,2.0],"s":[1,2,3]}'


def test_selftest_subset(capsys):
    code, out = run_cli(capsys, "selftest", "--quick", "--criteria", "1,3,7,10", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["all_passed"]
    assert [c["id"] for c in doc["result"]["criteria"]] == [1, 3, 7, 10]


def test_coeff_sub_orbit_via_alpha(capsys):
    code, out = run_cli(capsys, "coeff", "--group", "sp2", "--orbit", "sub",
                        "--alpha", "-1", "--S", "2", "--X", "15000", "--json")
    assert code == 0
    doc = json.loads(out)
    names = [f["name"] for t in doc["result"]["terms"] for f in t["factors"]]
    assert any("C_F" in n for n in names)
    assert any("chi_-4" in n for n in names)
