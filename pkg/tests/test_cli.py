import json

import pytest

from stratkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


SL2 = {"dim": 1, "weights": [["1"], ["-1"]], "group": "sl"}
TAU = {"e": 1, "polys": [["2", "1"], ["1", "1"]]}
PROFILE = {
    "e": 1,
    "layers": [
        [{"id": "a", "poly": ["2", "1"]}],
        [{"id": "b", "poly": ["1", "1"]}],
    ],
}


def test_index_set(tmp_path, capsys):
    path = write(tmp_path, "ws.json", SL2)
    code, out, _ = run(capsys, "index-set", "--input", path)
    assert code == 0
    report = json.loads(out)
    assert report["indices"] == [["0"], ["1"]]


def test_stratum_and_membership(tmp_path, capsys):
    path = write(tmp_path, "q.json", {"system": SL2, "support": [0]})
    code, out, _ = run(capsys, "stratum", "--input", path)
    assert code == 0 and json.loads(out)["beta"] == ["1"]

    path = write(
        tmp_path, "z.json", {"system": SL2, "beta": ["1"], "support": [0]}
    )
    code, out, _ = run(capsys, "z-member", "--input", path)
    assert code == 0 and json.loads(out)["result"] is True
    code, out, _ = run(capsys, "y-member", "--input", path)
    assert code == 0 and json.loads(out)["result"] is True


def test_retract(tmp_path, capsys):
    ws = {"dim": 1, "weights": [["2"], ["1"], ["-1"]], "group": "torus"}
    path = write(
        tmp_path, "r.json", {"system": ws, "beta": ["1"], "support": [0, 1]}
    )
    code, out, _ = run(capsys, "retract", "--input", path)
    assert code == 0 and json.loads(out)["support"] == [1]


def test_epsilon(tmp_path, capsys):
    path = write(tmp_path, "ws.json", SL2)
    code, out, _ = run(capsys, "epsilon", "--input", path)
    report = json.loads(out)
    assert code == 0
    assert report["epsilon0"] == "2"
    assert report["epsilon1"] == "1"
    assert report["epsilon"] == "1/3"


def test_refine_check(tmp_path, capsys):
    path = write(
        tmp_path,
        "rc.json",
        {
            "system": SL2,
            "perturbed": {
                "dim": 1,
                "weights": [["1"], ["-101/100"]],
                "group": "sl",
            },
        },
    )
    code, out, _ = run(capsys, "refine-check", "--input", path)
    assert code == 0 and json.loads(out)["refines"] is True


def test_hm(tmp_path, capsys):
    payload = {
        "total": ["3", "2"],
        "n": 1,
        "filtration": [
            {"dim": 3, "poly": ["2", "1"]},
            {"dim": 5, "poly": ["3", "2"]},
        ],
        "weights": [2, -3],
    }
    path = write(tmp_path, "hm.json", payload)
    code, out, _ = run(capsys, "hm", "--input", path, "--m", "2")
    assert code == 0 and json.loads(out)["value"] == "-1"


def test_beta_tau(tmp_path, capsys):
    path = write(tmp_path, "tau.json", TAU)
    code, out, _ = run(capsys, "beta-tau", "--input", path, "--n", "1", "--m", "2")
    report = json.loads(out)
    assert code == 0
    assert report["beta"] == ["1/15", "-1/10"]
    assert report["norm_sq"] == "1/30"


def test_verify_min_and_identities(tmp_path, capsys):
    path = write(tmp_path, "tau.json", TAU)
    code, out, _ = run(
        capsys, "verify-min", "--input", path,
        "--n", "1", "--m", "2", "--seed", "7",
    )
    assert code == 0 and json.loads(out)["result"] is True
    code, out, _ = run(
        capsys, "char-identity", "--input", path, "--n", "1", "--m", "2"
    )
    assert code == 0 and json.loads(out)["result"] is True
    code, out, _ = run(
        capsys, "graded-weight", "--input", path, "--n", "1", "--m", "2"
    )
    assert code == 0 and json.loads(out)["value"] == "1/30"


def test_hn_sum(tmp_path, capsys):
    path = write(
        tmp_path,
        "sum.json",
        {
            "a": {"e": 1, "layers": [[{"id": "a", "poly": ["2", "1"]}]]},
            "b": {"e": 1, "layers": [[{"id": "b", "poly": ["1", "1"]}]]},
        },
    )
    code, out, _ = run(capsys, "hn-sum", "--input", path)
    report = json.loads(out)
    assert code == 0
    assert len(report["profile"]["layers"]) == 2
    assert report["cases"] == {"i": 1}


def test_theta_check(tmp_path, capsys):
    path = write(tmp_path, "tc.json", {"profile": PROFILE, "theta": ["1", "0"]})
    code, out, _ = run(capsys, "theta-check", "--input", path, "--n", "1")
    report = json.loads(out)
    assert code == 0  # an unstable verdict is data, not a failure
    assert report["verdict"] == "unstable"
    assert report["beta_prime"] == ["2/5", "-3/5"]


def test_cross(tmp_path, capsys):
    path = write(tmp_path, "cross.json", {"tau": TAU, "theta": ["1", "0"]})
    code, out, _ = run(capsys, "cross", "--input", path, "--n", "1", "--m", "2")
    assert code == 0 and json.loads(out)["result"] is True
    path = write(tmp_path, "cross2.json", {"tau": TAU, "theta": ["0", "1"]})
    code, out, _ = run(capsys, "cross", "--input", path, "--n", "1", "--m", "2")
    assert code == 0 and json.loads(out)["result"] is False


def test_perturbed_hm_and_gamma(tmp_path, capsys):
    path = write(
        tmp_path,
        "ph.json",
        {
            "profile": PROFILE,
            "theta": ["1", "0"],
            "blocks": [[[0, 0]], [[1, 0]]],
            "weights": [2, -3],
        },
    )
    code, out, _ = run(
        capsys, "perturbed-hm", "--input", path, "--n", "1", "--epsilon", "1"
    )
    assert code == 0 and json.loads(out)["value"] == "6"

    path = write(
        tmp_path,
        "g.json",
        {
            "profile": PROFILE,
            "theta": ["1", "0"],
            "blocks": [[[1, 0]], [[0, 0]]],
        },
    )
    code, out, _ = run(
        capsys, "gamma", "--input", path, "--n", "1", "--epsilon", "1"
    )
    assert code == 0 and json.loads(out)["gamma"] == ["3/5", "-2/5"]


def test_gamma_domain_error(tmp_path, capsys):
    path = write(
        tmp_path,
        "g.json",
        {
            "profile": PROFILE,
            "theta": ["1", "0"],
            "blocks": [[[0, 0]], [[1, 0]]],  # wrong order: not adapted
        },
    )
    code, _, err = run(
        capsys, "gamma", "--input", path, "--n", "1", "--epsilon", "1"
    )
    assert code == 3
    assert "NotAdaptedError" in err


def test_s_equiv(tmp_path, capsys):
    path = write(tmp_path, "se.json", {"a": PROFILE, "b": PROFILE})
    code, out, _ = run(capsys, "s-equiv", "--input", path)
    assert code == 0 and json.loads(out)["result"] is True


def test_malformed_json_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    code, _, _ = run(capsys, "index-set", "--input", str(path))
    assert code == 2


def test_missing_flag_exits_2(tmp_path, capsys):
    path = write(tmp_path, "tau.json", TAU)
    code, _, _ = run(capsys, "beta-tau", "--input", path, "--n", "1")
    assert code == 2


def test_unknown_verb_exits_2(capsys):
    assert main(["frobnicate", "--input", "x.json"]) == 2


def test_deterministic_output(tmp_path, capsys):
    path = write(tmp_path, "tau.json", TAU)
    _, first, _ = run(
        capsys, "verify-min", "--input", path,
        "--n", "1", "--m", "2", "--seed", "5",
    )
    _, second, _ = run(
        capsys, "verify-min", "--input", path,
        "--n", "1", "--m", "2", "--seed", "5",
    )
    assert first == second


def test_output_file(tmp_path, capsys):
    path = write(tmp_path, "tau.json", TAU)
    dest = tmp_path / "out.json"
    code, out, _ = run(
        capsys, "beta-tau", "--input", path,
        "--n", "1", "--m", "2", "--output", str(dest),
    )
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["norm_sq"] == "1/30"
