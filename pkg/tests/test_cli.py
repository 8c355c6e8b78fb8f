import hashlib
import json

import pytest

from graphcodes.cli import main, rates
from graphcodes.errors import UsageError
from graphcodes.graphcore import PatternGraph


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_p1f_verify(tmp_path):
    assert run(tmp_path, "p1f", "--p", "11", "--verify") == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["artifacts"] == ["p1f_K12.json"]
    assert manifest["verification"] == {"pass": 1, "fail": 0}


def test_p1f_non_prime_is_usage_error(tmp_path):
    assert run(tmp_path, "p1f", "--p", "9") == 2


def test_treecode_then_verify(tmp_path):
    assert run(tmp_path, "treecode", "--n", "17", "--leaves", "3") == 0
    out = tmp_path / "v"
    assert main(["verify-treecode", "--gen", str(tmp_path / "treecode.json"), "--samples", "100",
                 "--seed", "7", "--out", str(out)]) == 0
    certs = json.loads((out / "certificates.json").read_text())
    assert len(certs) == 100


def test_hamming_leaf_bound_is_usage_error(tmp_path, capsys):
    assert run(tmp_path, "treecode", "--variant", "hamming", "--k", "5", "--leaves", "7") == 2
    assert "(n+9)/6" in capsys.readouterr().err


def test_grid_dim5_exit_3(tmp_path, capsys):
    assert run(tmp_path, "grid", "search", "--m", "3", "--n", "3", "--dim", "5") == 3
    assert "16" in capsys.readouterr().err


def test_grid_search_and_verify(tmp_path):
    assert run(tmp_path, "grid", "search", "--dim", "4") == 0
    assert run(tmp_path, "grid", "verify", "--file", str(tmp_path / "grid_family.json")) == 0


def test_grid_verify_rejects_bad_family(tmp_path):
    bad = {"format_version": 1, "m": 3, "n": 3, "members": ["n=9 edges=000000000", "n=9 edges=000000001"]}
    (tmp_path / "bad.json").write_text(json.dumps(bad))
    assert run(tmp_path, "grid", "verify", "--file", str(tmp_path / "bad.json")) == 1


def test_blocker_and_oracle(tmp_path, capsys):
    assert run(tmp_path, "blocker", "--predicate", "kdisjoint", "--n", "8", "--L", "K3", "--k", "2") == 0
    assert json.loads((tmp_path / "blocker.json").read_text())["edge_count"] == 19
    assert run(tmp_path, "oracle", "--n", "3", "--predicate", "connected", "--json") == 0
    result = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert result["M_exact"] == 4 and result["D_exact"] == 2


def test_codes(tmp_path):
    assert run(tmp_path, "codes", "--m", "18", "--d", "4") == 0
    assert json.loads((tmp_path / "code.json").read_text())["distance_claim"] == 4
    assert run(tmp_path, "codes", "--hamming", "3") == 0
    assert run(tmp_path, "codes") == 2


def test_env_default_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("GRAPHCODES_OUT", str(tmp_path / "env"))
    assert main(["rates", "--L", "K3"]) == 0
    assert (tmp_path / "env" / "rates.json").exists()


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 2


def test_rate_formulas():
    k3 = PatternGraph.complete(3)
    assert rates(k3, "contains").limit_value == 0.5
    assert rates(k3, "kcopies", 0.05).limit_value == pytest.approx(0.5 - 0.1 / 3)
    assert rates(k3, "kdisjoint", 0.5).limit_value == pytest.approx(0.125)
    assert rates(None, "ktt", 2).limit_value == 0.5
    with pytest.raises(UsageError):
        rates(PatternGraph.parse("K1"), "contains")
    with pytest.raises(UsageError):
        rates(k3, "kdisjoint", 1.5)


def _digest(path):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(path.iterdir()) if p.name != "manifest.json"}


def test_artifacts_are_deterministic(tmp_path):
    cmd = ["treecode", "--n", "37", "--leaves", "3", "--samples", "50", "--seed", "4"]
    assert main([*cmd, "--out", str(tmp_path / "a")]) == 0
    assert main([*cmd, "--out", str(tmp_path / "b")]) == 0
    assert _digest(tmp_path / "a") == _digest(tmp_path / "b")
