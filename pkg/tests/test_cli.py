import json

import pytest

from supercontact.cli import RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_transvectant_verdict(capsys):
    code, out = run(capsys, "classify", "transvectant", "0", "0", "2")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == "1.0"
    assert doc["rows"][0]["verdict"] == "invariant"


def test_ext1_condition(capsys):
    code, out = run(capsys, "classify", "ext1", "4")
    assert code == 0 and "16*c**2 - 33" in out


def test_ext2_table_and_unknown(capsys):
    code, out = run(capsys, "classify", "ext2", "--", "11/2", "-5/2")
    assert code == 0 and json.loads(out)["rows"][0]["dimension"] == 2
    code, out = run(capsys, "classify", "ext2", "6", "1")
    assert code == 1 and json.loads(out)["rows"][0]["label"] == "unknown"


def test_extension_verdict(capsys):
    code, out = run(capsys, "classify", "extension", "1", "2", "3/2", "3/2")
    assert code == 0 and json.loads(out)["rows"][0]["exists"] is True


def test_out_of_table_request_fails(capsys):
    code, out = run(capsys, "classify", "extension", "1", "5", "5", "5", "5")
    assert code == 1 and "out of table" in out
    assert run(capsys, "classify", "transvectant", "0", "0", "7/2")[0] == 2


def test_b_table_residuals(capsys):
    code, out = run(capsys, "--format", "csv", "b-table", "--rs", "3/2", "2", "--m", "both")
    rows = out.strip().splitlines()
    assert code == 0 and rows[0].split(",")[-1] == "residual"
    assert all(r.endswith(",0") for r in rows[1:]) and len(rows) == 5


def test_resonant_b_table_is_a_usage_error(capsys):
    code, _ = run(capsys, "b-table", "--rs", "-1")
    assert code == 2


def test_symbol_roundtrip(capsys):
    code, out = run(capsys, "symbol", "cs", "[x]*Dbar^(2)_0 + [xi]*Dbar^(1)_1", "--lam", "1/3", "--p", "2/5")
    doc = json.loads(out)
    assert code == 0 and doc["roundtrip"] is True


def test_cohomology_values(capsys):
    code, out = run(capsys, "--weight-cutoff", "3", "cohomology", "beta", "--cup", "beta")
    assert code == 0 and "-32" in out


def test_verify_exit_codes(capsys, tmp_path):
    assert run(capsys, "verify", "casimir")[0] == 0
    code, _ = run(capsys, "verify", "step-elements", "--dump", str(tmp_path))
    assert code == 1
    assert (tmp_path / "step-elements.json").exists()
    assert run(capsys, "verify", "no-such-suite")[0] == 2


@pytest.mark.parametrize("fmt", ["json", "csv", "text"])
def test_output_is_deterministic(capsys, tmp_path, fmt):
    outs = []
    for name in ("a", "b"):
        path = tmp_path / f"{name}.{fmt}"
        assert main(["--format", fmt, "--seed", "7", "--output", str(path), "verify", "ext1"]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_config_file(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"schema_version": "1.0", "depth": 4, "seed": 3}))
    cfg = RunConfig.from_file(path)
    assert cfg.depth == 4 and cfg.seed == 3
    path.write_text(json.dumps({"schema_version": "1.0", "colour": "red"}))
    with pytest.raises(ValueError):
        RunConfig.from_file(path)
    assert run(capsys, "--config", str(path), "verify", "casimir")[0] == 2


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(depth=0)
    with pytest.raises(ValueError):
        RunConfig(output_format="xml")
