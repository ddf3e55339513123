import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from branchlab.chain import equal_validity_demonstration
from branchlab.cli import main
from branchlab.core import validate_distribution
from branchlab.errors import NotNormalized, ParseError, SchemaError
from branchlab.runner import run_scenario
from branchlab.scenario import parse_scenario
from branchlab.typicality import concentration_curve

SCENARIOS = sorted((Path(__file__).parent.parent / "scenarios").glob("*.scn"))

MINIMAL = """
# minimal typicality scenario
command = typicality
q = 1/2, 1/2
N = 4
epsilon = 1/10
"""


def command_of(path):
    return parse_scenario(path.read_text()).command


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "branchlab", *args], capture_output=True, text=True)


# --- scenario parsing ----------------------------------------------------


def test_minimal_scenario_defaults():
    cfg = parse_scenario(MINIMAL)
    assert cfg.name == "typicality"
    assert cfg.q == (Fraction(1, 2), Fraction(1, 2))
    assert cfg.N == (4,)
    assert cfg.delta is None


def test_bracketed_quoted_lists():
    cfg = parse_scenario('command = chain-demo\nq = ["1/3", "2/3"]\n')
    assert cfg.q == (Fraction(1, 3), Fraction(2, 3))


def test_not_normalized():
    with pytest.raises(NotNormalized):
        parse_scenario('command = chain-demo\nq = ["1/2","1/2","1/2"]\n')


def test_unknown_key():
    with pytest.raises(SchemaError):
        parse_scenario(MINIMAL + "fudge=1\n")


def test_missing_and_extra_fields():
    with pytest.raises(SchemaError):
        parse_scenario("command = typicality\nq = 1/2, 1/2\nN = 4\n")
    with pytest.raises(SchemaError):
        parse_scenario(MINIMAL + "seed = 3\n")


def test_parse_error_positions():
    with pytest.raises(ParseError) as info:
        parse_scenario("command = chain-demo\nq 1/2\n")
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse_scenario("command = chain-demo\nq = 1/2,1/2\nq = 1\n")
    with pytest.raises(ParseError):
        parse_scenario("command = typicality\nq = 1/2,1/2\nN = 0\nepsilon = 1/10\n")
    with pytest.raises(ParseError):
        parse_scenario("command = chain-demo\nq = 0.5, 0.5\n")


@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_documented_scenarios_parse(path):
    parse_scenario(path.read_text())


# --- runner --------------------------------------------------------------


def test_typicality_rows_match_curve(tmp_path):
    cfg = parse_scenario("command = typicality\nq = 1/2, 1/2\nN = 4, 16, 64\nepsilon = 1/10\n")
    bundle = run_scenario(cfg, tmp_path)
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert len(lines) == 4
    curve = concentration_curve(validate_distribution(["1/2", "1/2"]), Fraction(1, 10), [4, 16, 64])
    for line, (N, outside) in zip(lines[1:], curve):
        cells = line.split(",")
        assert int(cells[0]) == N
        assert Fraction(cells[3]) == outside
    assert (tmp_path / "plot.svg").read_text().startswith("<svg")
    assert bundle.payload["command"] == "typicality"


def test_json_round_trip(tmp_path):
    cfg = parse_scenario("command = typicality\nq = 1/2, 1/2\nN = 4, 16\nepsilon = 1/10\n")
    run_scenario(cfg, tmp_path)
    data = json.loads((tmp_path / "results.json").read_text())
    got = [(r["N"], Fraction(r["weight_outside"])) for r in data["rows"]]
    assert got == concentration_curve(cfg.dist, cfg.epsilon, cfg.N)


def test_no_floats_outside_float_columns(tmp_path):
    for path in SCENARIOS:
        out = tmp_path / path.stem
        run_scenario(parse_scenario(path.read_text()), out)
        header, *rows = (out / "results.csv").read_text().splitlines()
        cols = header.split(",")
        for row in rows:
            for col, cell in zip(cols, row.split(",")):
                if not col.endswith("_float") and "." in cell:
                    # only free-text observer tags may contain dots
                    assert col in ("observer",), (path.name, col, cell)

        def walk(node, key=""):
            if isinstance(node, float):
                assert key.endswith("_float"), (path.name, key)
            elif isinstance(node, dict):
                for k, v in node.items():
                    walk(v, k)
            elif isinstance(node, list):
                for v in node:
                    walk(v, key)

        walk(json.loads((out / "results.json").read_text()))


def test_chain_demo_transcript_has_two_aware_versions(tmp_path):
    bundle = run_scenario(parse_scenario("command = chain-demo\nq = 1/2, 1/2\n"), tmp_path)
    assert bundle.transcript.count(": aware") == 2
    report = equal_validity_demonstration(validate_distribution(["1/2", "1/2"]))
    assert bundle.payload["equal_validity"]["versions"] == list(report.versions)


def test_achievable_set_marks_reachable_target(tmp_path):
    cfg = parse_scenario("command = achievable-set\nn = 2\nN = 2\nk_cap = 2\nq = 1/3, 2/3\n")
    bundle = run_scenario(cfg, tmp_path)
    assert bundle.payload["sets"][0]["size"] == 7
    assert bundle.payload["sets"][0]["target_reachable"] is True


# --- command line --------------------------------------------------------


@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_cli_is_byte_deterministic(path, tmp_path):
    cmd = command_of(path)
    assert main([cmd, "--scenario", str(path), "--out-dir", str(tmp_path / "a"), "--quiet"]) == 0
    assert main([cmd, "--scenario", str(path), "--out-dir", str(tmp_path / "b"), "--quiet", "--jobs", "3"]) == 0
    for name in ("results.csv", "results.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_cli_overrides(tmp_path):
    assert main(["typicality", "--q", "1/3,2/3", "--n-runs", "3", "--epsilon", "1/100", "--out-dir", str(tmp_path), "--quiet"]) == 0
    data = json.loads((tmp_path / "results.json").read_text())
    assert data["rows"][0]["weight_outside"] == "5/9"


def test_cli_scenario_plus_override(tmp_path):
    path = next(p for p in SCENARIOS if p.stem == "fair_coin_typicality")
    assert main(["typicality", "--scenario", str(path), "--n-runs", "4", "--n-max", "10", "--out-dir", str(tmp_path), "--quiet"]) == 0
    data = json.loads((tmp_path / "results.json").read_text())
    assert [r["N"] for r in data["rows"]] == [4]
    assert data["min_sample_size"] == {"N_max": 10, "reached": False}


def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["validity-joint", "--q", "1/2,1/2", "--q-b", "1/2,1/2", "--n-runs", "3", "--out-dir", out]) == 4
    assert "SameDistribution" in capsys.readouterr().err
    assert main(["chain-demo", "--q", "1/2,1/3", "--out-dir", out]) == 2
    assert main(["chain-demo", "--q", "1/2,1/2", "--seed", "3", "--out-dir", out]) == 2
    assert main(["branch-stats", "--q", "1/3,1/3,1/3", "--n-runs", "40", "--out-dir", out]) == 0
    bad = tmp_path / "bad.scn"
    bad.write_text("command = typicality\nfudge = 1\n")
    assert main(["typicality", "--scenario", str(bad), "--out-dir", out]) == 2


def test_cap_exit_code(tmp_path, monkeypatch):
    monkeypatch.setenv("BRANCHLAB_CLASS_CAP", "10")
    assert main(["branch-stats", "--q", "1/3,1/3,1/3", "--n-runs", "8", "--out-dir", str(tmp_path)]) == 3


def test_scenario_command_mismatch(tmp_path):
    path = next(p for p in SCENARIOS if p.stem == "chain_half")
    assert main(["typicality", "--scenario", str(path), "--out-dir", str(tmp_path)]) == 2


def test_module_entry_point_and_help(tmp_path):
    cp = run_cli("--help")
    assert cp.returncode == 0
    assert "validity-joint" in cp.stdout
    cp = run_cli("chain-demo", "--q", "1/2,1/2", "--out-dir", str(tmp_path))
    assert cp.returncode == 0, cp.stderr
    assert cp.stdout.count(": aware") == 2
    assert (tmp_path / "transcript.txt").exists()


def test_approximate_path_for_huge_N(tmp_path, monkeypatch):
    monkeypatch.setenv("BRANCHLAB_EXACT_N_CAP", "100")
    assert main(["typicality", "--q", "1/2,1/2", "--n-runs", "64,400", "--epsilon", "1/10", "--out-dir", str(tmp_path), "--quiet"]) == 0
    data = json.loads((tmp_path / "results.json").read_text())
    assert data["rows"][0]["approximate"] is False
    assert data["rows"][1]["approximate"] is True
    assert data["rows"][1]["weight_outside"] is None
    assert 0 < data["rows"][1]["weight_outside_float"] < 1e-4
