import json

from src.cli.main import run_cli
from src.report.verification import run_verification


def test_pinned_checks_pass(catalog):
    lines = []
    report = run_verification(catalog, echo=lines.append)
    failed = [f"{c.name}: {c.details}" for c in report.checks if not c.passed]
    assert report.passed, failed
    assert any("[REPRODUCED]" in line for line in lines)
    assert report.logs


def test_reproduce_command(tmp_path, capsys):
    assert run_cli(["--no-log", "reproduce-paper", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "[REPRODUCED]" in out

    for name in ("reproduction_report.md", "reproduction_fx_unitroot.csv",
                 "reproduction_fx_1971_forecast.csv", "reproduction_fx_1991_forecast.svg",
                 "reproduction_fx_d1_correlogram.svg", "reproduction_gdp_1991_grid.csv",
                 "reproduction_gdp_1991_forecast.csv", "reproduction_gdp_usd_1991.csv",
                 "reproduction_scenario_sub.json"):
        assert (tmp_path / name).exists(), name

    checks = json.loads((tmp_path / "reproduction_verification.json").read_text(encoding="utf-8"))
    assert all(c["passed"] for c in checks if c["critical"])

    scenario = json.loads((tmp_path / "reproduction_scenario_sub.json").read_text(encoding="utf-8"))
    (developed,) = scenario["annotations"]
    assert developed["label"] == "developed_gdp_usd_2047_from_1991"
    assert abs(developed["value"] / 1942186.2439 - 1) < 0.005

    report = (tmp_path / "reproduction_report.md").read_text(encoding="utf-8")
    assert "## Exchange rate: unit-root tests" in report
    assert "## Figures" in report
