import pytest
from fire import Fire

from nearfield_boundary import cli
from nearfield_boundary.output import ValidationReport, ValidationRow


def test_solve_closed_form(capsys):
    assert cli.main(["solve", "--scenario", "ula", "--wavelength", "0.001", "--method", "approx"]) == 0
    assert "45.0" in capsys.readouterr().out


def test_solve_all_methods_skips_missing_exact(capsys):
    argv = ["solve", "--wavelength", "0.001", "--theta", "0.3", "--phi", "0.4", "--method", "all"]
    assert cli.main(argv) == 0
    out = capsys.readouterr().out
    assert "approx" in out
    assert "sim_vs_approx" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--bogus", "1"],
        ["solve", "--scenario", "xyz"],
        ["solve", "--theta=2.0"],
        ["solve", "--freq", "300e9", "--wavelength", "0.001"],
        ["solve", "--theta", "0.3", "--phi", "0.4", "--method", "exact"],
        ["sweep", "--kind", "nothing"],
    ],
)
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == 2
    assert "error:" in capsys.readouterr().err


def test_dump_config_round_trip(tmp_path, capsys):
    flags = ["--scenario", "upa", "--theta", "30", "--degrees=True", "--method", "approx"]
    assert cli.main(["solve", *flags]) == 0
    direct = capsys.readouterr().out
    assert cli.main(["solve", *flags, "--dump-config"]) == 0
    path = tmp_path / "dumped.cfg"
    path.write_text(capsys.readouterr().out)
    assert "degrees=False" in path.read_text()
    assert cli.main(["solve", "--config", str(path)]) == 0
    assert capsys.readouterr().out == direct


def test_spread(capsys):
    assert cli.main(["spread", "--scenario", "ula", "--wavelength", "0.001", "--d", "45"]) == 0
    out = capsys.readouterr().out
    assert "phase_spread_rad" in out
    assert "argmax_ap" in out


def test_sweep_writes_csv(tmp_path):
    path = tmp_path / "d2.csv"
    argv = ["sweep", "--kind", "df-vs-d2", "--method", "approx", "--count", "3", "--out", str(path)]
    assert cli.main(argv) == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "d2_m,d2_effective_m,d_f_approx_m"
    assert len(lines) == 4


def test_heatmap_prints_without_out(capsys):
    assert cli.main(["heatmap", "--count", "3", "--method", "approx"]) == 0
    assert "phi_rad" in capsys.readouterr().out


def test_unwritable_output(tmp_path):
    path = tmp_path / "missing" / "out.csv"
    assert cli.main(["solve", "--method", "approx", "--out", str(path)]) == 1


def test_validation_failure_exit_code(monkeypatch, capsys):
    report = ValidationReport([ValidationRow("aligned", "case", 2.0, 1.0, 0.0, False)])
    monkeypatch.setattr(cli, "run_validation", lambda **kwargs: report)
    assert cli.main(["validate"]) == 1
    assert "1 of 1 checks failed" in capsys.readouterr().err


def test_validation_success_message(monkeypatch, capsys):
    report = ValidationReport([ValidationRow("aligned", "case", 1.0, 1.0, 0.0, True)])
    monkeypatch.setattr(cli, "run_validation", lambda **kwargs: report)
    assert cli.main(["validate"]) == 0
    assert "All checks passed" in capsys.readouterr().out


def test_validate_takes_scenario_flags(monkeypatch, tmp_path, capsys):
    report = ValidationReport([ValidationRow("aligned", "case", 1.0, 1.0, 0.0, True)])
    calls = []

    def fake_validation(**kwargs):
        calls.append(kwargs)
        return report

    monkeypatch.setattr(cli, "run_validation", fake_validation)
    assert cli.main(["validate", "--scenario", "ula", "--d1", "0.2"]) == 0
    assert calls[-1]["d1_m"] == 0.2
    assert calls[-1]["d2_m"] == 0.05
    assert calls[-1]["wavelength_m"] == 0.001

    path = tmp_path / "validation.csv"
    argv = ["validate", "--preset-ue", "smartphone", "--freq", "150e9", "--out", str(path)]
    assert cli.main(argv) == 0
    assert calls[-1]["wavelength_m"] == pytest.approx(2e-3, rel=1e-3)
    assert calls[-1]["d2_m"] != 0.05
    assert path.exists()

    capsys.readouterr()
    assert cli.main(["validate", "--d2", "0.02", "--dump-config"]) == 0
    assert "d2=0.02" in capsys.readouterr().out
    assert len(calls) == 2


if __name__ == "__main__":
    Fire()
