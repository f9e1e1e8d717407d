import math

import numpy as np
import pytest

from thermal_multipath import ConfigurationError
from thermal_multipath.cli import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    main,
    point_seed,
)
from thermal_multipath.config import (
    ExperimentConfig,
    SweepSpec,
    apply_sweep_value,
    parse_config,
    render_config,
    validate_config,
)


def test_sweep_spec_parse_and_points():
    spec = SweepSpec.parse("phase:0:6.28:4")
    assert spec == SweepSpec("phase", 0.0, 6.28, 4)
    assert spec.points() == pytest.approx([0.0, 1.57, 3.14, 4.71])


def test_sweep_spec_bad_descriptors():
    for text in ("phase:0:1", "phase:a:1:4", "phase:0:1:1"):
        with pytest.raises(ConfigurationError):
            SweepSpec.parse(text)


def test_parse_config_basics():
    text = """
    # a comment
    geometry.l_c = 120.5
    spectrum.omega0 = 500.0

    engine = quadrature
    """
    config = parse_config(text)
    assert config.l_c == 120.5
    assert config.omega0 == 500.0
    assert config.engine == "quadrature"
    assert config.s_c == 0.0  # untouched default


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ConfigurationError):
        parse_config("geometry.bogus=1.0")


def test_parse_config_rejects_bad_value():
    with pytest.raises(ConfigurationError):
        parse_config("geometry.l_c=abc")
    with pytest.raises(ConfigurationError):
        parse_config("just a line")


def test_parse_config_channels():
    config = parse_config(
        "network.variant=n_order\n"
        "norder.channels=control:0.5:100.0:0.0,target:1.0:90.0:1.0\n"
        "norder.times=0.0,0.5\n"
        "norder.thetas=0.1,0.2\n"
    )
    assert len(config.channels) == 2
    assert config.channels[0].kind == "control"
    assert config.channels[1].phi == 1.0
    assert config.times == (0.0, 0.5)
    assert config.thetas == (0.1, 0.2)


def test_render_parse_round_trip():
    config = parse_config(
        "geometry.l_c=101.25\n"
        "spectrum.delta_omega=0.5\n"
        "engine=all\n"
        "seed=12\n"
        "sweep=phase:0.0:6.283185307179586:24\n"
    )
    assert parse_config(render_config(config)) == config
    # rendering is idempotent
    assert render_config(parse_config(render_config(config))) == render_config(config)


def test_validate_config_errors():
    with pytest.raises(ConfigurationError):
        validate_config(ExperimentConfig(variant="nope"))
    with pytest.raises(ConfigurationError):
        validate_config(ExperimentConfig(engine="nope"))
    with pytest.raises(ConfigurationError):
        validate_config(ExperimentConfig(variant="n_order"))
    with pytest.raises(ConfigurationError):
        parse_config("sweep=polarization.theta_c:0:1:4")  # scalar variant


def test_apply_sweep_value_phase():
    config = ExperimentConfig()
    shifted = apply_sweep_value(config, "phase", math.pi)
    assert shifted.l_c == pytest.approx(config.l_c + math.pi / config.omega0)
    direct = apply_sweep_value(config, "geometry.s_t", 3.5)
    assert direct.s_t == 3.5
    with pytest.raises(ConfigurationError):
        apply_sweep_value(config, "engine", 1.0)


def test_point_seed_deterministic_and_distinct():
    assert point_seed(7, 3) == point_seed(7, 3)
    assert point_seed(7, 3) != point_seed(7, 4)
    assert point_seed(8, 3) != point_seed(7, 3)


def _read(path):
    return path.read_text(encoding="utf-8")


def test_cli_sweep_analytic(tmp_path):
    out = tmp_path / "scan.csv"
    code = main(
        ["sweep", "--engine", "analytic", "--sweep", "phase:0:6.283185307179586:8",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    lines = _read(out).splitlines()
    assert lines[0] == "param,analytic,quadrature,mc_estimate,mc_stderr,g2,regime_ok"
    rows = [l for l in lines if l and not l.startswith("#")][1:]
    assert len(rows) == 8
    assert all(row.endswith("true") for row in rows)
    footers = [l for l in lines if l.startswith("#")]
    assert any("visibility_analytic=" in f for f in footers)
    assert any("visibility_g2=" in f for f in footers)
    peak = float(rows[0].split(",")[1])
    assert peak == pytest.approx(1.0, abs=1e-6)


def test_cli_sweep_stdout(capsys):
    code = main(["sweep", "--engine", "analytic", "--sweep", "phase:0:6.283:4"])
    assert code == EXIT_OK
    captured = capsys.readouterr().out
    assert captured.startswith("param,")


def test_cli_sweep_with_config_file(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text(
        "engine=quadrature\nsweep=phase:0.0:6.283:4\n", encoding="utf-8"
    )
    out = tmp_path / "scan.csv"
    assert main(["sweep", "--config", str(config), "--out", str(out)]) == EXIT_OK
    rows = [l for l in _read(out).splitlines() if l and not l.startswith(("#", "param"))]
    values = [float(r.split(",")[2]) for r in rows]
    assert values[0] == pytest.approx(1.0, abs=1e-6)


def test_cli_sweep_requires_descriptor():
    assert main(["sweep", "--engine", "analytic"]) == EXIT_CONFIG


def test_cli_mc_requires_seed():
    assert (
        main(["sweep", "--engine", "mc", "--sweep", "phase:0:6.283:2",
              "--trials", "1600"])
        == EXIT_CONFIG
    )


def test_cli_coarse_grid_rejected(tmp_path):
    config = tmp_path / "coarse.cfg"
    config.write_text(
        "engine=quadrature\ngrid.spacing=1.0\nsweep=phase:0:6.283:2\n",
        encoding="utf-8",
    )
    assert main(["sweep", "--config", str(config)]) == EXIT_CONFIG


def test_cli_bad_out_path():
    assert (
        main(["sweep", "--engine", "analytic", "--sweep", "phase:0:6.283:2",
              "--out", "/nonexistent-dir/scan.csv"])
        == EXIT_IO
    )


def test_cli_sweep_mc_byte_identical_across_workers(tmp_path):
    outs = []
    for workers in (1, 4):
        out = tmp_path / f"mc-{workers}.csv"
        code = main(
            ["sweep", "--engine", "mc", "--sweep", "phase:0:6.283:2",
             "--trials", "1600", "--seed", "11", "--workers", str(workers),
             "--out", str(out)]
        )
        assert code == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_cli_cnot_table(tmp_path):
    config = tmp_path / "cnot.cfg"
    config.write_text("network.variant=cnot_polarization\n", encoding="utf-8")
    out = tmp_path / "table.csv"
    assert main(["cnot-table", "--config", str(config), "--out", str(out)]) == EXIT_OK
    lines = _read(out).splitlines()
    rows = [l.split(",") for l in lines[1:] if l and not l.startswith("#")]
    assert len(rows) == 16
    for row in rows:
        deviation = float(row[7])
        assert deviation < 1e-6
    truths = [float(r[6]) for r in rows]
    assert sum(truths) == 4.0


def test_cli_cnot_table_requires_variant():
    assert main(["cnot-table"]) == EXIT_CONFIG


def test_cli_cnot_table_rejects_residual_phase(tmp_path):
    config = tmp_path / "cnot.cfg"
    config.write_text(
        "network.variant=cnot_polarization\ngeometry.l_c=100.1\n", encoding="utf-8"
    )
    assert main(["cnot-table", "--config", str(config)]) == EXIT_CONFIG


def test_cli_bell_curve_default(tmp_path):
    out = tmp_path / "bell.csv"
    assert main(["bell-curve", "--out", str(out)]) == EXIT_OK
    lines = _read(out).splitlines()
    rows = [l.split(",") for l in lines[1:] if l and not l.startswith("#")]
    assert len(rows) == 36
    for row in rows:
        theta_c, theta_t, normalized, expected = (float(v) for v in row[:4])
        assert expected == pytest.approx(0.5 * np.cos(theta_c - theta_t) ** 2)
        assert normalized == pytest.approx(expected, abs=1e-6)


def test_cli_n_order(tmp_path):
    config = tmp_path / "norder.cfg"
    config.write_text(
        "network.variant=n_order\n"
        "norder.channels="
        "control:0.7853981633974483:100.0:0.0,"
        "control:0.7853981633974483:100.0:0.0,"
        "control:0.7853981633974483:100.0:0.0\n"
        "norder.thetas=0.7853981633974483,0.7853981633974483,0.7853981633974483\n",
        encoding="utf-8",
    )
    out = tmp_path / "norder.csv"
    assert main(["n-order", "--config", str(config), "--out", str(out)]) == EXIT_OK
    lines = _read(out).splitlines()
    assert lines[0] == "n,cycle_sum,mc_estimate,mc_stderr,note"
    row = lines[1].split(",")
    assert int(row[0]) == 3
    assert float(row[1]) == pytest.approx(2.0 / 216.0, abs=1e-12)
    assert row[4] == "derived extension beyond pairwise order"


def test_cli_validate_default(capsys):
    assert main(["validate"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS oracle_equivalence_config" in out
    assert "PASS oracle_equivalence_randomized" in out
    assert "PASS g2_minus_background_identity" in out
    assert "PASS regime_consistency" in out
    assert "FAIL" not in out


def test_cli_validate_with_mc(capsys):
    code = main(["validate", "--engine", "all", "--seed", "3", "--trials", "100000"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS mc_agreement_zscore" in out
    assert "FAIL" not in out
