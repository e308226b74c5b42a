import json
import math

import jsonschema
import pytest

from dipolefocus import cli
from dipolefocus.errors import ConfigurationError
from dipolefocus.tables import Table, from_csv, from_json, output_schema, to_csv, to_json

HALF_PI = 0.5 * math.pi

SMALL = {
    "k0-curve": ["--alpha", "sweep(0.01, 0.5pi, 6)", "--with-oracle"],
    "t-map": ["--grid", "4", "--with-oracle"],
    "spectrum": ["--detuning", "sweep(-5, 5, 11)", "--with-oracle"],
    "focal-profile": ["--x", "sweep(0, 2, 9)"],
    "mode-content": ["--alpha", "sweep(0.2, 0.5pi, 3)"],
}


def run(tmp_path, command, *extra, fmt="csv", name="out"):
    out = tmp_path / f"{name}.{fmt}"
    code = cli.main(["--command", command, "--format", fmt, "--out", str(out), *extra])
    return code, out.read_text(encoding="utf-8")


class TestParsing:
    @pytest.mark.parametrize("text, value", [
        ("0.43pi", 0.43 * math.pi), ("pi/3", math.pi / 3), ("2*pi/3", 2 * math.pi / 3),
        ("pi", math.pi), ("1.2", 1.2), ("-pi/4", -math.pi / 4), (" 0.5 PI ", HALF_PI),
    ])
    def test_angles(self, text, value):
        assert abs(cli.parse_angle(text) - value) < 1e-15

    @pytest.mark.parametrize("text", ["pie", "", "pi/0", "1..2"])
    def test_bad_angles(self, text):
        with pytest.raises(ConfigurationError):
            cli.parse_angle(text)

    def test_sweep(self):
        v = cli.parse_values("sweep(0.01, 0.5pi, 90)")
        assert len(v) == 90 and v[0] == 0.01 and abs(v[-1] - HALF_PI) < 1e-15

    @pytest.mark.parametrize("text", ["sweep(0, 1, 1)", "sweep(0, 1)", "sweep(0, 1, x)"])
    def test_bad_sweeps(self, text):
        with pytest.raises(ConfigurationError):
            cli.parse_values(text)

    @pytest.mark.parametrize("tol", [1e-15, 1e-3])
    def test_tolerance_range(self, tol):
        with pytest.raises(ConfigurationError):
            cli.RunConfig("verify", tol=tol)

    def test_unknown_command(self):
        with pytest.raises(ConfigurationError):
            cli.RunConfig("plot")


class TestTables:
    def test_csv_round_trip(self):
        t = Table(["a", "b", "flag"], [[0.1, 1 / 3, True], [2, -1e-20, False]],
                  {"n": 2, "x": math.pi, "label": "none"})
        assert from_csv(to_csv(t)) == t

    def test_json_round_trip(self):
        t = Table(["a", "b"], [[0.1, 1 / 3]], {"x": 1.5})
        assert from_json(to_json(t)) == t

    def test_twelve_digits(self):
        assert to_csv(Table(["x"], [[1 / 3]])).splitlines()[1] == "0.333333333333"

    def test_row_length_checked(self):
        with pytest.raises(ValueError):
            Table(["a", "b"], [[1.0]])


class TestCommands:
    @pytest.mark.parametrize("command", sorted(SMALL))
    def test_csv_round_trip(self, tmp_path, command):
        code, text = run(tmp_path, command, *SMALL[command])
        assert code == 0
        table = from_csv(text)
        assert to_csv(table) == text

    @pytest.mark.parametrize("command", sorted(SMALL))
    def test_deterministic(self, tmp_path, command):
        _, a = run(tmp_path, command, *SMALL[command], fmt="json", name="a")
        _, b = run(tmp_path, command, *SMALL[command], fmt="json", name="b")
        assert a == b

    @pytest.mark.parametrize("command", sorted(SMALL))
    def test_json_schema(self, tmp_path, command):
        code, text = run(tmp_path, command, *SMALL[command], fmt="json")
        assert code == 0
        doc = json.loads(text)
        jsonschema.validate(doc, output_schema())
        assert doc["schema_version"] == 1
        assert doc["config"]["command"] == command

    def test_k0_curve_endpoints(self, tmp_path):
        _, text = run(tmp_path, "k0-curve", "--alpha", "sweep(0.01, 0.5pi, 90)")
        t = from_csv(text)
        assert len(t.rows) == 90
        assert abs(t.column("K0_px")[-1] - 2.0) < 1e-8
        assert abs(t.column("K0_pw")[-1] - 1.706667) < 1e-6
        assert 0.9 < t.footer["K0_unity_alpha_pw"] < 1.0

    def test_k0_curve_two_points(self, tmp_path):
        _, text = run(tmp_path, "k0-curve", "--alpha", "sweep(0.1, 1.0, 2)")
        alphas = from_csv(text).column("alpha")
        assert len(alphas) == 2 and alphas[0] < alphas[1]

    def test_t_map_default_grid(self, tmp_path):
        _, text = run(tmp_path, "t-map")
        t = from_csv(text)
        assert len(t.rows) == 2500
        assert 0.095 < t.footer["shadow_min_T"] < 0.105
        assert 0.40 < t.footer["shadow_min_alpha_over_pi"] < 0.46
        assert abs(t.rows[-1][2] - 0.1467) < 1e-4

    def test_t_map_rejects_degenerate_grid(self, tmp_path):
        code = cli.main(["--command", "t-map", "--alpha", "0.4", "--out", str(tmp_path / "x.csv")])
        assert code == 2

    def test_spectrum(self, tmp_path):
        _, text = run(tmp_path, "spectrum")
        t = from_csv(text)
        assert len(t.rows) == 201
        row0 = t.rows[100]
        assert row0[0] == 0
        assert abs(row0[1] - 0.187) < 1e-3
        assert row0[2] < 1e-10
        for row in (t.rows[0], t.rows[-1]):
            assert abs(row[1] - 1) < 0.01 and abs(row[2] - 1) < 0.01

    def test_focal_profile(self, tmp_path):
        _, text = run(tmp_path, "focal-profile", "--x", "sweep(0, 2, 41)")
        t = from_csv(text)
        assert t.rows[0][1] == 1 and t.rows[0][2] == 1
        assert t.footer["S_z_min"] < 0
        assert t.footer["W_el_min"] >= 0

    def test_stdout(self, capsys):
        assert cli.main(["--command", "k0-curve", "--alpha", "sweep(0.5, 1, 2)"]) == 0
        assert capsys.readouterr().out.startswith("alpha,K0_pw")


class TestConfig:
    def test_file_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\ncommand = k0-curve\nalpha = sweep(0.1, 1.0, 3)\nformat=json\n")
        out = tmp_path / "o.csv"
        code = cli.main(["--config", str(cfg), "--alpha", "sweep(0.1, 1.0, 2)", "--format", "csv",
                         "--out", str(out)])
        assert code == 0
        assert len(from_csv(out.read_text()).rows) == 2

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("command = verify\ncolour = red\n")
        assert cli.main(["--config", str(cfg)]) == 2

    def test_missing_config_file(self, tmp_path, capsys):
        path = tmp_path / "nope.cfg"
        assert cli.main(["--config", str(path)]) == 2
        assert str(path) in capsys.readouterr().err

    def test_unwritable_output_reports_path(self, tmp_path, capsys):
        path = tmp_path / "missing_dir" / "o.csv"
        assert cli.main(["--command", "k0-curve", "--alpha", "1.0", "--out", str(path)]) == 2
        assert str(path) in capsys.readouterr().err

    def test_no_command(self):
        assert cli.main([]) == 2

    def test_accuracy_error_exit_code(self, monkeypatch, tmp_path):
        from dipolefocus.errors import AccuracyError

        def boom(cfg):
            raise AccuracyError("no convergence", estimate=1.0, gap=1e-3)
        monkeypatch.setitem(cli.RUNNERS, "spectrum", boom)
        assert cli.main(["--command", "spectrum", "--out", str(tmp_path / "s.csv")]) == 3


@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("verify") / "v.csv"
    code = cli.main(["--command", "verify", "--out", str(out)])
    return code, from_csv(out.read_text())


class TestVerify:
    def test_all_pass(self, default_run):
        code, table = default_run
        assert code == 0
        assert all(table.column("passed"))
        assert table.footer["failed"] == 0

    def test_report_lists_residuals(self, default_run):
        _, table = default_run
        assert table.columns == ["check", "measured", "tolerance", "passed"]
        assert len(table.rows) >= 20

    def test_coarse_tolerance(self, tmp_path):
        out = tmp_path / "v.csv"
        assert cli.main(["--command", "verify", "--tol", "1e-4", "--out", str(out)]) == 0
        t = from_csv(out.read_text())
        tol = dict(zip(t.column("check"), t.column("tolerance")))
        assert tol["transmittance.closed_vs_oracle_grid"] == pytest.approx(1e-3)

    def test_flipped_gouy_fails(self, tmp_path):
        out = tmp_path / "v.csv"
        assert cli.main(["--command", "verify", "--out", str(out)], gouy=HALF_PI) == 1
        t = from_csv(out.read_text())
        row = t.rows[t.column("check").index("multipole.perfect_reflection_residual")]
        assert row[3] is False
        assert abs(row[1] - 2.0) < 1e-9
