import logging
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from pseudomode import cli
from pseudomode import io as pio

TWO_MODE = """
[network]
modes = [{omega = 2.0, kerr = 0.0}, {omega = 2.0, kerr = 0.0}]
coupling = {kind = "bilinear2", g = 0.1}
"""

PARENT = """
[network]
modes = [{omega = 1.0, kerr = 0.01}, {omega = 1.1, kerr = 0.02},
         {omega = 0.9, kerr = 0.015}, {omega = 1.2, kerr = 0.0}]
coupling = {kind = "four_wave", g = 0.001}
drive_mode = 3
"""

DRIVE = """
[drive]
g_sb = 0.2
mass = 1.0
cutoff = 1.5
"""

COMMANDS = {
    "sector": TWO_MODE + '[sector]\ncharges = {N = 3}\n',
    "poles": TWO_MODE + '[poles]\nsource = [1, 0]\n',
    "reduce": TWO_MODE + '[reduce]\nsource = [1, 0]\nwindow = [1.5, 2.5]\npoints = 11\n',
    "dynamics": TWO_MODE + '[dynamics]\nkernel = {poles = [[0.3, -0.2]], residues = [[0.04, 0.0]]}\nT = 10.0\n',
    "fit": TWO_MODE + textwrap.dedent("""
        [fit]
        source = "poles"
        kernel = {poles = [[0.3, -0.2], [1.0, -0.1]], residues = [[0.04, 0.0], [0.02, 0.01]]}
        window = [-1.0, 3.0]
        n_poles = 2
        """),
    "displace": PARENT + '[displace]\nbeta = [4.0, 8.0]\nsource = [1, 1, 0]\nhold_g3 = 0.05\n',
}


def write(tmp_path, body, name="run.toml"):
    path = tmp_path / name
    path.write_text(body)
    return path


def run(tmp_path, body, fmt="delimited", name="out.txt"):
    cfg = write(tmp_path, f'command = "{body[0]}"\noutput_format = "{fmt}"\n' + body[1])
    out = tmp_path / name
    status = cli.main(["run", str(cfg), "-o", str(out)])
    return status, out


def test_poles_resonant_pair(tmp_path):
    status, out = run(tmp_path, ("poles", COMMANDS["poles"]))
    assert status == 0
    cols, rows = pio.loads_delimited(out.read_text())
    assert cols[1].startswith("re_z")
    assert [r[1] for r in rows] == pytest.approx([2.1, 1.9], abs=1e-15)


def test_dynamics_deviation(tmp_path):
    status, out = run(tmp_path, ("dynamics", COMMANDS["dynamics"]), fmt="structured")
    assert status == 0
    rep = cli.read_report(out.read_text())
    assert rep["max_deviation"] < 1e-6
    assert rep["trajectory_pair"].grid[0] == 0


def test_missing_coupling_strength(tmp_path, caplog):
    body = COMMANDS["poles"].replace(", g = 0.1", "")
    with caplog.at_level(logging.ERROR, logger="pseudomode"):
        status, _ = run(tmp_path, ("poles", body))
    assert status == 2
    assert "coupling.g" in caplog.text


def test_unknown_command(tmp_path):
    status, _ = run(tmp_path, ("transmogrify", TWO_MODE))
    assert status == 2


def test_syntax_error_reports_line(tmp_path, caplog):
    cfg = write(tmp_path, 'command = "poles"\n[network\n')
    with caplog.at_level(logging.ERROR, logger="pseudomode"):
        assert cli.main(["run", str(cfg)]) == 2
    assert "line 2" in caplog.text


def test_unreadable_config(tmp_path):
    assert cli.main(["run", str(tmp_path / "absent.toml")]) == 2


def test_missing_command_parameter(tmp_path, caplog):
    with caplog.at_level(logging.ERROR, logger="pseudomode"):
        status, _ = run(tmp_path, ("poles", TWO_MODE))
    assert status == 2 and "poles.source" in caplog.text


def test_numerical_failure_exit(tmp_path):
    body = TWO_MODE + '[dynamics]\nkernel = {poles = [[0.0, 0.0]], residues = [[-400.0, 0.0]]}\nT = 20.0\ndt = 0.5\n'
    with pytest.warns(Warning):
        status, _ = run(tmp_path, ("dynamics", body))
    assert status == 3


@pytest.mark.parametrize("command", sorted(COMMANDS))
@pytest.mark.parametrize("fmt", ["delimited", "structured"])
def test_output_is_deterministic(tmp_path, command, fmt):
    _, a = run(tmp_path, (command, COMMANDS[command]), fmt, "a.txt")
    _, b = run(tmp_path, (command, COMMANDS[command]), fmt, "b.txt")
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("command", sorted(COMMANDS))
def test_structured_report_reparses(tmp_path, command):
    status, out = run(tmp_path, (command, COMMANDS[command]), "structured")
    assert status == 0
    rep = cli.read_report(out.read_text())
    assert rep["command"] == command
    text = out.read_text()
    assert cli.pio.dumps_structured(pio.loads_toml(text)) == text


def test_delimited_values_round_trip(tmp_path):
    _, out = run(tmp_path, ("reduce", COMMANDS["reduce"]))
    _, srt = run(tmp_path, ("reduce", COMMANDS["reduce"]), "structured", "s.txt")
    _, rows = pio.loads_delimited(out.read_text())
    green = pio.unpair(pio.loads_toml(srt.read_text())["green"])
    np.testing.assert_array_equal([r[1] + 1j * r[2] for r in rows], green)


def test_threads_do_not_change_output(tmp_path):
    body = COMMANDS["reduce"]
    _, a = run(tmp_path, ("reduce", body), name="a.txt")
    _, b = run(tmp_path, ("reduce", "threads = 3\n" + body), name="b.txt")
    assert a.read_bytes() == b.read_bytes()


def test_fit_from_samples_file(tmp_path):
    w = np.linspace(-1, 3, 200)
    vals = 0.04 / (w - (0.3 - 0.2j)) + (0.02 + 0.01j) / (w - (1.0 - 0.1j))
    np.savetxt(tmp_path / "samples.txt", np.column_stack([w, vals.real, vals.imag]))
    body = TWO_MODE + textwrap.dedent("""
        [fit]
        source = "samples_file"
        samples_file = "samples.txt"
        window = [-1.0, 3.0]
        n_poles = 2
        """)
    status, out = run(tmp_path, ("fit", body), "structured")
    assert status == 0
    rep = cli.read_report(out.read_text())
    np.testing.assert_allclose(rep["pole_residue_set"].sorted().poles,
                               [0.3 - 0.2j, 1.0 - 0.1j], atol=1e-9)
    assert rep["residual"] < 1e-10


def test_fit_spectral_density(tmp_path):
    body = TWO_MODE + DRIVE + '[fit]\nsource = "spectral_density"\nwindow = [0.0, 7.5]\nn_poles = 2\n'
    status, out = run(tmp_path, ("fit", body), "structured")
    assert status == 0
    rep = cli.read_report(out.read_text())
    assert rep["causal"] is False
    poles = pio.unpair(rep["pole_residue_set"]["poles"])
    np.testing.assert_allclose(np.sort(poles.imag), [-1.5, 1.5], rtol=1e-8)


def test_displace_from_drive(tmp_path):
    body = PARENT + DRIVE + "g_e = 0.01\na_rf = 100.0\nomega_rf = 1.5\nomega_d = 1.0\nkappa_d = 0.1\n" \
        + '[displace]\nsource = [1, 1, 0]\n'
    status, out = run(tmp_path, ("displace", body), "structured")
    assert status == 0
    row = cli.read_report(out.read_text())["rows"][0]
    assert row["beta_abs"] == pytest.approx(abs(1 / (0.5 + 0.05j)))
    assert row["k"] == 4


def test_console_script(tmp_path):
    cfg = write(tmp_path, 'command = "poles"\n' + COMMANDS["poles"])
    proc = subprocess.run([sys.executable, "-m", "pseudomode.cli", "run", str(cfg)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# pole")
