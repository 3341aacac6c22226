import subprocess
import sys
import time

import numpy as np
import pytest

from arrivaltimes.cli import OUTPUT_DIR_ENV, main
from arrivaltimes.distributions import transmission_probability
from arrivaltimes.wavepacket import GaussianSpec, MomentumAmplitude


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def parse(text):
    header = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            header[key.strip()] = value.strip()
        elif line[0].isalpha():
            columns = line.split(",")
        else:
            rows.append([float(v) for v in line.split(",")])
    return header, columns, np.array(rows)


def test_free_default(capsys):
    code, out = run(["free", "--x0", "-50", "--dx", "10", "--v0", "1"], capsys)
    assert code == 0
    header, columns, data = parse(out)
    assert columns == ["t", "Pi"]
    assert header["subcommand"] == "free" and header["x0"] == "-50.0"
    assert np.trapezoid(data[:, 1], data[:, 0]) == pytest.approx(1.0, abs=1e-6)
    assert float(header["total"]) == pytest.approx(1.0, abs=1e-6)


def test_twelve_significant_digits(capsys):
    _, out = run(["free", "--n-t", "5", "--t-min", "40", "--t-max", "60"], capsys)
    line = out.splitlines()[-1]
    assert line.split(",")[0] == "6.00000000000e+01"


def test_free_modes(capsys):
    outs = {}
    for mode in ("sym", "antisym", "general", "positive"):
        code, out = run(["free", "--mode", mode, "--n-t", "200", "--t-min", "0", "--t-max", "120"], capsys)
        assert code == 0
        outs[mode] = parse(out)[2]
    assert np.max(np.abs(outs["sym"][:, 1] - outs["antisym"][:, 1])) < 1e-10
    np.testing.assert_allclose(outs["general"][:, 1], outs["positive"][:, 1], rtol=1e-9, atol=1e-14)


def test_usage_errors(capsys):
    for argv in (["barrier", "--U", "1.0"], ["free", "--x0"], ["free", "--mode", "sideways"], [],
                 ["free", "--t-min", "3"], ["free", "--dx", "0"], ["scan", "--param", "width"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_empty_scan_range(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["scan", "--param", "height", "--start", "0", "--stop", "1", "--num", "0"])
    assert exc.value.code == 2
    assert "empty scan range" in capsys.readouterr().err


def test_barrier_without_height_equals_free(capsys):
    _, free = run(["free"], capsys)
    _, barrier = run(["barrier", "--U", "0", "--l", "10"], capsys)
    a, b = parse(free)[2], parse(barrier)[2]
    np.testing.assert_array_equal(a[:, 0], b[:, 0])
    assert np.max(np.abs(a[:, 1] - b[:, 1])) < 1e-12


def test_fig3_runtime(capsys):
    start = time.perf_counter()
    for U in ("0", "0.3", "0.48", "0.58", "1.0", "2.0"):
        code, out = run(["barrier", "--U", U, "--l", "10"], capsys)
        assert code == 0
        assert float(parse(out)[0]["total"]) == pytest.approx(1.0, abs=1e-6)
    assert time.perf_counter() - start < 10.0


def test_tilde_total(capsys):
    _, out = run(["barrier", "--U", "0.48", "--l", "10", "--variant", "tilde"], capsys)
    amp = MomentumAmplitude.from_gaussian(GaussianSpec())
    assert float(parse(out)[0]["total"]) == pytest.approx(transmission_probability(amp, 0.48, 10.0), rel=1e-6)


def test_scan_height_endpoints(capsys):
    _, out = run(["scan", "--param", "height", "--values", "100", "0", "--l", "10"], capsys)
    header, columns, data = parse(out)
    rows = {r[0]: dict(zip(columns, r)) for r in data}
    assert data[0, 0] == 0.0
    assert rows[0.0]["mean_t"] == pytest.approx(rows[0.0]["free_t"], rel=1e-3)
    assert rows[100.0]["mean_t"] == pytest.approx(rows[100.0]["hartman_t"], rel=5e-3)
    assert header["delay_sign_change_U"] != "none"


def test_scan_width_parallel_matches_serial(capsys, tmp_path):
    argv = ["scan", "--param", "width", "--values", "10", "15", "20", "25", "30", "--U", "1.0"]
    _, serial = run(argv, capsys)
    _, parallel = run(argv + ["--jobs", "3"], capsys)
    assert serial == parallel
    _, columns, data = parse(serial)
    tau, tau_T = data[:, columns.index("tau")], data[:, columns.index("tau_T")]
    assert np.ptp(tau) < 0.06
    assert tau_T[-1] - tau_T[1] > 1.0


def test_output_file_and_env_dir(tmp_path, monkeypatch, capsys):
    path = tmp_path / "free.csv"
    assert main(["free", "-o", str(path)]) == 0
    assert capsys.readouterr().out == ""
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))
    (tmp_path / "env").mkdir()
    assert main(["free"]) == 0
    assert (tmp_path / "env" / "free.csv").read_text().splitlines()[-1] == path.read_text().splitlines()[-1]


def test_deterministic_output(tmp_path):
    outputs = []
    for name in ("a", "b"):
        path = tmp_path / f"{name}.csv"
        subprocess.run([sys.executable, "-m", "arrivaltimes", "barrier", "--U", "0.58", "--l", "10",
                        "--variant", "kn", "-o", "out.csv"], check=True, cwd=tmp_path)
        path.write_bytes((tmp_path / "out.csv").read_bytes())
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_validate_pass_and_designed_failure(capsys):
    code, out = run(["validate", "--profile", "free"], capsys)
    header, _, _ = parse(out.replace("PASS", "1").replace("FAIL", "0"))
    assert code == 0 and "status,PASS" in out
    code, out = run(["validate", "--profile", "free", "--dt", "0.5"], capsys)
    assert code == 1 and "status,FAIL" in out


def test_module_entry_point_exit_code():
    proc = subprocess.run([sys.executable, "-m", "arrivaltimes", "scan"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "usage" in proc.stderr
