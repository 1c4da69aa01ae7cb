import csv
import json
import subprocess
import sys

import pytest

from pcg_mub import cli
from pcg_mub.exceptions import NonConvergenceError
from pcg_mub.experiment import ScanSettings


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_allowed_m(capsys):
    assert run(capsys, "allowed-m", "--d", "10")[:2] == (0, "1 3 7 9\n")
    assert run(capsys, "allowed-m", "--d", "7")[:2] == (0, "1 2 3 4 5 6\n")


def test_allowed_m_bad_d(capsys):
    code, _, err = run(capsys, "allowed-m", "--d", "1")
    assert code == 2 and "usage" in err


def test_missing_d_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["allowed-m"])
    assert exc.value.code == 2


def test_check_config(capsys):
    code, out, _ = run(capsys, "check-config", "--d", "10", "--m", "5")
    assert code == 0 and "unbiased=false" in out
    code, out, _ = run(capsys, "check-config", "--d", "4")
    assert "unbiased=true" in out and "tau_p_um=48" in out


def test_conditional_stdout(capsys):
    code, out, _ = run(capsys, "conditional", "--d", "4", "--tx-um", "192", "--m", "1",
                       "--sigma-um", "520")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,p_0,p_1,p_2,p_3,entropy"
    assert "# e_min=2.000000" in lines


def test_conditional_both(capsys, tmp_path):
    path = tmp_path / "m.csv"
    code, out, _ = run(capsys, "conditional", "--d", "4", "--method", "both", "--out", str(path))
    assert code == 0
    gap = float(next(l for l in out.splitlines() if l.startswith("max_discrepancy=")).split("=")[1])
    assert gap <= 1e-6
    assert len(path.read_text().splitlines()) == 5


def test_conditional_json(capsys, tmp_path):
    path = tmp_path / "m.json"
    assert run(capsys, "conditional", "--d", "3", "--format", "json", "--out", str(path))[0] == 0
    doc = json.loads(path.read_text())
    assert len(doc["matrix"]) == 3 and doc["entropies"][0] == pytest.approx(1.5849625, abs=1e-6)


def test_scan_fig2(capsys, tmp_path):
    path = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "scan-tp", "--d", "4", "--tp-min-um", "1000", "--tp-max-um", "1700",
                     "--out", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    best = max(rows, key=lambda r: float(r["e_0"]))
    assert float(best["tp_phys_um"]) == 1320.0
    assert path.read_bytes().count(b"\r") == 0


def test_scan_empty_range(capsys):
    code, _, _ = run(capsys, "scan-tp", "--d", "4", "--tp-min-um", "1500", "--tp-max-um", "1000")
    assert code == 2


def test_scan_is_reproducible(capsys, tmp_path):
    outs = []
    for i, jobs in enumerate(("1", "2")):
        path = tmp_path / f"s{i}.csv"
        run(capsys, "scan-tp", "--d", "5", "--tp-min-um", "1200", "--tp-max-um", "1400",
            "--jobs", jobs, "--out", str(path))
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_incomplete_marker(capsys, tmp_path, monkeypatch):
    real = ScanSettings.evaluate

    def flaky(self, tp):
        if tp > 1100:
            raise NonConvergenceError("boom")
        return real(self, tp)

    monkeypatch.setattr(ScanSettings, "evaluate", flaky)
    path = tmp_path / "s.csv"
    code, _, _ = run(capsys, "scan-tp", "--d", "4", "--tp-min-um", "1000", "--tp-max-um", "1300",
                     "--out", str(path))
    assert code == 3
    text = path.read_text()
    assert text.endswith("# INCOMPLETE\n") and len(text.splitlines()) == 6


def test_find_peak_summary(capsys, tmp_path):
    path = tmp_path / "peaks.csv"
    code, _, _ = run(capsys, "find-peak", "--d", "3", "5", "--sx-um", "48", "--out", str(path),
                     "--scan-dir", str(tmp_path / "scans"))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert [float(r["tp_opt_um"]) for r in rows] == [1320.0, 1320.0]
    assert (tmp_path / "scans" / "scan_d5.csv").exists()


def test_find_peak_window_miss(capsys):
    code, _, err = run(capsys, "find-peak", "--d", "4", "--window-um", "1240", "1300")
    assert code == 4 and "boundary" in err


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"d": 10, "m": 5, "tx-um": 100}))
    _, out, _ = run(capsys, "check-config", "--config", str(cfg))
    assert "d=10 m=5" in out and "tx_um=100" in out
    _, out, _ = run(capsys, "check-config", "--config", str(cfg), "--m", "3")
    assert "m=3" in out and "unbiased=true" in out


def test_bad_config(capsys, tmp_path):
    assert run(capsys, "check-config", "--config", str(tmp_path / "nope.json"))[0] == 2


def test_negative_parameter(capsys):
    assert run(capsys, "conditional", "--d", "4", "--sigma-um", "-1")[0] == 2


def test_io_error(capsys, tmp_path):
    code, _, _ = run(capsys, "conditional", "--d", "2", "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 3


def test_standard_cg(capsys):
    code, out, _ = run(capsys, "standard-cg", "--l-max", "50")
    assert code == 0
    spread = float(out.strip().splitlines()[-1].split("central_spread=")[1])
    assert spread > 0.01


def test_selftest(capsys, monkeypatch):
    monkeypatch.setenv("PCG_MUB_SEED", "7")
    code, out, _ = run(capsys, "selftest", "--configs", "3")
    assert code == 0 and "seed 7" in out and "FAIL" not in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "pcg_mub", "allowed-m", "--d", "9"],
                         capture_output=True, text=True, check=True)
    assert res.stdout == "1 2 4 5 7 8\n"
