"""End-to-end runs of the command line interface, all in-process."""

import csv
import json
import math
import os

import pytest

from abprop.cli import main


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _read_summary(out):
    with open(os.path.join(out, "summary.json"), encoding="utf-8") as fh:
        return json.load(fh)


def _write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def test_spectrum_small_table(tmp_path):
    out = str(tmp_path / "spec")
    rc = main(["spectrum", "--alpha", "0.5", "--b0", "1.0",
               "--kmax", "1", "--mmax", "1", "--out", out])
    assert rc == 0
    header, rows = _read_csv(os.path.join(out, "spectrum.csv"))
    assert header == ["k", "m", "lambda", "norm_sq", "multiplicity"]
    assert len(rows) == 6
    table = {(int(r[0]), int(r[1])): r for r in rows}
    assert float(table[(0, 0)][2]) == pytest.approx(2.0, abs=1e-14)
    assert float(table[(-1, 0)][2]) == pytest.approx(1.0, abs=1e-14)
    assert float(table[(1, 1)][2]) == pytest.approx(6.0, abs=1e-14)
    # lowest Landau level carries every negative channel
    assert table[(-1, 0)][4] == "inf"
    assert table[(0, 1)][4] == "2"
    assert os.path.exists(os.path.join(out, "spectrum.png"))
    assert _read_summary(out)["command"] == "spectrum"


def test_spectrum_empty_range(tmp_path):
    out = str(tmp_path / "empty")
    rc = main(["spectrum", "--kmax", "-1", "--mmax", "-1", "--out", out,
               "--no-figures"])
    assert rc == 0
    header, rows = _read_csv(os.path.join(out, "spectrum.csv"))
    assert rows == []
    assert not os.path.exists(os.path.join(out, "spectrum.png"))


def test_kernel_battery_agreement(tmp_path):
    out = str(tmp_path / "kern")
    cfg = _write_config(tmp_path, "kern.json", {"times": [0.4], "out": out})
    rc = main(["kernel", "--config", cfg, "--no-figures"])
    assert rc == 0
    header, rows = _read_csv(os.path.join(out, "kernel.csv"))
    # one row per query and construction
    assert len(rows) == 27
    assert all(r[header.index("status")] == "ok" for r in rows)
    assert {r[header.index("construction")] for r in rows} == {
        "closed", "partial_wave", "covering"
    }
    summary = _read_summary(out)
    assert summary["results"]["max_scaled_deviation"] < 1e-4


def test_kernel_battery_flags_singular_times(tmp_path):
    out = str(tmp_path / "kern_mixed")
    cfg = _write_config(tmp_path, "mixed.json", {"times": [0.4, math.pi], "out": out})
    rc = main(["kernel", "--config", cfg, "--no-figures"])
    assert rc == 0
    header, rows = _read_csv(os.path.join(out, "kernel.csv"))
    states = [r[header.index("status")] for r in rows]
    assert states.count("ok") == 27 and states.count("error") == 27


def test_kernel_battery_all_singular_is_accuracy_failure(tmp_path):
    out = str(tmp_path / "kern_sing")
    cfg = _write_config(tmp_path, "sing.json", {"times": [math.pi], "out": out})
    rc = main(["kernel", "--config", cfg, "--no-figures"])
    assert rc == 4


EVOLVE_BASE = {
    "alpha": 0.25,
    "n_r": 64,
    "n_theta": 144,
    "grid_nu": 0.0,
    "r_max": 5.8,
    "times": [0.7],
    "t_end": 0.7,
    "initial_data": {"family": "gaussian", "sigma": 1.0, "center": [2.0, 0.0]},
    "figures": False,
}


def test_evolve_gaussian_run(tmp_path):
    out = str(tmp_path / "evo")
    cfg = _write_config(tmp_path, "evo.json", dict(EVOLVE_BASE, out=out))
    rc = main(["evolve", "--config", cfg])
    assert rc == 0
    assert os.path.exists(os.path.join(out, "wavefunction_t0.csv"))
    header, rows = _read_csv(os.path.join(out, "decay.csv"))
    assert len(rows) == 1
    results = _read_summary(out)["results"]
    assert results["l2_norm"] > 0
    assert results["mass_drift"] < 1e-3
    assert math.isfinite(results["strichartz"]["q=4,p=4"])
    assert results["strichartz"]["q=inf,p=2"] > 0


def test_evolve_accepts_csv_initial_data(tmp_path):
    first = str(tmp_path / "first")
    cfg = _write_config(tmp_path, "first.json", dict(EVOLVE_BASE, out=first))
    assert main(["evolve", "--config", cfg]) == 0
    snapshot = os.path.join(first, "wavefunction_t0.csv")
    second = str(tmp_path / "second")
    payload = dict(EVOLVE_BASE, out=second,
                   initial_data={"family": "csv", "path": snapshot})
    cfg2 = _write_config(tmp_path, "second.json", payload)
    assert main(["evolve", "--config", cfg2]) == 0


def test_evolve_single_mode(tmp_path):
    out = str(tmp_path / "mode")
    # half-integer flux keeps the mode inside the nu = 0.5 rule's native class
    payload = dict(EVOLVE_BASE, out=out, alpha=0.5, grid_nu=0.5,
                   initial_data={"family": "single_mode", "k": 0, "m": 0})
    cfg = _write_config(tmp_path, "mode.json", payload)
    assert main(["evolve", "--config", cfg]) == 0
    results = _read_summary(out)["results"]
    # an eigenmode only picks up a phase
    assert results["mass_drift"] < 1e-6


def test_verify_passes_on_defaults(tmp_path):
    out = str(tmp_path / "ver")
    rc = main(["verify", "--out", out, "--no-figures"])
    assert rc == 0
    header, rows = _read_csv(os.path.join(out, "verify.csv"))
    assert all(r[-1] == "pass" for r in rows)


def test_verify_fails_when_tightened(tmp_path):
    out = str(tmp_path / "tight")
    rc = main(["verify", "--out", out, "--tol", "1e-12", "--no-figures"])
    assert rc == 1


def test_verify_reruns_byte_identical(tmp_path):
    out = str(tmp_path / "det")
    assert main(["verify", "--out", out, "--no-figures"]) == 0
    paths = [os.path.join(out, n) for n in sorted(os.listdir(out))]
    first = {p: open(p, "rb").read() for p in paths}
    assert main(["verify", "--out", out, "--no-figures"]) == 0
    for p, blob in first.items():
        assert open(p, "rb").read() == blob, p


def test_verify_seed_changes_points_not_status(tmp_path):
    out = str(tmp_path / "seed")
    assert main(["verify", "--out", out, "--seed", "99", "--no-figures"]) == 0


def test_flag_overrides_config(tmp_path):
    out = str(tmp_path / "prec")
    cfg = _write_config(tmp_path, "prec.json",
                        {"alpha": 0.25, "k_max": 1, "m_max": 1, "out": out})
    rc = main(["spectrum", "--config", cfg, "--alpha", "0.8", "--no-figures"])
    assert rc == 0
    assert _read_summary(out)["config"]["alpha"] == 0.8


def test_bad_inputs_exit_codes(tmp_path):
    unknown = _write_config(tmp_path, "unknown.json", {"flux": 0.5})
    assert main(["spectrum", "--config", unknown]) == 2
    assert main(["spectrum", "--config", str(tmp_path / "missing.json")]) == 3
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert main(["spectrum", "--config", str(broken)]) == 2
    # the invariant battery needs a strictly fractional flux
    assert main(["verify", "--alpha", "0.0", "--out", str(tmp_path / "v0")]) == 2
    with pytest.raises(SystemExit):
        main(["unknown-command"])
