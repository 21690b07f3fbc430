"""Acceptance criteria 1-9, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even under
output capture) or directly with ``python tests/test_acceptance.py``.
"""

import filecmp
import json
import os
import subprocess
import sys
import tempfile
import time

import pytest

from dhl import spectral, suites

MAPS = suites.corpus_maps()


def _report(capsys, number, title, records, extra=""):
    failed = [r.name for r in records if not r.passed]
    status = "PASS" if not failed else "FAIL"
    line = f"criterion {number} [{title}]: {status} ({len(records) - len(failed)}/{len(records)} records{extra})"
    if failed:
        line += " failing: " + ", ".join(failed[:5])
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return not failed


def check_1(capsys=None):
    spectral._CACHE.clear()
    t0 = time.perf_counter()
    recs = suites.index_suite(MAPS, 32)
    dt = time.perf_counter() - t0
    recs = [r for r in recs if r.name.startswith(("index/", "index-stability/"))]
    ok = _report(capsys, 1, "index formulas", recs, f", {dt:.1f}s")
    return ok and dt < 120


def check_2(capsys=None):
    recs = suites.dirac_harmonic_suite(MAPS, 32, 100, 0, 1e-8)
    worst = max(max(r.computed["tension_minus_curv"], r.computed["dirac"]) for r in recs)
    return _report(capsys, 2, "Dirac-harmonic spaces", recs, f", worst residual {worst:.1e}")


def check_3(capsys=None):
    return _report(capsys, 3, "curvature term vanishing", suites.vanishing_suite(0, 100, 1e-12))


def check_4(capsys=None):
    return _report(capsys, 4, "energy identity", suites.energy_suite((1, 2, 3), 1e-6))


def check_5(capsys=None):
    return _report(capsys, 5, "energy flow", suites.flow_suite((0.05, 0.1), 200, 1e-4))


def check_6(capsys=None):
    return _report(capsys, 6, "moduli dimensions", suites.moduli_suite(MAPS, 32))


def check_7(capsys=None):
    return _report(capsys, 7, "integer identities", suites.integer_suite(MAPS, 32, (1, 2)))


def check_8(capsys=None):
    return _report(capsys, 8, "algebraic properties", suites.algebra_suite(0, 1e-12))


def check_9(capsys=None):
    with tempfile.TemporaryDirectory() as tmp:
        outs, codes = [], []
        t0 = time.perf_counter()
        for k in range(2):
            out = os.path.join(tmp, f"run{k}")
            proc = subprocess.run([sys.executable, "-m", "dhl.cli", "corpus", "--seed", "0", "--out", out],
                                  capture_output=True, text=True)
            codes.append(proc.returncode)
            outs.append(out)
        dt = time.perf_counter() - t0
        same = filecmp.cmp(os.path.join(outs[0], "report.json"), os.path.join(outs[1], "report.json"), shallow=False)
        same_tables = all(filecmp.cmp(os.path.join(outs[0], sub, t), os.path.join(outs[1], sub, t), shallow=False)
                          for sub in ("tables", "plots") for t in sorted(os.listdir(os.path.join(outs[0], sub))))
        with open(os.path.join(outs[0], "report.json")) as fh:
            nrec = json.load(fh)["summary"]["records"]
    ok = same and same_tables and codes == [0, 0] and dt / 2 < 600 and nrec >= 40
    line = (f"criterion 9 [reproducibility]: {'PASS' if ok else 'FAIL'} (identical report: {same}, "
            f"identical tables and plots: {same_tables}, exit codes {codes}, {nrec} records, {dt / 2:.0f}s per run)")
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number, capsys):
    assert globals()[f"check_{number}"](capsys)


if __name__ == "__main__":
    results = [globals()[f"check_{k}"]() for k in range(1, 10)]
    sys.exit(0 if all(results) else 1)
