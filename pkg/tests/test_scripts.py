import json
import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def run_script(name, *args):
    proc = subprocess.run([sys.executable, str(SCRIPTS / name), *args], capture_output=True, text=True, check=True)
    return proc.stdout


def test_dimension_table_flags_defective_cases():
    out = run_script("dimension_table.py", "--max-d", "3", "--max-m", "4", "--max-r", "3", "--check-numerically")
    # sigma_3 of four qubits is the classic defective case
    line = next(ln for ln in out.splitlines() if ln.startswith("segre") and "(2, 2, 2, 2)" in ln and " 3 " in ln)
    assert "defective" in line


def test_witness_alpha_script():
    out = json.loads(run_script("witness_alpha.py", "--starts", "16"))
    assert out["negative_eigs"] == 6 and 1.0 < out["alpha"] < 1.05


def test_lusd_threshold_script():
    out = json.loads(run_script("lusd_threshold.py", "--trials", "3"))
    assert out["result"]["n_star"] == 3 and out["result"]["success_above"] == 0


@pytest.mark.slow
def test_disjointness_script():
    out = run_script("disjointness.py", "--trials", "2", "--window", "1")
    assert "codim  12:   0/2 hits" in out
