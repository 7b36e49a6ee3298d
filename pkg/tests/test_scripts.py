import csv
import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize("name, args, first", [
    ("ridge_d4_sweep.py", ["--steps", "3"], "s"),
    ("parallel_report.py", ["--count", "2"], "family"),
    ("landmark_family.py", ["--h3", "0.5", "--samples", "21"], "h3"),
])
def test_script_runs(name, args, first, tmp_path):
    out = tmp_path / "out.csv"
    p = subprocess.run([sys.executable, str(SCRIPTS / name), *args, "--out", str(out)],
                       capture_output=True, text=True, timeout=300)
    assert p.returncode == 0, p.stderr
    rows = list(csv.reader(out.open()))
    assert rows[0][0] == first and len(rows) >= 2
