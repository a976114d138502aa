import os
import subprocess
import sys
from pathlib import Path

import pytest

FIGS_DIR = Path(__file__).resolve().parents[1]
REPO_ROOT = FIGS_DIR.parent

if str(FIGS_DIR) not in sys.path:
    sys.path.insert(0, str(FIGS_DIR))


def run_cli(args, cwd):
    """Invoke the hyperflux CLI as a subprocess: the external interface."""
    env = dict(os.environ)
    env["PYTHONPATH"] = str(REPO_ROOT / "src") + os.pathsep + env.get("PYTHONPATH", "")
    return subprocess.run([sys.executable, "-m", "hyperflux", *args],
                          cwd=cwd, env=env, capture_output=True, text=True)


@pytest.fixture(scope="session")
def example1_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("ex1")
    proc = run_cli(["example1", "--omega", "1.0", "--r-max", "2.0",
                    "--grid", "32", "--tau-max", "2.4", "--tau-samples", "9",
                    "--out-dir", str(out)], cwd=str(out))
    assert proc.returncode == 0, proc.stderr
    return out / "sweep.csv"


@pytest.fixture(scope="session")
def conservation_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    proc = run_cli(["sweep", "--out-dir", str(out)], cwd=str(out))
    assert proc.returncode == 0, proc.stderr
    return out / "conservation.csv"
