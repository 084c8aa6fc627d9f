"""Smoke test for the gifpo Python extension.

Builds the extension with cargo unless GIFPO_PY_LIB points at a built
library, then loads it from a temporary directory.
"""

import os
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    lib = os.environ.get("GIFPO_PY_LIB")
    if lib is None:
        subprocess.run(
            ["cargo", "build", "-p", "gifpo-py", "--release", "--features", "extension-module"],
            cwd=ROOT,
            check=True,
        )
        lib = ROOT / "target" / "release" / "libgifpo_py.so"
    tmp = Path(tempfile.mkdtemp())
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy(lib, tmp / f"gifpo_py{suffix}")
    sys.path.insert(0, str(tmp))
    import gifpo_py

    return gifpo_py


def main():
    g = load()
    xor = g.gif_classes("xor2")
    assert len(xor) == 4 and sum(len(c[3]) for c in xor) == 8, xor
    assert len(g.gif_classes("and2")) == 3
    assert g.universe_size("add64") == 12415

    ti = "inputs a b c\n0 1 0\n1 0 1\n1 1 0\n1 1 1\n"
    s = g.cover("c1", ti)
    assert (s["total"], s["covered"], s["unreachable"]) == (7, 7, 0), s

    net = g.synth("mux4", "aotree")
    r = g.fault_sim(net)
    statuses = {f["status"] for f in r["records"]}
    assert r["faults"] > 0 and statuses <= {"detected", "untestable"}, statuses

    row = g.report("c1", "ripple")
    assert row["gifpo"] == 7 and row["stuckat"]["percent"] == 100.0, row

    try:
        g.cover("circuit bad\noutput y 1\ngate and2 g y a b\nend\n")
    except ValueError:
        pass
    else:
        raise AssertionError("bad circuit accepted")
    print("smoke test ok", g.__version__)


if __name__ == "__main__":
    main()
