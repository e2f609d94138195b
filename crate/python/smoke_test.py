"""Builds the extension module and checks a handful of values from Python.

    python3 python/smoke_test.py
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "torsionlab-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libpytorsionlab.so"
    if not lib.exists():
        lib = lib.with_suffix(".dylib")
    dest = Path(tempfile.mkdtemp()) / "pytorsionlab.so"
    shutil.copy(lib, dest)
    sys.path.insert(0, str(dest.parent))


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    build()
    import pytorsionlab as tl

    c = tl.ChainComplex([1, 1], [[[3.0]]])
    assert close(c.torsion(), 3.0, 1e-14)
    assert close(c.torsion("laplacian"), 3.0, 1e-12)
    assert c.homology_dims() == [0, 0]
    assert tl.ChainComplex.from_json(c.to_json()).dims == [1, 1]

    s = (2 * math.sin(math.pi / 7)) ** 2
    assert close(tl.lens_torsion(7, 1, 1), s * s, 1e-12)
    a = tl.lens_torsion_multiset(7, 1)
    b = tl.lens_torsion_multiset(7, 2)
    assert max(abs(x - y) for x, y in zip(a, b)) > 1e-9

    value, _ = tl.hurwitz_zeta(2.0, 1.0)
    assert close(value, math.pi**2 / 6, 1e-14)
    assert close(tl.circle_det(2 * math.pi), 4 * math.pi**2, 1e-10)
    zeta, _ = tl.circle_zeta(1.0, 1.0, 0.0)
    assert close(zeta, 2 * (1 / (2 * math.pi)) ** 2 * math.pi**2 / 6, 1e-10)

    theta = 2 * math.pi / 7
    log_t = tl.circle_log_analytic_torsion(1.0, theta)
    assert close(log_t, tl.circle_log_reidemeister_torsion(theta, 1), 1e-9)
    assert abs(tl.torus_log_analytic_torsion([[1.0, 0.0], [0.0, 1.0]])) < 1e-9
    assert tl.cheeger_muller_check(5, 2)["gap"] < 1e-6

    try:
        tl.ChainComplex([1, 2], [[[1.0]]])
    except ValueError:
        pass
    else:
        raise AssertionError("shape mismatch accepted")
    try:
        tl.circle_zeta(1.0, 0.5)
    except ArithmeticError:
        pass
    else:
        raise AssertionError("pole not reported")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
