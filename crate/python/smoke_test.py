#!/usr/bin/env python3
"""Smoke test for the _discfrac Python extension.

Builds the cdylib with cargo if needed, copies it next to this script as an
importable module, and exercises the main types and operations. Run from
anywhere:

    python3 python/smoke_test.py [--release]
"""
import argparse
import json
import math
import shutil
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
REPO = HERE.parent


def build_extension(release: bool) -> Path:
    profile = "release" if release else "debug"
    cmd = ["cargo", "build", "-p", "discfrac-py"]
    if release:
        cmd.append("--release")
    subprocess.run(cmd, cwd=REPO, check=True)
    built = REPO / "target" / profile / "lib_discfrac.so"
    if not built.exists():  # e.g. macOS
        built = REPO / "target" / profile / "lib_discfrac.dylib"
    target = HERE / "_discfrac.so"
    shutil.copy2(built, target)
    return target


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--release", action="store_true", help="build with --release")
    args = ap.parse_args()

    build_extension(args.release)
    sys.path.insert(0, str(HERE))
    import _discfrac as df

    # weights by the two-term recurrence
    assert df.gl_weights(0.5, "difference", 3) == [1.0, -0.5, -0.125, -0.0625]
    assert df.gl_weights(0.5, "sum", 3) == [1.0, 0.5, 0.375, 0.3125]

    # factorial functions and pole conventions
    assert abs(df.gamma_ratio(6.0, 3.5) - 36.108133347056402) < 1e-9
    assert df.gamma_ratio(4.0, -1.0) == 0.0
    assert df.gamma_ratio(-1.0, -4.0) == -24.0
    assert abs(df.falling_factorial(1.5, 0.5) - 1.3293403881791370) < 1e-10
    assert df.rising_factorial(0.0, 0.7) == 0.0
    try:
        df.gamma_ratio(-2.0, 1.5)
        raise AssertionError("expected kernel singularity")
    except ValueError as e:
        assert "kernel singularity" in str(e)

    # grids and the hand-computed anchor value
    ones = df.GridFunction(0.0, [1.0, 1.0, 1.0, 1.0])
    u = df.apply(ones, "nabla", "left", "sum", 0.5, 0.0)
    assert u.value_at(0.0) == 0.0
    assert abs(u.value_at(2.0) - 1.5) < 1e-12
    u = df.apply(ones, "delta", "left", "sum", 0.5, 0.0)
    assert abs(u.origin - 0.5) < 1e-12
    assert abs(u.value_at(1.5) - 1.5) < 1e-12

    # the two formulations coincide on a wiggly sequence
    values = [math.sin(0.8 * i) for i in range(16)]
    f = df.GridFunction(-2.0, values)
    r = df.apply(f, "nabla", "left", "difference", 0.75, -2.0, formulation="riemann")
    b = df.apply(f, "nabla", "left", "difference", 0.75, -2.0, formulation="binomial")
    assert r.origin == b.origin and len(r) == len(b)
    for x, y in zip(r.values, b.values):
        assert abs(x - y) <= 1e-9 * max(abs(x), abs(y), 1.0)

    # CSV/JSON round trips
    g = df.GridFunction.from_csv(f.to_csv())
    assert len(g) == len(f) and abs(g.origin - f.origin) < 1e-9
    g = df.GridFunction.from_json(f.to_json())
    assert g.values == f.values

    # a slice of the verification registry
    ids = df.check_ids()
    assert len(ids) == 37
    reports = [json.loads(line) for line in df.run_suite(["thm2.5-3", "eq21", "qinv"], 42)]
    for r in reports:
        assert r["verdict"] == "pass", r
    # reports are reproducible
    assert df.run_suite(["eq21"], 42) == df.run_suite(["eq21"], 42)

    print("smoke test passed:", len(ids), "checks registered,",
          f"{len(reports)} sampled, all pass")
    return 0


if __name__ == "__main__":
    sys.exit(main())
