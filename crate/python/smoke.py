"""Smoke test for the pyqrmax extension.

Build and copy the module next to this file first:

    cargo build --release -p qrmax-python --features extension-module
    cp target/release/libpyqrmax.so python/pyqrmax.so
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pyqrmax  # noqa: E402


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    z = pyqrmax.ZorichMap(3)
    x = [0.4, -0.7, 0.25]
    y = z.eval(x)
    assert close(math.hypot(*y), math.exp(0.25), 1e-12)
    assert all(close(a, b, 1e-12) for a, b in zip(z.eval(z.invert(y)), y))

    p = pyqrmax.PowerMap(3, 2)
    assert p.topological_degree == 4
    target = [0.3, 0.5, -0.2]
    pre = p.preimages(target)
    assert len(pre) == 4
    for q in pre:
        assert all(close(a, b, 1e-9) for a, b in zip(p.eval(q), target))

    ray = pyqrmax.TargetSet.ray([1.0, 0.0])
    sm = pyqrmax.ShrinkMap(ray)
    assert close(sm.pullback_distance([0.0, 2.0]), 1.0, 1e-15)
    h = sm.h1([0.0, 2.0])
    assert close(h[1], 2.0 * math.exp(-0.25), 1e-12)
    assert pyqrmax.p_of_distance(1.0) == 0.5

    spiral = pyqrmax.ShrinkMap(pyqrmax.TargetSet.spiral(1.0))
    m, argmax = spiral.max_modulus(2, 3.0, 1024)
    assert close(m, 9.0, 1e-9), m

    s = pyqrmax.GrowthSchedule.exp_exp(4, 0.5)
    assert s.nu(s.radii[1]) == 2.0
    assert s.in_exceptional(10.0) and not s.in_exceptional(s.radii[0])
    g = pyqrmax.AnnulusGluing(s)
    assert g.eval([2.0, 0.0]) == [2.0, 0.0]
    assert len(g.blend_zeros()) == 3

    config = {
        "dimension": 2,
        "seed": 7,
        "set": {"kind": "radial_ray", "direction": [1.0, 0.0]},
        "map": {"kind": "polynomial", "degree": 2},
        "verify": {
            "r_grid": {"spacing": "geometric", "min": 0.5, "max": 4.0, "count": 5},
            "samples_per_sphere": 256,
            "distortion": {"samples": 50},
            "lipschitz_pairs": 500,
            "modulus_samples": 200,
        },
    }
    report = json.loads(pyqrmax.run(json.dumps(config), "verify"))
    assert report["passed"], [s for s in report["suites"] if not s["passed"]]
    print("pyqrmax smoke test passed:", len(report["suites"]), "suites")


if __name__ == "__main__":
    main()
