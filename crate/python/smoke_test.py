"""Smoke test for the hessian_walk_py extension module.

Build first, e.g. `pip install --no-build-isolation ./crates/python`.
"""

import json
import math

import hessian_walk_py as hw


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    cube = hw.Polytope.hypercube(3)
    assert (cube.n, cube.m) == (3, 6)
    assert cube.contains([0.1, 0.2, -0.3])
    assert not cube.contains([1.5, 0.0, 0.0])
    center = cube.analytic_center()
    assert all(abs(c) < 1e-9 for c in center)

    # Box metric is diagonal with entries 1/(1-x)^2 + 1/(1+x)^2.
    x = [0.3, -0.2, 0.0]
    g = cube.metric(x)
    for i, xi in enumerate(x):
        assert close(g[i][i], 1 / (1 - xi) ** 2 + 1 / (1 + xi) ** 2, 1e-12)
    assert close(cube.ricci(x, [1.0, 0.0, 0.0]), 0.0, 1e-10)
    assert len(cube.leverage(x)) == 6 and len(cube.drift(x)) == 3

    again = hw.Polytope.from_json(cube.to_json())
    assert again.a == cube.a and again.b == cube.b

    try:
        hw.Polytope([[1.0, 0.0]], [0.0, 1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("dimension mismatch accepted")

    step = hw.geodesic_step(cube, x, [0.0, 0.0, 0.0], 0.1)
    assert step["endpoint"] == x and close(step["log_ratio"], 0.0, 1e-12)

    simplex = hw.Polytope.standard_simplex(2)
    samples, stats = hw.sample(simplex, 3000, seed=4)
    assert len(samples) == 3000 and all(simplex.contains(s) for s in samples)
    assert 0.5 < stats["accept_rate"] <= 1.0
    again, _ = hw.sample(simplex, 3000, seed=4)
    assert again == samples

    report = hw.uniformity_report(simplex, samples, seed=1)
    json.dumps(report)

    table = hw.compare_walks(cube, [0.05, 0.2], 200, seed=1)
    assert len(table["rows"]) == 2

    sol = hw.physarum_solve([[1.0, 1.0]], [1.0], [2.0, 1.0], [0.5, 0.5], 20.0)
    assert close(sol["objective"], 1.0, 1e-3), sol["objective"]
    assert sol["max_infeasibility"] < 1e-8
    objs = [c["objective"] for c in sol["trajectory"]]
    assert all(b <= a + 1e-9 for a, b in zip(objs, objs[1:]))
    assert not any(math.isnan(v) for v in sol["x"])

    print("smoke test ok, version", hw.__version__)


if __name__ == "__main__":
    main()
