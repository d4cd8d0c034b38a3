"""Smoke test for the pmd_codes extension module.

Build and install first, e.g.

    maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/pmd_codes-*.whl
"""

import json
import math
import os
import tempfile

import pmd_codes as pmd


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    f = pmd.Field(2, 2)
    assert f.q == 4 and f.modulus == [1, 1, 1]
    assert f.mul([0, 1], [0, 1]) == [1, 1]
    assert f.trace([0, 1]) == 1

    assert close(pmd.theorem1_bound(1, 1, 2), 1 / math.sqrt(3), 1e-15)
    assert close(pmd.corollary1_bound(0.5, 2), 1.0, 1e-15)
    g = pmd.gap(10, 10, 2)
    assert close(g["gap"], 10 + math.log2(42), 1e-12)

    full = pmd.CodeSpace.standard(2, 2, 2)
    assert close(full.epsilon(), 1.0, 1e-12)

    theta = math.acos(1 / math.sqrt(3))
    magic = pmd.CodeSpace.bloch_state(theta, math.pi / 4)
    report = magic.report(workers=2)
    assert close(report["epsilon"], 1 / math.sqrt(3), 1e-12), report
    assert report["slack"] > -1e-9

    code = pmd.CodeSpace.random(2, 1, 3, seed=7)
    value, deviation = code.average_overlap()
    assert close(value, 1 / 3, 1e-9) and deviation < 1e-9
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "code.json")
        code.save(path)
        again = pmd.CodeSpace.load(path)
        assert again.to_json() == code.to_json()
        assert json.loads(again.to_json())["format_version"] == 1

    assert pmd.design_deviation(2, 3, seed=1) < 1e-9
    assert pmd.num_labels(2, 3) == 81
    assert pmd.pauli_label(1, 1, 2) == "a=(1);b=(0)"

    best, rep, traj = pmd.search(1, 0, 2, seed=3, restarts=4, steps=300)
    assert close(rep["epsilon"], 1 / math.sqrt(3), 1e-3), rep
    assert all(b >= c for (_, b), (_, c) in zip(traj, traj[1:]))
    assert best.n == 1 and best.k == 0

    eps, _, _ = pmd.bloch_grid_min(200)
    assert close(eps, 1 / math.sqrt(3), 1e-6)

    try:
        pmd.Field(6)
    except ValueError:
        pass
    else:
        raise AssertionError("Field(6) must fail")

    print("pmd_codes smoke test passed")


if __name__ == "__main__":
    main()
