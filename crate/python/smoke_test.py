"""Smoke test for the compiled extension (build it with `maturin develop -m crates/python/Cargo.toml`)."""

import math

import nematic_membrane_py as nm

unit = nm.Material()
assert (unit.lam, unit.mu) == (1.0, 1.0)
try:
    nm.Material(-1.0, 1.0)
except ValueError as e:
    assert "lambda" in str(e)
else:
    raise AssertionError("negative lambda accepted")

q = nm.QTensor.from_director([0.0, 0.0, 1.0])
assert q.is_uniaxial() and q.is_biaxial()
ev = sorted(q.eigenvalues())
assert all(abs(a - b) < 1e-12 for a, b in zip(ev, [-1 / 3, -1 / 3, 2 / 3]))

p = nm.project_qb_euclidean([0.0, 0.0, 0.0, 0.0, 1.0, 0.0])
assert p.is_uniaxial(1e-9)
assert nm.dist2_weighted([0.1, -0.05, -0.05, 0.0, 0.02, 0.0], unit) < 1e-20

assert nm.foundation_density([0.5, 0.0], unit) < 1e-12
assert nm.foundation_density([2.0, 0.0], unit) > 0.0
qbar = nm.optimal_qbar([1.0, 0.0], unit)
assert qbar.is_biaxial(1e-9)

lam = nm.Laminate(nm.QTensor([0.0] * 6))
assert lam.period == 1.0
mean = lam.mean()
assert all(abs(x) < 1e-12 for row in mean for x in row)
interfaces, second = lam.hadamard(2)
assert interfaces > 0 and second <= 1e-10
assert lam.sup_deviation(8) < lam.sup_deviation(4)

nodes, u, energy = nm.solve_membrane(unit, 6, 6, [1.0, 0.0])
assert len(nodes) == len(u) == 49
assert all(x == [0.0, 0.0] for (xy, x) in zip(nodes, u) if xy[0] == 0.0)
assert energy < 0.0

d, eta, delta, rho = nm.scaling_ladder(0.1)
assert math.isclose(eta, 0.01) and math.isclose(rho, math.sqrt(0.1))

rows = nm.gamma_sweep([1.0, 0.0], [0.2, 0.1, 0.05], unit)
gaps = [r["gap"] for r in rows]
assert gaps[0] > gaps[1] > gaps[2] > 0.0
assert all(r["gap"] <= r["bracket"] for r in rows)

print("smoke test passed")
