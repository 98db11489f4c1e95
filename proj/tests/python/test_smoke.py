import math
import random

import pytest

import hypertree as ht


def random_system(n, rng):
    masses = [rng.uniform(0.5, 2.0) for _ in range(n)]
    pos = [[rng.gauss(0, 1) for _ in range(3)] for _ in range(n)]
    vel = [[rng.gauss(0, 1) for _ in range(3)] for _ in range(n)]
    return ht.ParticleSystem(masses, pos, vel)


def test_reduced_masses():
    assert ht.nbody_reduced_mass([1.0, 1.0]) == 0.5
    assert ht.nbody_reduced_mass([1.0, 2.0, 3.0]) == pytest.approx(1.0)
    tree = ht.JacobiTree.parse("((1 2) (3 4))", 4)
    assert ht.node_reduced_masses(tree, [1, 1, 1, 1]) == [0.5, 0.5, 1.0]
    assert tree.labels() == ["1,2", "3,4", "12,34"]
    assert str(tree) == "((1 2) (3 4))"


def test_errors_map_to_python():
    with pytest.raises(ht.InvalidInput):
        ht.JacobiTree.parse("((1 2) 2)", 3)
    with pytest.raises(ValueError):
        ht.nbody_reduced_mass([1.0])


def test_fork_tree_and_round_trip():
    ftree = ht.fork_tree(ht.JacobiTree.parse("(1 (2 3))", 3))
    assert str(ftree) == "((r2z (r2x r2y)) (r1z (r1x r1y)))"
    assert "γ_{2,1}" in ftree.angle_names()
    rng = random.Random(4)
    x = [rng.gauss(0, 1) for _ in range(6)]
    v = [rng.gauss(0, 1) for _ in range(6)]
    st = ht.angle_rates(ftree, ht.from_cartesian(ftree, x), v)
    back = ht.to_cartesian(ftree, st)
    assert max(abs(a - b) for a, b in zip(back, x)) < 1e-12
    v2 = sum(c * c for c in v)
    assert st.rho_dot**2 + st.rho**2 * ht.kinetic_value(ftree, st) == pytest.approx(v2, rel=1e-12)


def test_decomposition_matches_tensor():
    rng = random.Random(9)
    for n in (2, 3, 4, 5):
        d = ht.decompose(random_system(n, rng), ht.JacobiTree.sequential(n))
        assert len(d["contributions"]) == 2 * n - 3
        assert d["total"] == pytest.approx(d["lambda_sq_tensor"], rel=1e-10)
        assert d["lambda_sq_hyperspherical"] == pytest.approx(d["lambda_sq_tensor"], rel=1e-10)


def test_lambda_sq_unit_case():
    assert ht.lambda_sq([1.0, 0.0], [0.0, 1.0]) == 1.0


def test_scattering_closed_form():
    coulomb = ht.Potential.hyperradial("coulomb", k=1.0)
    for b in (0.5, 1.0, 2.0):
        r = ht.sweep(1.0, 1.0, b, coulomb)
        assert r["status"] == "ok"
        assert r["chi"] == pytest.approx(2 * math.atan(1 / (2 * b)), rel=1e-6)
    free = ht.sweep(1.0, 1.0, 1.0, ht.Potential.hyperradial("zero"))
    assert free["Phi"] == pytest.approx(math.pi, abs=1e-6)


def test_effective_potential_springs():
    tree = ht.JacobiTree.sequential(3)
    value, err = ht.effective_potential("harmonic", tree, [1, 1, 1], 2.0, 100, 1, k=1.0)
    mu = ht.nbody_reduced_mass([1, 1, 1])
    assert value == pytest.approx(0.5 * 3 * mu * 4.0, rel=1e-12)
    assert err < 1e-12


def test_simulation_conserves_lambda_under_hyperradial_potential():
    rng = random.Random(2)
    system = random_system(3, rng)
    out = ht.simulate(system, ht.Potential.hyperradial("harmonic", k=1.0), ht.JacobiTree.sequential(3),
                      ht.IntegratorSettings(dt=1e-3, steps=2000, record_every=100))
    lam = out["lambda_sq"]
    assert max(abs(x - lam[0]) for x in lam) < 1e-10 * lam[0]
    assert len(out["final"]) == 3
