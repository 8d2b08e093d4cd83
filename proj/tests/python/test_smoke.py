import os

import numpy as np
import pytest

import ornithopter as orn

CONFIG = os.environ.get(
    "ORNITHOPTER_CONFIG",
    os.path.join(os.path.dirname(__file__), "..", "..", "configs", "dragonfly_hover.cfg"),
)


def test_hat_is_the_cross_product_matrix():
    a = np.array([1.0, -2.0, 0.5])
    b = np.array([0.3, 0.7, -1.1])
    np.testing.assert_allclose(orn.hat(a) @ b, np.cross(a, b), atol=1e-15)


def test_exp_so3_quarter_turn():
    r = orn.exp_so3(np.array([0.0, 0.0, np.pi / 2]))
    np.testing.assert_allclose(r @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15)


def test_dragonfly_mass():
    m = orn.default_dragonfly()
    assert m.total_mass == pytest.approx(6.2922e-5, rel=1e-4)
    assert m.wing_masses[0] / m.body_mass == pytest.approx(0.035, abs=5e-5)


def test_mass_matrix_energy_matches_per_body_sum():
    d = orn.mass_matrix(orn.default_dragonfly(), seed=3)
    c, xi = d["C"], d["xi"]
    np.testing.assert_allclose(c, c.T, atol=1e-15 * np.abs(c).max())
    assert 0.5 * xi @ c @ xi == pytest.approx(d["kinetic_energy_bodies"], rel=1e-12)


def test_reduced_simulation_falls_without_air():
    m = orn.default_dragonfly()
    air = orn.AeroModel()
    air.rho = 0.0
    vehicle = orn.Vehicle(m, air)
    body = orn.BodyState()
    body.position = np.array([0.0, 0.0, 2.0])
    final, positions = orn.simulate_reduced(
        vehicle, body, orn.dragonfly_hover_kinematics(), 1e-5, 200
    )
    assert positions.shape == (201, 3)
    assert np.all(np.isfinite(positions))
    assert final.t == pytest.approx(2e-3)
    assert final.position[2] > 2.0  # gravity acts along +e3


def test_decomposition_closes():
    vehicle = orn.Vehicle(orn.default_dragonfly(), orn.AeroModel())
    body = orn.BodyState()
    body.position = np.array([0.0, 0.0, 2.0])
    body.t = 0.004
    d, accel = orn.decompose_forces(vehicle, body, orn.dragonfly_hover_kinematics())
    trans, rot = orn.closure_residual(vehicle.morphology, body, d, accel)
    assert trans < 1e-12 and rot < 1e-12


def test_quick_validation_passes():
    cfg = orn.load_config(CONFIG)
    passed, checks = orn.run_validation(cfg, quick=True)
    assert passed, [c for c in checks if c["status"] == "FAIL"]
    assert len({c["id"] for c in checks}) == len(checks)
