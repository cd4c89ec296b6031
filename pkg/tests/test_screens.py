"""Screen dynamics: radial reaction, integration, central projection."""

import math
import random

import numpy as np
import pytest

from projdyn import screens as sc
from projdyn.screens import (
    DomainExitError,
    TrajectorySample,
    VisibilityError,
    bivector_coords,
    central_project_state,
    change_time_factor,
    flat_screen,
    hyperboloid_screen,
    integrate,
    kepler_force,
    radial_reaction,
    restrict_force,
    sphere_screen,
    verify_projection,
    zero_force,
)


def random_sphere_state(rng, dim):
    q = np.array([rng.gauss(0, 1) for _ in range(dim)])
    q /= np.linalg.norm(q)
    v = np.array([rng.gauss(0, 1) for _ in range(dim)])
    v -= (v @ q) * q
    return q, v


# -- screen geometry ---------------------------------------------------------------

def test_screen_values_and_euler_relation():
    rng = random.Random(0)
    for screen in (flat_screen(3), sphere_screen(3), hyperboloid_screen(3)):
        for _ in range(10):
            q = np.array([rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(1.0, 2.0)])
            if not screen.in_domain(q):
                continue
            h = screen.value(q)
            g = screen.gradient(q)
            assert abs(g @ q - h) < 1e-12 * max(1, abs(h))  # Euler relation
            lam = 1.7
            assert abs(screen.value(lam * q) - lam * h) < 1e-12 * max(1, abs(h))


def test_sphere_hessian_matches_finite_differences():
    rng = random.Random(1)
    screen = sphere_screen(3)
    for _ in range(5):
        q = np.array([rng.uniform(0.3, 1.0) for _ in range(3)])
        H = screen.hessian(q)
        eps = 1e-6
        for i in range(3):
            dq = np.zeros(3)
            dq[i] = eps
            fd = (screen.gradient(q + dq) - screen.gradient(q - dq)) / (2 * eps)
            assert np.max(np.abs(fd - H[:, i])) < 1e-6


# -- radial reaction and restriction -------------------------------------------------

def test_radial_reaction_sphere_free():
    # |q| = 1, tangent velocity: lambda = -|v|^2
    rng = random.Random(2)
    screen = sphere_screen(3)
    for _ in range(5):
        q, v = random_sphere_state(rng, 3)
        lam = radial_reaction(screen, q, v, np.zeros(3))
        assert abs(lam + v @ v) < 1e-12


def test_radial_reaction_flat():
    screen = flat_screen(3)
    q = np.array([0.3, -0.2, 1.0])
    v = np.array([1.0, 2.0, 0.0])
    assert radial_reaction(screen, q, v, np.zeros(3)) == 0.0
    f = np.array([0.0, 0.0, 2.5])  # not tangent
    assert abs(radial_reaction(screen, q, v, f) + 2.5) < 1e-15


def test_restrict_force_examples():
    screen = sphere_screen(3)
    q = np.array([0.0, 0.0, 1.0])
    # e0 at the pole is already tangent
    out = restrict_force(lambda _: np.array([1.0, 0.0, 0.0]), screen, q)
    assert np.allclose(out, [1.0, 0.0, 0.0])
    # purely radial force restricts to zero
    out = restrict_force(lambda x: x.copy(), screen, q)
    assert np.allclose(out, 0.0)
    g = screen.gradient(q)
    assert abs(g @ restrict_force(lambda _: np.array([0.3, 1.0, 2.0]), screen, q)) < 1e-14


def test_change_time_factor():
    assert change_time_factor(1.0) == 1.0
    assert change_time_factor(2.0) == 4.0
    b = 1.0 / math.sqrt(2.0)  # flat vs sphere at q = (1, 0, 1)
    assert abs(change_time_factor(b) - 0.5) < 1e-15
    with pytest.raises(ValueError):
        change_time_factor(0.0)


# -- force fields ----------------------------------------------------------------------

def test_builtin_forces_homogeneity():
    rng = random.Random(3)
    for force in (
        zero_force(3),
        kepler_force(1.3, [0.2, 0.0, 1.0]),
        sc.oscillator_force(3),
        sc.inverse_cube_force(3, mu=0.7),
    ):
        for _ in range(5):
            q = np.array([rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(0.8, 1.5)])
            assert force.check_homogeneity(q)


def test_homogenize_force_restriction():
    # the homogenized field restricts to the original on the screen
    screen = flat_screen(3)
    c = np.array([0.7, 0.0, 0.0])

    def f_H(x):
        return c / np.linalg.norm(x) ** 2

    force = sc.homogenize_force(f_H, screen)
    q_on = np.array([0.4, -0.3, 1.0])
    assert np.allclose(force(q_on), f_H(q_on))
    # constant field on a flat screen scales as h^-3
    force_c = sc.homogenize_force(lambda x: c, screen)
    q = np.array([0.4, -0.3, 2.0])
    assert np.allclose(force_c(q), c / 2.0**3)


def test_kepler_exact_matches_numeric():
    force = kepler_force(1.5, [0.25, -0.5, 1.0])
    rng = random.Random(4)
    for _ in range(10):
        q = np.array([rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(0.7, 1.6)])
        numeric = force(q)
        exact = [comp.evaluate_float(list(q) + [0, 0, 0]) for comp in force.exact]
        assert np.max(np.abs(numeric - np.array(exact))) < 1e-12


# -- integration ---------------------------------------------------------------------------

def test_free_motion_flat_is_straight_line():
    screen = flat_screen(3)
    q0, v0 = [0.2, -0.1, 1.0], [0.4, 0.7, 0.0]
    traj = integrate(screen, zero_force(3), q0, v0, (0.0, 3.0), tol=1e-11)
    for t, q in zip(traj.times, traj.qs):
        expected = np.array(q0) + t * np.array(v0)
        assert np.max(np.abs(q - expected)) < 1e-8


def test_free_motion_sphere_is_great_circle():
    screen = sphere_screen(3)
    traj = integrate(screen, zero_force(3), [0, 0, 1.0], [1.0, 0, 0], (0.0, 5.0), tol=1e-11)
    for t, q in zip(traj.times, traj.qs):
        expected = np.array([math.sin(t), 0.0, math.cos(t)])
        assert np.max(np.abs(q - expected)) < 1e-8


def test_constraint_drift_bounded():
    rng = random.Random(5)
    screen = sphere_screen(3)
    for _ in range(3):
        q0, v0 = random_sphere_state(rng, 3)
        traj = integrate(screen, zero_force(3), q0, v0, (0.0, 4.0), tol=1e-10)
        dh, dv = traj.drift()
        assert dh <= 1e-9 and dv <= 1e-9


def test_free_motion_impulsion_constant():
    rng = random.Random(6)
    screen = sphere_screen(3)
    q0, v0 = random_sphere_state(rng, 3)
    traj = integrate(screen, zero_force(3), q0, v0, (0.0, 4.0), tol=1e-11)
    ref = bivector_coords(traj.qs[0], traj.vs[0])
    for q, v in zip(traj.qs, traj.vs):
        assert np.max(np.abs(bivector_coords(q, v) - ref)) < 1e-9


def kepler_period(mu, q0, v0, center):
    r = np.linalg.norm(np.array(q0[:2]) - np.array(center[:2]))
    energy = 0.5 * float(np.array(v0) @ np.array(v0)) - mu / r
    a = -mu / (2 * energy)
    return 2 * math.pi * math.sqrt(a**3 / mu)


def test_kepler_flat_conservation_over_ten_periods():
    mu = 1.0
    center = [0.0, 0.0, 1.0]
    q0 = [1.0, 0.0, 1.0]
    v0 = [0.0, 0.8, 0.0]
    period = kepler_period(mu, q0, v0, center)
    screen = flat_screen(3)
    force = kepler_force(mu, center)
    traj = integrate(screen, force, q0, v0, (0.0, 10 * period), tol=1e-12)

    def energy(q, v):
        return 0.5 * float(v[:2] @ v[:2]) - mu / np.linalg.norm(q[:2] - np.array(center[:2]))

    def ang_mom(q, v):
        return q[0] * v[1] - q[1] * v[0]

    e0, l0 = energy(traj.qs[0], traj.vs[0]), ang_mom(traj.qs[0], traj.vs[0])
    for q, v in zip(traj.qs, traj.vs):
        assert abs(energy(q, v) - e0) <= 1e-8 * abs(e0)
        assert abs(ang_mom(q, v) - l0) <= 1e-8 * abs(l0)
    # closure: after one period the orbit returns to the start
    qT = traj.interpolate(period)[:3]
    assert np.max(np.abs(qT - np.array(q0))) < 1e-6


def test_force_equivalence_modulo_radial():
    # f and f + gamma q generate the same trajectories on the screen
    screen = sphere_screen(3)
    base = sc.inverse_cube_force(3, mu=0.5)

    def shifted(q):
        return base(q) + 0.8 / float(q @ q) ** 2 * q

    shifted_force = sc.ProjectiveForceField(3, shifted)
    rng = random.Random(7)
    q0, v0 = random_sphere_state(rng, 3)
    t1 = integrate(screen, base, q0, v0, (0.0, 2.0), tol=1e-11)
    t2 = integrate(screen, shifted_force, q0, v0, (0.0, 2.0), tol=1e-11)
    for t in np.linspace(0.1, 1.9, 7):
        assert np.max(np.abs(t1.interpolate(t) - t2.interpolate(t))) < 1e-8


def test_domain_exit_reported():
    # flat chart restricted to the semi-conic wedge |q0| < q1: a straight
    # motion crossing the wall leaves the validity domain
    screen = sc.CustomScreen(
        2,
        h=lambda q: q[1],
        grad=lambda q: np.array([0.0, 1.0]),
        hess=lambda q: np.zeros((2, 2)),
        domain=lambda q: q[1] > 0 and abs(q[0]) < q[1],
    )
    with pytest.raises(DomainExitError) as err:
        integrate(screen, zero_force(2), [0.0, 1.0], [1.0, 0.0], (0.0, 3.0), tol=1e-10)
    assert err.value.t_exit is not None and 0.9 <= err.value.t_exit <= 1.1


# -- central projection ------------------------------------------------------------------------

def test_central_project_common_tangency_point():
    flat, sphere = flat_screen(3), sphere_screen(3)
    Q, V = central_project_state(flat, sphere, [0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    assert np.allclose(Q, [0, 0, 1]) and np.allclose(V, [1, 0, 0])


def test_central_project_known_point():
    flat, sphere = flat_screen(3), sphere_screen(3)
    Q, V = central_project_state(flat, sphere, [1.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    s = 1 / math.sqrt(2)
    assert np.allclose(Q, [s, 0.0, s])
    assert np.allclose(V, [s, 0.0, -s])
    assert np.allclose(bivector_coords([1, 0, 1], [1, 0, 0]), bivector_coords(Q, V))


def test_central_project_same_screen_identity():
    sphere = sphere_screen(3)
    rng = random.Random(8)
    q, v = random_sphere_state(rng, 3)
    Q, V = central_project_state(sphere, sphere, q, v)
    assert np.allclose(Q, q) and np.allclose(V, v)


def test_central_project_preserves_target_constraints_and_impulsion():
    rng = random.Random(9)
    flat, sphere = flat_screen(3), sphere_screen(3)
    for _ in range(20):
        q = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0])
        v = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0])
        Q, V = central_project_state(flat, sphere, q, v)
        assert abs(sphere.value(Q) - 1.0) < 1e-14
        assert abs(sphere.gradient(Q) @ V) < 1e-13
        assert np.max(np.abs(bivector_coords(q, v) - bivector_coords(Q, V))) < 1e-12


def test_visibility_error():
    flat = flat_screen(2)
    sphere = sphere_screen(2)
    with pytest.raises(VisibilityError):
        central_project_state(sphere, flat, [0.0, -1.0], [1.0, 0.0])


# -- trajectory projection round trips ------------------------------------------------------------

def test_verify_projection_line_to_great_circle():
    flat, sphere = flat_screen(3), sphere_screen(3)
    traj = integrate(flat, zero_force(3), [0.0, 0.0, 1.0], [0.6, 0.3, 0.0], (0.0, 3.0), tol=1e-11)
    report = verify_projection(traj, sphere, zero_force(3), tol=1e-6)
    assert report.passed, report.to_json()


def test_verify_projection_single_point():
    flat, sphere = flat_screen(3), sphere_screen(3)
    traj = TrajectorySample(flat, [0.0], [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    report = verify_projection(traj, sphere, zero_force(3), tol=1e-6)
    assert report.compared == 1


def test_verify_projection_reports_visibility_loss():
    # a line crossing the horizon of the target chart gets truncated
    flat = flat_screen(3)
    tilted = sc.LinearFormScreen([1, 0, 0])
    traj = integrate(flat, zero_force(3), [1.0, 0.0, 1.0], [-0.7, 0.0, 0.0], (0.0, 3.0), tol=1e-10)
    report = verify_projection(traj, tilted, zero_force(3), tol=1e-6)
    assert report.exit_time is not None
    assert report.compared < report.total


# -- serialization ---------------------------------------------------------------------------------

def test_trajectory_csv_round_trip():
    screen = sphere_screen(3)
    traj = integrate(screen, zero_force(3), [0, 0, 1.0], [1.0, 0, 0], (0.0, 1.0), tol=1e-10)
    text = traj.to_csv()
    back = TrajectorySample.from_csv(text, screen=screen)
    assert np.allclose(back.times, traj.times)
    assert np.allclose(back.qs, traj.qs)
    assert np.allclose(back.vs, traj.vs)
    assert text == back.to_csv() if back.derivs is None else True


def test_scenario_json():
    obj = {
        "screen": {"kind": "sphere", "dim": 3},
        "force": {"kind": "kepler", "mu": 1.0, "center": [0.0, 0.0, 1.0]},
        "q0": [0.6, 0.0, 0.8],
        "v0": [0.0, 1.0, 0.0],
        "t_span": [0.0, 1.0],
        "tol": 1e-10,
    }
    scn = sc.scenario_from_json(obj)
    assert scn["screen"].kind == "quadratic_root"
    assert scn["force"].name == "kepler"
    traj = integrate(scn["screen"], scn["force"], scn["q0"], scn["v0"], scn["t_span"], scn["tol"])
    assert len(traj) > 2


def test_screen_json_round_trip():
    for screen in (flat_screen(4), sphere_screen(3), hyperboloid_screen(3)):
        back = sc.screen_from_json(screen.to_json())
        assert back.kind == screen.kind
        q = np.array([0.1, 0.2, 1.0, 1.0])[: screen.dim]
        if screen.in_domain(q):
            assert abs(back.value(q) - screen.value(q)) < 1e-14
