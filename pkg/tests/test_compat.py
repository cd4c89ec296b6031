"""Pre-Lagrangians, compatibility identities, and the screen finder."""

import random
from fractions import Fraction

import numpy as np
import pytest

from projdyn import screens as sc
from projdyn.compat import (
    LagrangeResidualError,
    SecondOrderSystem,
    compatibility_check,
    compatibility_on_tangent_pairs,
    compatibility_repeated_argument,
    energy_integral,
    find_compatible_screen,
    hamiltonian_test,
    lagrange_residuals,
    parallel_transport_check,
    presymplectic_check,
    quotient_form,
    xvar,
    yvar,
)
from projdyn.curvclass import (
    CurvatureForm,
    KernelNotTrivialError,
    flat_form_tensor,
    metric_form_tensor,
)
from projdyn.exactlin import kernel, same_subspace
from projdyn.polynomials import Poly
from projdyn.polyintegrals import ScreenIntegral, qvar, vvar


def euclid_metric(d):
    return [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]


# -- energy of a pre-Lagrangian ----------------------------------------------------

def test_oscillator_pre_lagrangians_and_energy():
    for n in (2, 3):
        Z = SecondOrderSystem.oscillator(n)
        for i in range(n):
            for j in range(i, n):
                L = yvar(i, n) * yvar(j, n) - xvar(i, n) * xvar(j, n)
                assert all(r.is_zero() for r in lagrange_residuals(L, Z))
                E = energy_integral(L, Z)
                assert E == yvar(i, n) * yvar(j, n) + xvar(i, n) * xvar(j, n)
                assert Z.time_derivative(E).is_zero()


def test_closed_one_form_gives_zero_energy():
    n = 2
    Z = SecondOrderSystem.oscillator(n)
    # eta = d(x0 x1): closed, so L = <eta, y> is a pre-Lagrangian for anything
    L = xvar(1, n) * yvar(0, n) + xvar(0, n) * yvar(1, n)
    assert energy_integral(L, Z).is_zero()


def test_flat_kinetic_energy():
    n = 2
    Zf = SecondOrderSystem.free(n)
    L = (yvar(0, n) ** 2 + yvar(1, n) ** 2).scale(Fraction(1, 2))
    assert energy_integral(L, Zf) == L


def test_energy_rejects_non_pre_lagrangian():
    n = 2
    Z = SecondOrderSystem.oscillator(n)
    with pytest.raises(LagrangeResidualError):
        energy_integral(xvar(0, n) * yvar(1, n), Z)


# -- presymplectic check --------------------------------------------------------------

def test_presymplectic_free_kinetic():
    n = 2
    ok, U = presymplectic_check(
        (yvar(0, n) ** 2 + yvar(1, n) ** 2).scale(Fraction(1, 2)), SecondOrderSystem.free(n)
    )
    assert ok and U.is_zero()


def test_presymplectic_recovers_oscillator_potential():
    n = 2
    Z = SecondOrderSystem.oscillator(n)
    T = (yvar(0, n) ** 2 + yvar(1, n) ** 2).scale(Fraction(1, 2))
    ok, U = presymplectic_check(T, Z)
    assert ok
    assert U == (xvar(0, n) ** 2 + xvar(1, n) ** 2).scale(Fraction(-1, 2))
    assert all(r.is_zero() for r in lagrange_residuals(T + U, Z))


def test_presymplectic_rejects_velocity_dependent_sigma():
    # x0 * y1 on free motion: sigma_1 = y0, velocity dependent
    n = 2
    ok, U = presymplectic_check(xvar(0, n) * yvar(1, n), SecondOrderSystem.free(n))
    assert not ok and U is None


def test_presymplectic_polynomial_force_with_potential():
    # cubic restoring force: F_i = -x_i^3; T + U with U = -sum x_i^4/4
    n = 2
    Z = SecondOrderSystem(n, [-(xvar(i, n) ** 3) for i in range(n)])
    T = (yvar(0, n) ** 2 + yvar(1, n) ** 2).scale(Fraction(1, 2))
    ok, U = presymplectic_check(T, Z)
    assert ok
    assert U == (xvar(0, n) ** 4 + xvar(1, n) ** 4).scale(Fraction(-1, 4))


# -- compatibility identities ---------------------------------------------------------------

def test_euclid_form_compatible_with_sphere():
    form = CurvatureForm(metric_form_tensor(euclid_metric(3)))
    assert compatibility_check(form, sc.sphere_screen(3))


def test_euclid_form_incompatible_with_flat_and_tilted_quadrics():
    form = CurvatureForm(metric_form_tensor(euclid_metric(3)))
    assert not compatibility_check(form, sc.flat_screen(3))
    assert not compatibility_check(form, sc.QuadraticRootScreen([[2, 0, 0], [0, 1, 0], [0, 0, 1]]))


def test_flat_form_compatible_with_its_hyperplane():
    phi = [Fraction(0), Fraction(0), Fraction(1)]
    g = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    form = CurvatureForm(flat_form_tensor(phi, g, kernel([phi])))
    assert compatibility_check(form, sc.flat_screen(3))
    assert not compatibility_check(form, sc.sphere_screen(3))


def test_custom_screen_sampled_compatibility():
    # the sphere rebuilt as a custom screen: sampled check agrees with exact
    form = CurvatureForm(metric_form_tensor(euclid_metric(3)))
    custom_sphere = sc.CustomScreen(
        3,
        h=lambda q: float(np.linalg.norm(q)),
        grad=lambda q: q / np.linalg.norm(q),
        hess=lambda q: np.eye(3) / np.linalg.norm(q)
        - np.outer(q, q) / np.linalg.norm(q) ** 3,
        domain=lambda q: bool(q @ q > 0),
    )
    rng = np.random.default_rng(5)
    samples = []
    for _ in range(8):
        q = rng.standard_normal(3)
        samples.append(q / np.linalg.norm(q))
    assert compatibility_check(form, custom_sphere, samples=samples)
    # a generic non-quadric custom screen fails at sampled points
    wonky = sc.CustomScreen(
        3,
        h=lambda q: float((q @ q) ** 2 / np.linalg.norm(q) ** 3 + 0.5 * q[2]),
        grad=lambda q: (
            4 * q * (q @ q) / np.linalg.norm(q) ** 3
            - 3 * (q @ q) ** 2 * q / np.linalg.norm(q) ** 5
            + 0.5 * np.array([0.0, 0.0, 1.0])
        ),
        hess=lambda q: np.zeros((3, 3)),
        domain=lambda q: bool(q @ q > 0),
    )
    wq = []
    for _ in range(8):
        q = rng.standard_normal(3) + np.array([0, 0, 2.0])
        wq.append(q / wonky.value(q))
    assert not compatibility_check(form, wonky, samples=wq)


def test_three_compatibility_formulations_agree():
    phi = [Fraction(1), Fraction(0), Fraction(0), Fraction(0)]
    g = [
        [Fraction(1), Fraction(0), Fraction(0)],
        [Fraction(0), Fraction(2), Fraction(1)],
        [Fraction(0), Fraction(1), Fraction(-1)],
    ]
    good = CurvatureForm(flat_form_tensor(phi, g, kernel([phi])))
    screen = sc.LinearFormScreen(phi)
    assert compatibility_check(good, screen)
    assert compatibility_on_tangent_pairs(good, phi)
    assert compatibility_repeated_argument(good, phi)
    bad = CurvatureForm(metric_form_tensor(euclid_metric(4)))
    assert not compatibility_check(bad, screen)
    assert not compatibility_on_tangent_pairs(bad, phi)
    assert not compatibility_repeated_argument(bad, phi)


# -- quotient reduction ------------------------------------------------------------------------

def test_quotient_trivial_kernel_is_identity():
    form = CurvatureForm(metric_form_tensor(euclid_metric(3)))
    ker, inner, complement = quotient_form(form)
    assert ker == [] and complement == [0, 1, 2]
    assert inner.tensor == form.tensor


def test_quotient_degenerate_metric():
    form = CurvatureForm(metric_form_tensor([[1, 0, 0], [0, 1, 0], [0, 0, 0]]))
    ker, inner, complement = quotient_form(form)
    assert same_subspace(ker, [[0, 0, 1]])
    assert complement == [0, 1]
    assert inner.dim == 2
    assert inner.tensor == metric_form_tensor([[1, 0], [0, 1]])
    assert not inner.kernel()


def test_quotient_rejects_zero_form():
    from projdyn.exactlin import Tensor

    with pytest.raises(ValueError):
        quotient_form(CurvatureForm(Tensor(3, 4, {})))


def test_quotient_compatibility_equivalence():
    # compatibility of the reduced pair matches the cylindric pair upstairs
    form = CurvatureForm(metric_form_tensor([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]]))
    ker, inner, complement = quotient_form(form)
    # the cylinder over the unit sphere of the first three coordinates
    cyl = sc.QuadraticRootScreen([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]])
    assert compatibility_check(form, cyl)
    assert compatibility_check(inner, sc.sphere_screen(3))
    assert not compatibility_check(form, sc.sphere_screen(4))


# -- the screen finder ---------------------------------------------------------------------------

def test_find_screen_metric_case():
    form = CurvatureForm(metric_form_tensor(euclid_metric(3)))
    rep = find_compatible_screen(form)
    assert rep.verdict == "quadric"
    assert rep.witnesses["g"] == euclid_metric(3)
    assert rep.witnesses["lambda"] == 1


def test_find_screen_flat_case():
    phi = [Fraction(0), Fraction(0), Fraction(1)]
    g = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    form = CurvatureForm(flat_form_tensor(phi, g, kernel([phi])))
    rep = find_compatible_screen(form)
    assert rep.verdict == "hyperplane"
    assert rep.witnesses["phi"] == phi
    assert rep.witnesses["g"] == g


def test_find_screen_incompatible_when_images_not_decomposable():
    rng = random.Random(0)
    while True:
        a = metric_form_tensor([[2, 1, 0, 0], [1, 3, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        b = metric_form_tensor([[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 2, 0], [1, 0, 0, 1]])
        form = CurvatureForm(a + b)
        if not form.satisfies_decomposability() and not form.kernel():
            break
    rep = find_compatible_screen(form)
    assert rep.verdict == "incompatible"
    assert rep.witnesses["reason"] == "decomposability_failed"


def test_find_screen_requires_trivial_kernel():
    form = CurvatureForm(metric_form_tensor([[1, 0, 0], [0, 1, 0], [0, 0, 0]]))
    with pytest.raises(KernelNotTrivialError):
        find_compatible_screen(form)


# -- the end-to-end hamiltonian test ----------------------------------------------------------------

def kinetic_poly(d, chart):
    out = Poly.zero(2 * d)
    for i in chart:
        out = out + vvar(i, d) * vvar(i, d)
    return out.scale(Fraction(1, 2))


def test_hamiltonian_test_spherical_kinetic():
    rep = hamiltonian_test(ScreenIntegral(sc.sphere_screen(3), kinetic_poly(3, [0, 1, 2])))
    assert rep.verdict == "quadric"
    assert rep.witnesses["g"] == euclid_metric(3)
    assert rep.witnesses["lambda"] == Fraction(1, 2)


def test_hamiltonian_test_flat_kinetic():
    rep = hamiltonian_test(ScreenIntegral(sc.flat_screen(3), kinetic_poly(3, [0, 1])))
    assert rep.verdict == "hyperplane"
    assert rep.witnesses["phi"] == [0, 0, 1]
    assert rep.witnesses["g"] == [[Fraction(1, 2), 0], [0, Fraction(1, 2)]]


def test_hamiltonian_test_oscillator():
    rep = hamiltonian_test(ScreenIntegral(sc.flat_screen(3), vvar(0, 3) * vvar(1, 3)))
    assert rep.verdict == "hyperplane"
    assert rep.witnesses["phi"] == [0, 0, 1]
    assert rep.witnesses["g"] == [[0, Fraction(1, 2)], [Fraction(1, 2), 0]]
    # g is the polarization of g(v) = v0 v1
    assert rep.witnesses["g"][0][1] + rep.witnesses["g"][1][0] == 1


def test_hamiltonian_test_change_of_screen():
    # a spherical-type kinetic term presented on the flat screen lands on the quadric
    x0, x1 = qvar(0, 3), qvar(1, 3)
    w0, w1 = vvar(0, 3), vvar(1, 3)
    T = (x0 * w1 - x1 * w0) ** 2 + w0 ** 2 + w1 ** 2
    rep = hamiltonian_test(ScreenIntegral(sc.flat_screen(3), T))
    assert rep.verdict == "quadric"
    assert rep.witnesses["g"] == euclid_metric(3)


def test_hamiltonian_test_rejects_non_integral():
    T = qvar(0, 3) * vvar(0, 3) * vvar(1, 3)
    rep = hamiltonian_test(ScreenIntegral(sc.flat_screen(3), T))
    assert rep.verdict == "incompatible"
    assert rep.witnesses["reason"] == "leading_term_not_free_integral"


def test_hamiltonian_test_cylindric_reduction():
    rep = hamiltonian_test(ScreenIntegral(sc.flat_screen(4), vvar(0, 4) * vvar(1, 4)))
    assert rep.verdict == "cylindric"
    assert same_subspace(rep.kernel_basis, [[0, 0, 1, 0]])
    assert rep.inner.verdict == "hyperplane"
    assert rep.inner.witnesses["g"] == [[0, Fraction(1, 2)], [Fraction(1, 2), 0]]


def test_hamiltonian_test_incompatible_pbb_element():
    # a generic biquadratic impulsion polynomial fails the decomposability
    # condition in ambient dimension 4
    rng = random.Random(1)
    from projdyn.polyintegrals import impulsion_poly_basis

    while True:
        T = Poly.zero(8)
        for p in impulsion_poly_basis(4, 2):
            T = T + p.scale(Fraction(rng.randint(-3, 3)))
        # restrict to the flat screen q3 = 1, v3 = 0 to get screen-level data
        images = [qvar(i, 4) for i in range(3)] + [Poly.const(8, 1)]
        images += [vvar(i, 4) for i in range(3)] + [Poly.zero(8)]
        T_screen = T.substitute(images)
        rep = hamiltonian_test(ScreenIntegral(sc.flat_screen(4), T_screen))
        if rep.verdict == "incompatible" and rep.witnesses.get("reason") == "decomposability_failed":
            break
        assert rep.verdict in ("quadric", "hyperplane", "cylindric", "incompatible")


def test_report_json_and_screen_materialization():
    rep = hamiltonian_test(ScreenIntegral(sc.sphere_screen(3), kinetic_poly(3, [0, 1, 2])))
    obj = rep.to_json()
    assert obj["verdict"] == "quadric"
    assert obj["witnesses"]["g"][0] == ["1/1", "0/1", "0/1"]
    screen = rep.screen()
    assert screen.kind == "quadratic_root"
    assert abs(screen.value([0.0, 0.0, 1.0]) - 1.0) < 1e-15


def test_kernel_orthogonality_on_cylindric_screens():
    # every kernel vector is annihilated by the cylindric screen differential
    form = CurvatureForm(metric_form_tensor([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]]))
    ker, inner, complement = quotient_form(form)
    cyl = sc.QuadraticRootScreen([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]])
    rng = np.random.default_rng(7)
    for _ in range(10):
        q = rng.standard_normal(4)
        q[3] = rng.standard_normal()
        q = q / cyl.value(q)
        dh = cyl.gradient(q)
        for k in ker:
            assert abs(dh @ np.array([float(x) for x in k])) < 1e-12


def test_parallel_transport_invariance_on_found_screens():
    # along free motion on the reported screen, the quadratic value of a
    # parallel-transported tangent vector stays constant
    rep = hamiltonian_test(ScreenIntegral(sc.sphere_screen(3), kinetic_poly(3, [0, 1, 2])))
    form_poly = None
    screen = rep.screen()
    from projdyn.curvclass import metric_form_tensor as mft
    from projdyn.curvclass import CurvatureForm as CF

    lam = rep.witnesses["lambda"]
    form = CF(mft(rep.witnesses["g"]).scale(lam))
    drift = parallel_transport_check(
        form, screen,
        q0=[0.0, 0.0, 1.0], v0=[1.0, 0.0, 0.0], w0=[0.3, 0.9, 0.0],
        t_span=(0.0, 3.0),
    )
    assert drift < 1e-9


def test_quadratic_integral_symbolic_and_pipeline():
    from projdyn.compat import QuadraticIntegral

    n = 2
    Z = SecondOrderSystem.oscillator(n)
    T = yvar(0, n) * yvar(1, n)
    U = -(xvar(0, n) * xvar(1, n))
    qi = QuadraticIntegral(sc.flat_screen(3), T, U, system=Z)
    assert Z.time_derivative(qi.G).is_zero()
    rep = qi.hamiltonian_test()
    assert rep.verdict == "hyperplane"
    assert rep.witnesses["g"] == [[0, Fraction(1, 2)], [Fraction(1, 2), 0]]


def test_quadratic_integral_rejects_fake():
    from projdyn.compat import QuadraticIntegral

    n = 2
    Z = SecondOrderSystem.oscillator(n)
    with pytest.raises(ValueError):
        QuadraticIntegral(sc.flat_screen(3), yvar(0, n) * yvar(1, n), Poly.zero(4), system=Z)


def test_quadratic_integral_numeric_validation():
    from projdyn.compat import QuadraticIntegral
    from projdyn.polyintegrals import vvar as ambient_v

    flat = sc.flat_screen(3)
    T = (ambient_v(0, 3) ** 2 + ambient_v(1, 3) ** 2).scale(Fraction(1, 2))
    qi = QuadraticIntegral(flat, T, Poly.zero(6), force=sc.zero_force(3),
                           probe=([0.1, 0.2, 1.0], [0.5, -0.3, 0.0], (0.0, 2.0)))
    assert qi.hamiltonian_test().verdict == "hyperplane"


def test_presymplectic_numeric_path():
    # callable integral data falls back to finite differences at samples
    n = 2
    Z = SecondOrderSystem.oscillator(n)

    def G_good(x, y):
        return 0.5 * float(y @ y)

    def G_bad(x, y):
        return float(x[0] * y[1])

    samples = [(np.array([0.3, -0.2]), np.array([0.5, 0.7])),
               (np.array([-1.0, 0.4]), np.array([0.2, -0.3]))]
    ok, U = presymplectic_check(G_good, Z, samples=samples)
    assert ok and U is None
    ok, _ = presymplectic_check(G_bad, Z, samples=samples)
    assert not ok
