"""Annulus pipeline: Laurent calculus, collar glue, Newton solve, radial closed form."""

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rhsolve.annulus import (
    AnnulusSolveOptions,
    glue_construct,
    harmonic_extend_annulus,
    laurent_derivative,
    laurent_evaluate,
    laurent_from_traces,
    laurent_modes,
    laurent_traces,
    make_collar_band,
    pullback_family,
    solve_annulus,
    solve_annulus_radial,
)
from rhsolve.boundary import BoundaryGrid, winding_number
from rhsolve.curves import (
    builtin_circle_family,
    builtin_ellipse_family,
    divisor_transform,
)
from rhsolve.disc import gauge_align
from rhsolve.domains import Annulus, cauchy_extend
from rhsolve.errors import ConfigError, GlueTooCoarse, NotRadialFamily
from rhsolve.pompeiu import AreaCharge
from rhsolve.trig import TrigPolynomial

Q = 0.5


def scaled_circle(base, coeffs):
    # circle family with radius base * exp(trig(theta))
    a = TrigPolynomial(np.asarray(coeffs, dtype=float))
    ap = a.derivative()
    return divisor_transform(
        builtin_circle_family(float(base)),
        lambda th: np.exp(-a(th)) + 0j,
        lambda th: -ap(th) * np.exp(-a(th)) + 0j,
    )


@pytest.fixture(scope="module")
def unit_solution():
    fam = builtin_circle_family(1.0)
    return solve_annulus(fam, fam, (6, 6), Q, AnnulusSolveOptions())


@pytest.fixture(scope="module")
def power_solution():
    outer = builtin_circle_family(1.0)
    inner = builtin_circle_family(Q ** 8)
    return solve_annulus(outer, inner, (8, -8), Q, AnnulusSolveOptions())


# --------------------------------------------------------------------------
# Laurent calculus
# --------------------------------------------------------------------------


def test_laurent_modes_range():
    npt.assert_array_equal(laurent_modes(16), np.arange(-7, 8))


def test_laurent_roundtrip_traces():
    grid = BoundaryGrid(64)
    rng = np.random.default_rng(0)
    modes = laurent_modes(grid.n)
    c = rng.standard_normal(len(modes)) + 1j * rng.standard_normal(len(modes))
    # decay like a function bounded on the closed annulus
    c *= 0.8 ** np.abs(modes) * np.where(modes < 0, Q ** np.abs(modes), 1.0)
    outer, inner = laurent_traces(grid, Q, c)
    back = laurent_from_traces(grid, Q, outer, inner)
    npt.assert_allclose(back, c, rtol=1e-10, atol=1e-15)
    z = np.exp(1j * grid.theta)
    npt.assert_allclose(laurent_evaluate(c, z), outer, atol=1e-12)
    npt.assert_allclose(laurent_evaluate(c, Q * z), inner, atol=1e-12)


def test_laurent_reads_negative_modes_from_inner_circle():
    grid = BoundaryGrid(32)
    q = 0.1
    theta = grid.theta
    # f = z^-5: huge on the inner circle, O(1) coefficient recovered exactly
    outer = np.exp(-5j * theta)
    inner = q ** -5.0 * np.exp(-5j * theta)
    c = laurent_from_traces(grid, q, outer, inner)
    modes = laurent_modes(grid.n)
    expect = np.where(modes == -5, 1.0, 0.0)
    npt.assert_allclose(c, expect, atol=1e-10)


def test_laurent_evaluate_and_derivative_closed_form():
    # f = 3 z^2 + 2/z + 1
    c = np.array([0.0, 2.0, 1.0, 0.0, 3.0], dtype=complex)
    z = np.array([0.5 + 0.2j, -0.7j, 1.1, 0.9 * np.exp(0.4j)])
    npt.assert_allclose(laurent_evaluate(c, z), 3 * z ** 2 + 2 / z + 1, rtol=1e-14)
    npt.assert_allclose(laurent_derivative(c, z), 6 * z - 2 / z ** 2, rtol=1e-13)


@given(
    data=st.lists(
        st.floats(min_value=-1.0, max_value=1.0), min_size=30, max_size=30
    ),
    q=st.floats(min_value=0.25, max_value=0.75),
)
@settings(max_examples=20, deadline=None)
def test_laurent_eval_matches_mode_sum(data, q):
    vals = np.asarray(data)
    c = (vals[:15] + 1j * vals[15:]).astype(complex)
    modes = np.arange(-7, 8)
    c *= 0.7 ** np.abs(modes)
    z = np.sqrt(q) * np.exp(1j * np.linspace(0.1, 6.0, 9))
    direct = sum(c[k + 7] * z ** k for k in range(-7, 8))
    npt.assert_allclose(laurent_evaluate(c, z), direct, atol=1e-12)
    grid = BoundaryGrid(16)
    outer, inner = laurent_traces(grid, q, c)
    back = laurent_from_traces(grid, q, outer, inner)
    npt.assert_allclose(back, c, rtol=1e-9, atol=1e-12)


# --------------------------------------------------------------------------
# collar glue
# --------------------------------------------------------------------------


def test_glue_unit_circles_traces_are_symmetric_pair():
    fam = builtin_circle_family(1.0)
    (t0, t1), report = glue_construct(fam, fam, 6, Q)
    theta = t0.grid.theta
    npt.assert_allclose(
        t0.values, np.exp(6j * theta) + Q ** 6 * np.exp(-6j * theta), atol=5e-15
    )
    npt.assert_allclose(
        t1.values, np.exp(-6j * theta) + Q ** 6 * np.exp(6j * theta), atol=5e-15
    )
    assert report.sigma == 0
    assert report.windings == (6, -6)
    npt.assert_allclose(report.band, (Q ** (2 / 3), Q ** (1 / 3)), rtol=1e-12)


def test_glue_residual_oracle_and_decay():
    # cross terms leave |f|^2 - 1 = 2 q^n cos(2 n theta) + q^2n exactly
    fam = builtin_circle_family(1.0)
    ns = np.arange(4, 13)
    pre = []
    for n in ns:
        _, report = glue_construct(fam, fam, int(n), Q)
        pre.append(report.pre_newton_residual)
        npt.assert_allclose(report.pre_newton_residual, 2 * Q ** n + Q ** (2 * n), rtol=1e-10)
    slope, _ = np.polyfit(ns, np.log(pre), 1)
    fit = np.polyval(np.polyfit(ns, np.log(pre), 1), ns)
    ss_res = np.sum((np.log(pre) - fit) ** 2)
    ss_tot = np.sum((np.log(pre) - np.mean(np.log(pre))) ** 2)
    r_squared = 1.0 - ss_res / ss_tot
    assert slope <= np.log(Q ** (1 / 3)) + 0.1
    assert abs(slope - np.log(Q)) < 0.02
    assert r_squared >= 0.98


def test_glue_area_correction_small_on_boundary_circles():
    # the dbar defect of a cutoff blend integrates to O(q^n) on the circles
    n = 20
    band = make_collar_band(Q)
    grid = BoundaryGrid(256)

    def defect(z):
        s = np.abs(z)
        return band.chi_outer.derivative(s) * (z / (2.0 * s)) * (
            z ** n - (Q / z) ** n
        )

    charge = AreaCharge.from_function(band.s_inner, band.s_outer, grid, defect)
    circle = np.exp(1j * grid.theta)
    u = charge.evaluate(np.concatenate([circle, Q * circle]))
    assert np.max(np.abs(u)) < 1e-5


def test_glue_rejects_coarse_windings():
    fam = builtin_circle_family(1.0)
    with pytest.raises(GlueTooCoarse):
        glue_construct(fam, fam, 1, Q)
    with pytest.raises(GlueTooCoarse):
        solve_annulus(fam, builtin_circle_family(0.4), (5, -3), 0.4)


def test_negative_zero_count_rejected():
    fam = builtin_circle_family(1.0)
    with pytest.raises(ConfigError):
        solve_annulus(fam, fam, (2, -5), Q)
    with pytest.raises(ConfigError):
        glue_construct(fam, fam, -2, Q)


def test_collar_band_partition_of_unity():
    band = make_collar_band(Q)
    npt.assert_allclose((band.s_inner, band.s_outer), (Q ** (2 / 3), Q ** (1 / 3)), rtol=1e-12)
    s = np.linspace(Q, 1.0, 200)
    total = band.chi_outer.value(s) + band.chi_inner.value(s)
    npt.assert_allclose(total, 1.0, atol=1e-12)
    assert band.chi_outer.value(np.array([Q])) == 0.0
    assert band.chi_outer.value(np.array([1.0])) == 1.0


# --------------------------------------------------------------------------
# full solves
# --------------------------------------------------------------------------


def test_unit_circles_solution_modulus_and_windings(unit_solution):
    sol = unit_solution
    assert sol.run.converged
    assert not sol.fallback_used
    assert sol.residual_sup < 1e-10
    npt.assert_allclose(np.abs(sol.outer_trace.values), 1.0, atol=1e-10)
    npt.assert_allclose(np.abs(sol.inner_trace.values), 1.0, atol=1e-10)
    assert winding_number(sol.outer_trace) == 6
    assert winding_number(sol.inner_trace) == -6
    assert sol.winding_inner_coherent == 6
    assert sol.winding_inner_disc == -6


def test_unit_circles_zeros_on_middle_ring(unit_solution):
    zeros = unit_solution.zeros
    assert sum(z.multiplicity for z in zeros) == 12
    assert all(z.multiplicity == 1 for z in zeros)
    radii = np.array([abs(z.position) for z in zeros])
    npt.assert_allclose(radii, np.sqrt(Q), atol=1e-8)
    angles = np.sort(np.angle([z.position for z in zeros]))
    gaps = np.diff(angles)
    npt.assert_allclose(gaps, np.pi / 6, atol=1e-7)


def test_unit_circles_certificate_populated(unit_solution):
    cert = unit_solution.run.certificate
    assert cert is not None
    for value in (cert.omega1, cert.omega2, cert.omega3, cert.product):
        assert np.isfinite(value)
    assert unit_solution.glue.pre_newton_residual == pytest.approx(
        2 * Q ** 6 + Q ** 12, rel=1e-10
    )


def test_cauchy_extension_consistent_with_coefficients(unit_solution):
    sol = unit_solution
    probes = 0.8 * np.exp(1j * np.linspace(0.0, 2 * np.pi, 17)[:-1])
    via_cauchy = cauchy_extend(
        (sol.outer_trace, sol.inner_trace), Annulus(Q), probes
    )
    via_coeffs = laurent_evaluate(sol.coefficients, probes)
    npt.assert_allclose(via_cauchy, via_coeffs, atol=1e-7)


def test_argument_principle_count(unit_solution, power_solution):
    for sol in (unit_solution, power_solution):
        counted = sum(z.multiplicity for z in sol.zeros)
        w0 = winding_number(sol.outer_trace)
        w1_coherent = -winding_number(sol.inner_trace)
        assert counted == w0 + w1_coherent
        assert sol.winding_inner_coherent == -sol.winding_inner_disc


def test_pure_power_matches_radial_closed_form(power_solution):
    sol = power_solution
    assert sol.glue.sigma == 8
    assert sol.run.converged
    radial = solve_annulus_radial(
        builtin_circle_family(1.0), builtin_circle_family(Q ** 8), Q
    )
    for got, want in (
        (sol.outer_trace, radial.outer_trace),
        (sol.inner_trace, radial.inner_trace),
    ):
        aligned = gauge_align(got.values, want.values)
        assert np.max(np.abs(aligned - want.values)) < 1e-7


def test_transformed_circles_match_radial_closed_form():
    q = 0.4
    outer = scaled_circle(1.0, [0.0, 0.12, -0.05, 0.08, 0.02])
    inner = scaled_circle(q ** 3, [0.0, -0.08, 0.03, 0.0, 0.06])
    sol = solve_annulus(outer, inner, (3, -3), q)
    radial = solve_annulus_radial(outer, inner, q)
    assert radial.k1 == 3 and radial.zero is None
    aligned = gauge_align(sol.outer_trace.values, radial.outer_trace.values)
    assert np.max(np.abs(aligned - radial.outer_trace.values)) < 1e-7
    assert sol.residual_sup < 1e-10


def test_mixed_ellipse_circle_converges_to_grid_floor():
    # at this grid the Laurent truncation floor sits near 7e-7, above the
    # default tolerance; the looser tolerance accepts the floor
    ell = builtin_ellipse_family([1.0, 0.04, 0.02], [0.85, -0.03, 0.02], 0.15)
    sol = solve_annulus(
        ell,
        builtin_circle_family(0.3),
        (6, 6),
        0.4,
        AnnulusSolveOptions(tol=5e-6),
    )
    assert sol.run.converged
    assert sol.residual_sup < 5e-6
    assert sum(z.multiplicity for z in sol.zeros) == 12
    assert all(0.4 < abs(z.position) < 1.0 for z in sol.zeros)
    assert sol.run.certificate is not None


# --------------------------------------------------------------------------
# harmonic extension and radial closed form
# --------------------------------------------------------------------------


def test_harmonic_extension_closed_form():
    grid = BoundaryGrid(128)
    q = 0.5

    def u(z):
        g = (1 + 2j) * z ** 3 + (0.3 - 0.1j) * z ** -2.0 + 0.7
        return 2.5 * np.log(np.abs(z)) + g.real

    circle = np.exp(1j * grid.theta)
    ext = harmonic_extend_annulus(grid, q, u(circle), u(q * circle))
    assert ext.c_log == pytest.approx(2.5, abs=1e-12)
    probes = np.array([0.6, 0.8j, -0.55, 0.7 * np.exp(2.1j)])
    npt.assert_allclose(ext.evaluate(probes), u(probes), atol=1e-11)


def test_harmonic_extension_mode_system_oracle():
    # data cos(theta) outer, 0 inner: g1 + g-1 = 1, g1 q + g-1/q = 0
    grid = BoundaryGrid(64)
    q = 0.5
    ext = harmonic_extend_annulus(
        grid, q, np.cos(grid.theta), np.zeros(grid.n)
    )
    k = grid.n // 2 - 1
    assert ext.c_log == pytest.approx(0.0, abs=1e-14)
    assert ext.coeffs[k + 1] == pytest.approx(4.0 / 3.0, abs=1e-12)
    assert ext.coeffs[k - 1] == pytest.approx(-1.0 / 3.0, abs=1e-12)


def test_harmonic_extension_inner_indicator_is_log_quotient():
    grid = BoundaryGrid(64)
    q = 0.5
    ext = harmonic_extend_annulus(grid, q, np.zeros(grid.n), np.ones(grid.n))
    assert ext.c_log == pytest.approx(1.0 / np.log(q), rel=1e-13)
    probes = np.array([0.55, 0.7 * np.exp(1.2j), 0.95j])
    npt.assert_allclose(
        ext.evaluate(probes), np.log(np.abs(probes)) / np.log(q), atol=1e-13
    )


def test_harmonic_extension_stable_at_extreme_modes():
    # naive mode solve would overflow q^-k at these depths
    grid = BoundaryGrid(1024)
    q = 0.04
    d0 = np.cos(grid.theta)
    d1 = np.sin(2 * grid.theta)
    ext = harmonic_extend_annulus(grid, q, d0, d1)
    assert np.all(np.isfinite(ext.coeffs))
    circle = np.exp(1j * grid.theta)
    npt.assert_allclose(ext.evaluate(circle), d0, atol=1e-10)
    npt.assert_allclose(ext.evaluate(q * circle), d1, atol=1e-10)


def test_radial_integer_flux_is_pure_power():
    sol = solve_annulus_radial(
        builtin_circle_family(1.0), builtin_circle_family(0.5), 0.5
    )
    assert sol.k1 == 1
    assert sol.zero is None
    assert sol.flux == pytest.approx(1.0, abs=1e-13)
    assert sol.modulus_error < 1e-13
    theta = sol.grid.theta
    aligned = gauge_align(sol.outer_trace.values, np.exp(1j * theta))
    npt.assert_allclose(aligned, np.exp(1j * theta), atol=1e-12)


def test_radial_half_flux_places_zero_on_real_axis():
    q = 0.5
    sol = solve_annulus_radial(
        builtin_circle_family(1.0), builtin_circle_family(np.sqrt(q)), q
    )
    assert sol.k1 == 0
    assert sol.zero == pytest.approx(2.0 ** -0.5, abs=1e-14)
    assert sol.modulus_error < 1e-8
    assert len(sol.zeros) == 1
    assert sol.zeros[0].position == pytest.approx(2.0 ** -0.5, abs=1e-8)


def test_radial_zero_phase_is_prescribed():
    q = 0.5
    sol = solve_annulus_radial(
        builtin_circle_family(1.0),
        builtin_circle_family(q ** 0.37),
        q,
        zero_phase=1.3,
    )
    assert np.angle(sol.zero) == pytest.approx(1.3, abs=1e-14)
    assert abs(sol.zero) == pytest.approx(q ** 0.37, abs=1e-14)
    assert sol.modulus_error < 1e-9


def test_radial_transformed_profiles_reach_machine_accuracy():
    q = 0.5
    outer = scaled_circle(1.0, [0.0, 0.12, -0.05, 0.08, 0.02])
    inner = scaled_circle(q ** 2, [0.0, -0.08, 0.03, 0.0, 0.06])
    sol = solve_annulus_radial(outer, inner, q)
    assert sol.k1 == 2
    assert sol.zero is None
    assert sol.flux == pytest.approx(2.0, abs=1e-12)
    assert sol.modulus_error < 1e-10


def test_radial_requires_centered_circles():
    ell = builtin_ellipse_family(1.0, 0.8)
    with pytest.raises(NotRadialFamily):
        solve_annulus_radial(ell, builtin_circle_family(0.4), 0.4)


def test_pullback_family_reverses_parameter():
    fam = scaled_circle(1.0, [0.0, 0.3, 0.0, 0.0, 0.1])
    pulled = pullback_family(fam)
    theta = np.linspace(0.0, 2 * np.pi, 11)
    npt.assert_allclose(
        pulled.radial_profile(theta), fam.radial_profile(-theta), rtol=1e-14
    )
    w = 0.9 * np.exp(1j * theta)
    npt.assert_allclose(pulled.rho(theta, w), fam.rho(-theta, w), rtol=1e-14)
    npt.assert_allclose(pulled.d_theta(theta, w), -fam.d_theta(-theta, w), rtol=1e-13)
