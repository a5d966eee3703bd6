"""Flux identity, harmonic measures, surjectivity demo, zero selection."""

import numpy as np
import numpy.testing as npt
import pytest

from rhsolve.analysis import (
    check_identity,
    harmonic_measure,
    minimal_zero_selector,
    surjectivity_demo,
)
from rhsolve.annulus import AnnulusSolveOptions, solve_annulus, solve_annulus_radial
from rhsolve.curves import builtin_circle_family, builtin_ellipse_family, divisor_transform
from rhsolve.errors import ConfigError, NotRadialFamily
from rhsolve.trig import TrigPolynomial


def scaled_circle(base, coeffs):
    a = TrigPolynomial(np.asarray(coeffs, dtype=float))
    ap = a.derivative()
    return divisor_transform(
        builtin_circle_family(float(base)),
        lambda th: np.exp(-a(th)) + 0j,
        lambda th: -ap(th) * np.exp(-a(th)) + 0j,
    )


def random_zero_mean_trig(rng, degree=4, size=0.12):
    coeffs = np.zeros(2 * degree + 1)
    coeffs[1:] = size * rng.standard_normal(2 * degree) / np.arange(1, 2 * degree + 1)
    return coeffs


# --------------------------------------------------------------------------
# harmonic measure and zero selection
# --------------------------------------------------------------------------


def test_harmonic_measure_boundary_values():
    q = 0.5
    h1 = harmonic_measure(q, 1)
    h0 = harmonic_measure(q, 0)
    npt.assert_allclose(h1(np.array([q, 1.0])), [1.0, 0.0], atol=1e-14)
    npt.assert_allclose(h0(np.array([q, 1.0])), [0.0, 1.0], atol=1e-14)
    assert h1(np.sqrt(q)) == pytest.approx(0.5, abs=1e-14)
    ring = 0.7 * np.exp(1j * np.linspace(0, 6, 7))
    npt.assert_allclose(h0(ring) + h1(ring), 1.0, atol=1e-14)


def test_harmonic_measure_rejects_bad_arguments():
    with pytest.raises(ConfigError):
        harmonic_measure(1.5, 1)
    with pytest.raises(ConfigError):
        harmonic_measure(0.5, 2)
    with pytest.raises(ConfigError):
        harmonic_measure(0.5, 1)(0.0)


def test_minimal_zero_selector_cases():
    assert minimal_zero_selector(2.0) == (2, None)
    k1, t = minimal_zero_selector(0.5)
    assert k1 == 0 and t == pytest.approx(0.5)
    k1, t = minimal_zero_selector(-0.25)
    assert k1 == -1 and t == pytest.approx(0.75)


def test_minimal_zero_selector_snaps_near_integers():
    assert minimal_zero_selector(1.0 - 1e-13) == (1, None)
    assert minimal_zero_selector(3.0 + 1e-13) == (3, None)
    k1, t = minimal_zero_selector(0.999999)
    assert k1 == 0 and t == pytest.approx(0.999999)


# --------------------------------------------------------------------------
# identity check
# --------------------------------------------------------------------------


def test_identity_on_radial_solution_both_data_paths():
    q = 0.5
    outer = scaled_circle(1.0, [0.0, 0.12, -0.05, 0.08, 0.02])
    inner = scaled_circle(q ** 0.37, [0.0, -0.08, 0.03, 0.0, 0.06])
    sol = solve_annulus_radial(outer, inner, q)
    from_traces = check_identity(sol)
    from_families = check_identity(sol, outer, inner)
    for report in (from_traces, from_families):
        assert report.diff < 1e-10
        assert report.k1 == 0
        assert report.k1_coherent == 0
        assert len(report.zeros_used) == 1
        assert report.h1_values[0] == pytest.approx(0.37, abs=1e-8)
    assert from_traces.lhs == pytest.approx(0.37, abs=1e-10)


def test_identity_on_glued_many_zero_solution():
    fam = builtin_circle_family(1.0)
    sol = solve_annulus(fam, fam, (6, 6), 0.5, AnnulusSolveOptions())
    report = check_identity(sol)
    # twelve zeros at the middle ring balance the winding debt exactly
    assert report.k1 == -6
    assert report.k1_coherent == 6
    assert len(report.zeros_used) == 12
    npt.assert_allclose(report.h1_values, 0.5, atol=1e-7)
    assert report.lhs == pytest.approx(0.0, abs=1e-10)
    assert report.diff < 1e-6


def test_identity_requires_family_pair():
    sol = solve_annulus_radial(
        builtin_circle_family(1.0), builtin_circle_family(0.5), 0.5
    )
    with pytest.raises(ConfigError):
        check_identity(sol, builtin_circle_family(1.0), None)


def test_identity_rejects_noncircular_families():
    sol = solve_annulus_radial(
        builtin_circle_family(1.0), builtin_circle_family(0.5), 0.5
    )
    with pytest.raises(NotRadialFamily):
        check_identity(sol, builtin_ellipse_family(1.0, 0.8), builtin_circle_family(0.5))


def test_identity_requires_located_zeros():
    q = 0.5
    sol = solve_annulus_radial(
        builtin_circle_family(1.0),
        builtin_circle_family(q ** 0.5),
        q,
        locate=False,
    )
    with pytest.raises(ConfigError):
        check_identity(sol)


def test_identity_random_radial_pairs():
    rng = np.random.default_rng(7)
    for q in (0.25, 0.5):
        for _ in range(10):
            # fractional parts stay off the circles so the fixed grid
            # resolves log|z - z1|; integer fluxes exercise the no-zero path
            base = int(rng.integers(-1, 2))
            exponent = base + (0.0 if rng.random() < 0.25 else rng.uniform(0.1, 0.9))
            outer = scaled_circle(1.0, random_zero_mean_trig(rng))
            inner = scaled_circle(q ** exponent, random_zero_mean_trig(rng))
            sol = solve_annulus_radial(outer, inner, q, grid_n=512)
            report = check_identity(sol)
            assert report.diff < 1e-6
            assert sol.modulus_error < 1e-8
            k1, t = minimal_zero_selector(exponent)
            assert report.k1 == k1
            if t is None:
                assert not report.zeros_used
            else:
                assert abs(sol.zeros[0].position) == pytest.approx(q ** t, abs=1e-8)


# --------------------------------------------------------------------------
# surjectivity demonstration
# --------------------------------------------------------------------------


def test_surjectivity_targets_realized():
    targets = [i / 10 for i in range(10)]
    cases = surjectivity_demo(targets, 0.5)
    assert len(cases) == 10
    for case in cases:
        assert case.deviation < 1e-6
        assert case.zero_count <= 1
        assert case.k1 == 0
        assert case.modulus_error < 1e-5
    assert cases[0].zero_count == 0
    assert cases[5].realized == pytest.approx(0.5, abs=1e-8)


def test_surjectivity_rejects_bad_inputs():
    with pytest.raises(ConfigError):
        surjectivity_demo([0.2], 1.2)
    with pytest.raises(ConfigError):
        surjectivity_demo([1.2], 0.5)
