"""Disc solver: holomorphic f with boundary values on prescribed curves.

Seeks f holomorphic on the unit disc, with winding number n on the boundary,
such that f(e^{i theta}) lies on the curve gamma_theta for every theta. The
prescribed winding is divided out by the multiplier exp(i n theta), and the
remaining nonvanishing factor is written as exp(g); Newton runs on the
boundary trace of g, where the linearized equation 2 Re(eta k) = r has the
explicit right inverse

    k = 1/2 exp(b~ - i b) (phi + i T phi),   phi = exp(-a - b~) r,

built from the decomposition eta = exp(a + i b), b~ = T b. Every factor of k
is a boundary value of a holomorphic function, so the iteration never leaves
the holomorphic class (up to spectral truncation, which is not projected
away and shows up honestly in the residual).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .boundary import (
    BoundaryGrid,
    BoundaryTrace,
    analytic_completion,
    hilbert_transform,
    holder_norms,
)
from .curves import CurveFamily, EtaDecomposition, builtin_circle_family, divisor_transform, eta_decompose
from .errors import NoConvergence
from .newton import CertifyOptions, IterateOptions, NewtonProblem, NewtonRun, certify, iterate
from .trig import as_trig_polynomial


@dataclass(frozen=True)
class DiscSolveOptions:
    grid_n: int = 256
    tol: float = 1e-10
    max_iter: int = 30
    damping: bool = True
    alpha: float = 0.5
    homotopy: bool = False
    certify: bool = True
    seed: int = 0


@dataclass(frozen=True)
class DiscSolution:
    grid: BoundaryGrid
    winding: int
    f_trace: BoundaryTrace
    g_values: np.ndarray
    residual_sup: float
    run: Optional[NewtonRun] = None


@dataclass(frozen=True)
class LinearRHSystem:
    """Linearization 2 Re(eta k) = rhs of the boundary condition at a trace."""

    grid: BoundaryGrid
    nu: np.ndarray
    eta: EtaDecomposition
    rhs: np.ndarray


def right_inverse_apply(eta: EtaDecomposition, rhs: np.ndarray) -> np.ndarray:
    """Solve 2 Re(eta k) = rhs with k in the holomorphic class."""
    grid = eta.grid
    phi = np.exp(-eta.a - eta.b_tilde) * np.asarray(rhs, dtype=float)
    analytic = analytic_completion(BoundaryTrace(grid, phi)).values
    return 0.5 * np.exp(eta.b_tilde - 1j * eta.b) * analytic


def linearize(family: CurveFamily, trace: BoundaryTrace) -> LinearRHSystem:
    """Newton linear system at a trace: 2 Re(eta k) = -rho along the boundary."""
    theta = trace.grid.theta
    w = trace.values
    dec = eta_decompose(family, trace)
    return LinearRHSystem(
        grid=trace.grid,
        nu=family.d_w(theta, w),
        eta=dec,
        rhs=-np.asarray(family.rho(theta, w), dtype=float),
    )


def _winding_multiplier(winding: int):
    g = lambda theta: np.exp(1j * winding * theta)
    gp = lambda theta: 1j * winding * np.exp(1j * winding * theta)
    return g, gp


def _transformed_family(family: CurveFamily, winding: int) -> CurveFamily:
    if winding == 0:
        return family
    g, gp = _winding_multiplier(winding)
    return divisor_transform(family, g, gp)


def _initial_log_trace(fam_t: CurveFamily, grid: BoundaryGrid) -> np.ndarray:
    # radius guess along the ray the solution would follow if its phase were
    # exactly the prescribed winding; exact for centered-circle families
    u = np.log(fam_t.ray_radius(grid.theta, np.zeros(grid.n)))
    return analytic_completion(BoundaryTrace(grid, u)).values


def _band_limited_sampler(grid: BoundaryGrid, complex_valued: bool):
    theta = grid.theta
    modes = np.arange(1, 9)

    def sample(rng):
        c0 = rng.standard_normal()
        a = rng.standard_normal(len(modes)) / (1.0 + modes) ** 2
        b = rng.standard_normal(len(modes)) / (1.0 + modes) ** 2
        u = c0 + a @ np.cos(np.outer(modes, theta)) + b @ np.sin(np.outer(modes, theta))
        if not complex_valued:
            return u
        v = sample_imag(rng)
        return u + 1j * v

    def sample_imag(rng):
        c0 = rng.standard_normal()
        a = rng.standard_normal(len(modes)) / (1.0 + modes) ** 2
        b = rng.standard_normal(len(modes)) / (1.0 + modes) ** 2
        return c0 + a @ np.cos(np.outer(modes, theta)) + b @ np.sin(np.outer(modes, theta))

    return sample


def _sup(v) -> float:
    return float(np.max(np.abs(v)))


def _holder_residual_norm(grid: BoundaryGrid, alpha: float):
    def norm(r):
        rep = holder_norms(BoundaryTrace(grid, np.asarray(r, dtype=complex)), alpha)
        return rep.sup_norm + rep.c_alpha

    return norm


def _holder_iterate_norm(grid: BoundaryGrid, alpha: float):
    def norm(d):
        return holder_norms(BoundaryTrace(grid, np.asarray(d, dtype=complex)), alpha).c1_alpha

    return norm


def _g_space_problem(fam_t: CurveFamily, grid: BoundaryGrid, alpha: float) -> NewtonProblem:
    theta = grid.theta

    def residual(g):
        return np.asarray(fam_t.rho(theta, np.exp(g)), dtype=float)

    def right_inverse(g):
        dec = eta_decompose(fam_t, BoundaryTrace(grid, np.exp(g)))
        return lambda r: right_inverse_apply(dec, r)

    def derivative_action(g, d):
        h = np.exp(g)
        eta = h * np.conj(fam_t.dbar_w(theta, h))
        return 2.0 * (eta * d).real

    return NewtonProblem(
        residual=residual,
        right_inverse=right_inverse,
        iterate_norm=_sup,
        residual_norm=_sup,
        derivative_action=derivative_action,
        iterate_sampler=_band_limited_sampler(grid, complex_valued=True),
        residual_sampler=_band_limited_sampler(grid, complex_valued=False),
        certify_iterate_norm=_holder_iterate_norm(grid, alpha),
        certify_residual_norm=_holder_residual_norm(grid, alpha),
    )


def _finish(family: CurveFamily, winding: int, grid: BoundaryGrid, g, run) -> DiscSolution:
    f_vals = np.exp(1j * winding * grid.theta) * np.exp(g)
    f_trace = BoundaryTrace(grid, f_vals)
    residual_sup = _sup(family.rho(grid.theta, f_vals))
    return DiscSolution(
        grid=grid,
        winding=winding,
        f_trace=f_trace,
        g_values=np.asarray(g, dtype=complex),
        residual_sup=residual_sup,
        run=run,
    )


def solve_disc(family: CurveFamily, winding: int, options: DiscSolveOptions = DiscSolveOptions()) -> DiscSolution:
    """Solve the disc problem with the prescribed boundary winding.

    With homotopy enabled, a failed direct solve is retried along a linear
    blend from a fitted circle family to the target, warm-starting each stage.
    """
    if winding < 0:
        raise ValueError("a holomorphic solution cannot have negative boundary winding")
    grid = BoundaryGrid(options.grid_n)
    fam_t = _transformed_family(family, winding)
    problem = _g_space_problem(fam_t, grid, options.alpha)
    g0 = _initial_log_trace(fam_t, grid)
    it_opts = IterateOptions(tol=options.tol, max_iter=options.max_iter, allow_damping=options.damping)
    cert = certify(problem, g0, CertifyOptions(seed=options.seed)) if options.certify else None
    try:
        run = iterate(problem, g0, it_opts, certificate=cert)
    except NoConvergence:
        if not options.homotopy:
            raise
        run = _homotopy_run(family, winding, grid, options)
    return _finish(family, winding, grid, run.x, run)


def _blend_families(circle: CurveFamily, target: CurveFamily, t: float) -> CurveFamily:
    mix = lambda fa, fb: (lambda theta, w: (1.0 - t) * fa(theta, w) + t * fb(theta, w))
    return CurveFamily(
        rho=mix(circle.rho, target.rho),
        d_w=mix(circle.d_w, target.d_w),
        dbar_w=mix(circle.dbar_w, target.dbar_w),
        d_theta=mix(circle.d_theta, target.d_theta),
        ray_radius=circle.ray_radius,  # only used to seed the t = 0 stage
        label="blend",
    )


def _homotopy_run(family: CurveFamily, winding: int, grid: BoundaryGrid, options: DiscSolveOptions):
    theta = grid.theta
    r_bar = float(np.mean(family.ray_radius(theta, winding * theta)))
    circle = builtin_circle_family(as_trig_polynomial(r_bar))
    g = _initial_log_trace(_transformed_family(circle, winding), grid)
    it_opts = IterateOptions(tol=options.tol, max_iter=options.max_iter, allow_damping=options.damping)
    run = None
    for t in (0.25, 0.5, 0.75, 1.0):
        blend = _blend_families(circle, family, t)
        problem = _g_space_problem(_transformed_family(blend, winding), grid, options.alpha)
        run = iterate(problem, g, it_opts)
        g = run.x
    return run


def solve_disc_circle_closed_form(radius, winding: int, grid_n: int = 256) -> DiscSolution:
    """Exact solution for centered-circle families |f| = R(theta).

    log |f| on the boundary is forced to log R, so g = log R + i T log R and
    f = exp(i n theta) exp(g); this equals the Newton initializer, which is
    why circle problems converge with zero iterations.
    """
    R = as_trig_polynomial(radius)
    family = builtin_circle_family(R)
    grid = BoundaryGrid(grid_n)
    u = np.log(R(grid.theta))
    g = analytic_completion(BoundaryTrace(grid, u)).values
    return _finish(family, winding, grid, g, None)


@dataclass(frozen=True)
class StepDiagnostics:
    step_norm: float
    predicted_residual: float
    actual_residual: float


def newton_step_diagnostics(
    family: CurveFamily, winding: int, g_values: np.ndarray, grid: BoundaryGrid, damping: float = 1.0
) -> StepDiagnostics:
    """One Newton step from g, reported in the f-scale.

    predicted_residual is the linear-model value (1 - damping) * ||rho||; the
    gap between actual and predicted measures the quadratic remainder.
    """
    theta = grid.theta
    fam_t = _transformed_family(family, winding)
    h = np.exp(g_values)
    dec = eta_decompose(fam_t, BoundaryTrace(grid, h))
    r = np.asarray(fam_t.rho(theta, h), dtype=float)
    k = right_inverse_apply(dec, r)
    f = np.exp(1j * winding * theta) * h
    step_norm = _sup(damping * f * k)
    predicted = _sup(r - damping * 2.0 * (dec.eta.values * k).real)
    actual = _sup(fam_t.rho(theta, h * np.exp(-damping * k)))
    return StepDiagnostics(step_norm=step_norm, predicted_residual=predicted, actual_residual=actual)


def gauge_align(values: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Rotate values by the unit phase that best matches the reference.

    Circle families are rotation invariant, so solutions are defined up to a
    global phase; comparisons go through this alignment.
    """
    inner = np.sum(np.conj(values) * reference)
    if inner == 0:
        return values
    return values * (inner / abs(inner))
