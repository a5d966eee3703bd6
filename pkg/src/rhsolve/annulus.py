"""Holomorphic boundary-value solver on the annulus q < |z| < 1.

Each boundary condition is first solved as a disc problem in its own
collar, the inner one after the orientation-reversing pullback
zeta -> q / zeta. The two collar pieces are combined into one Laurent
iterate (telescoping: each piece is exponentially small at the other
boundary once the windings are balanced by a monomial twist). Newton
iteration on the Laurent coefficients then removes the gluing error.

The linearized equations are solved by the collar right inverse: the
per-boundary explicit inverses are blended with radial cutoffs across
the transition band and repaired to an honest holomorphic function with
the area transform. A Neumann series absorbs the remaining coupling; if
it stalls, a dense least-squares solve takes over and is flagged.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .boundary import BoundaryGrid, BoundaryTrace, holder_norms, winding_number
from .curves import CurveFamily, divisor_transform, eta_decompose
from .disc import DiscSolveOptions, right_inverse_apply, solve_disc
from .domains import Annulus, locate_zeros
from .errors import (
    ConfigError,
    GlueTooCoarse,
    CountMismatch,
    ModeConditioning,
    NeumannDiverges,
)
from .newton import (
    CertifyOptions,
    IterateOptions,
    NewtonProblem,
    NewtonRun,
    certify,
    iterate,
)
from .pompeiu import AreaCharge, RadialCutoff, radial_quadrature

_polyval = np.polynomial.polynomial.polyval


# --------------------------------------------------------------------------
# collar geometry
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CollarBand:
    """Transition band q^{2/3} < |z| < q^{1/3} with its partition of unity.

    chi_outer rises to 1 at the outer edge, chi_inner = 1 - chi_outer.
    The exponents balance the two collar divisors: a piece with winding n
    at its own boundary is of size q^{n/3} at the far edge of the band.
    """

    q: float
    s_inner: float
    s_outer: float
    chi_outer: RadialCutoff
    chi_inner: RadialCutoff


def make_collar_band(q: float) -> CollarBand:
    if not 0.0 < q < 1.0:
        raise ConfigError(f"annulus modulus must lie in (0, 1), got {q}")
    s_inner = q ** (2.0 / 3.0)
    s_outer = q ** (1.0 / 3.0)
    return CollarBand(
        q=q,
        s_inner=s_inner,
        s_outer=s_outer,
        chi_outer=RadialCutoff(s_inner, s_outer, rising=True),
        chi_inner=RadialCutoff(s_inner, s_outer, rising=False),
    )


# --------------------------------------------------------------------------
# Laurent fields on the annulus
# --------------------------------------------------------------------------


def laurent_modes(n: int) -> np.ndarray:
    """Modes -K..K carried by an n-point grid, K = n/2 - 1."""
    k = n // 2 - 1
    return np.arange(-k, k + 1)


def laurent_from_traces(grid: BoundaryGrid, q: float, outer, inner) -> np.ndarray:
    """Coefficients of the holomorphic function with the given traces.

    Nonnegative modes are read off the outer circle, negative modes off
    the inner one (where they are O(1) rather than O(q^|k|)); this keeps
    the roundoff of every coefficient at its own scale.
    """
    n = grid.n
    k = n // 2 - 1
    f0 = np.fft.fft(np.asarray(outer, dtype=complex)) / n
    f1 = np.fft.fft(np.asarray(inner, dtype=complex)) / n
    c = np.zeros(2 * k + 1, dtype=complex)
    c[k:] = f0[: k + 1]
    neg = np.arange(-k, 0)
    c[:k] = f1[neg % n] * q ** (-neg.astype(float))
    return c


def laurent_traces(grid: BoundaryGrid, q: float, coeffs):
    """Boundary values on |z| = 1 and |z| = q."""
    n = grid.n
    k = n // 2 - 1
    modes = laurent_modes(n)
    buf0 = np.zeros(n, dtype=complex)
    buf0[modes % n] = coeffs
    buf1 = np.zeros(n, dtype=complex)
    buf1[modes % n] = coeffs * q ** modes.astype(float)
    outer = np.fft.ifft(buf0) * n
    inner = np.fft.ifft(buf1) * n
    return outer, inner


def laurent_evaluate(coeffs, z) -> np.ndarray:
    """Evaluate the Laurent series at points of the annulus."""
    c = np.asarray(coeffs, dtype=complex)
    k = (len(c) - 1) // 2
    z = np.asarray(z, dtype=complex)
    out = _polyval(z, c[k:])
    if k:
        inv = 1.0 / z
        out = out + inv * _polyval(inv, c[:k][::-1])
    return out


def laurent_derivative(coeffs, z) -> np.ndarray:
    """Evaluate the derivative of the Laurent series."""
    c = np.asarray(coeffs, dtype=complex)
    k = (len(c) - 1) // 2
    z = np.asarray(z, dtype=complex)
    pos = c[k + 1 :] * np.arange(1, k + 1)
    out = _polyval(z, pos)
    if k:
        inv = 1.0 / z
        neg = c[:k][::-1] * -np.arange(1, k + 1)
        out = out + inv * inv * _polyval(inv, neg)
    return out


def _shift_modes(coeffs: np.ndarray, sigma: int) -> np.ndarray:
    """Multiply by z^sigma in coefficient space, truncating at the ends."""
    if sigma == 0:
        return coeffs.copy()
    out = np.zeros_like(coeffs)
    idx = np.arange(len(coeffs))
    src = idx - sigma
    ok = (src >= 0) & (src < len(coeffs))
    out[idx[ok]] = coeffs[src[ok]]
    return out


def _reindex(values: np.ndarray) -> np.ndarray:
    """Trace of v(1/zeta)-type pullbacks: sample j goes to -j mod n."""
    n = len(values)
    return values[(-np.arange(n)) % n]


# --------------------------------------------------------------------------
# family transforms for the collar pieces
# --------------------------------------------------------------------------


def pullback_family(family: CurveFamily) -> CurveFamily:
    """Reparametrize theta -> -theta for the collar map zeta -> q/zeta.

    The map reverses the boundary orientation, so the curve index runs
    backwards and the theta-derivative flips sign.
    """
    return CurveFamily(
        rho=lambda theta, w: family.rho(-np.asarray(theta), w),
        d_w=lambda theta, w: family.d_w(-np.asarray(theta), w),
        dbar_w=lambda theta, w: family.dbar_w(-np.asarray(theta), w),
        d_theta=lambda theta, w: -family.d_theta(-np.asarray(theta), w),
        ray_radius=lambda theta, psi: family.ray_radius(-np.asarray(theta), psi),
        label=family.label + "/pullback",
        radial_profile=None
        if family.radial_profile is None
        else (lambda theta: family.radial_profile(-np.asarray(theta))),
        spec=None,
    )


def _twisted(family: CurveFamily, sigma: int, scale: float) -> CurveFamily:
    # divide out the trace of scale * z^sigma along the boundary circle
    if sigma == 0 and scale == 1.0:
        return family
    g = lambda theta: scale * np.exp(1j * sigma * np.asarray(theta))
    gp = lambda theta: 1j * sigma * scale * np.exp(1j * sigma * np.asarray(theta))
    return divisor_transform(family, g, gp)


def _rho_scale(family: CurveFamily, theta) -> float:
    """Natural size of rho values: curve radius times the w-gradient there.

    Dividing rho by this makes a boundary residual dimensionless, so both
    boundaries are enforced to comparable relative accuracy even when the
    curves differ in size by a large power of the modulus (for a circle of
    radius R the scale is R^2, matching the units of |w|^2 - R^2).
    """
    theta = np.asarray(theta, dtype=float)
    ray = np.asarray(family.ray_radius(theta, np.zeros_like(theta)), dtype=float)
    slope = np.abs(np.asarray(family.dbar_w(theta, ray.astype(complex))))
    return float(np.max(ray) * np.max(slope))


# --------------------------------------------------------------------------
# glue construction
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GlueReport:
    windings: tuple
    sigma: int
    band: tuple
    pre_newton_residual: float
    dbar_norm: float


@dataclass(frozen=True)
class AnnulusSolveOptions:
    grid_n: int = 256
    tol: float = 1e-10
    max_iter: int = 40
    damping: bool = True
    alpha: float = 0.5
    certify: bool = True
    seed: int = 0
    glue_threshold: float = 0.5
    neumann_max_terms: int = 20
    neumann_stall_ratio: float = 0.9
    neumann_tol: float = 1e-11
    locate: bool = True


def _glue_coefficients(
    outer_family: CurveFamily,
    inner_family: CurveFamily,
    windings,
    q: float,
    options: Optional[AnnulusSolveOptions] = None,
):
    """Build the glued Laurent iterate for disc-convention windings.

    The windings are balanced by the twist z^sigma so that each collar
    piece carries half the zero count as a divisor at its own boundary;
    the pieces then decay like q^{m/2} across the annulus and their sum
    is the telescoped initial iterate. Returns (coefficients, report)
    where the coefficients describe the twisted iterate h = f / z^sigma
    and the report residual is measured against the twisted families.
    Raises GlueTooCoarse when that residual exceeds the threshold (the
    windings are too small for this modulus).
    """
    opts = options if options is not None else AnnulusSolveOptions()
    n0, n1 = int(windings[0]), int(windings[1])
    m = n0 - n1
    if m < 0:
        raise ConfigError(
            f"prescribed zero count {m} is negative; the outer disc-convention "
            f"winding must not be smaller than the inner one, got {windings}"
        )
    grid = BoundaryGrid(opts.grid_n)
    n = grid.n
    kmax = n // 2 - 1
    band = make_collar_band(q)

    # everything runs in the twisted gauge h = f / z^sigma: the windings are
    # balanced and the inner family is rescaled by q^-sigma to unit size, so
    # the two boundary residuals live on comparable scales
    sigma = n1 + m // 2
    w_out = n0 - sigma
    w_in = sigma - n1
    fam0t = _twisted(outer_family, sigma, 1.0)
    fam1t = _twisted(inner_family, sigma, q ** float(sigma))
    fam1p = pullback_family(fam1t)

    disc_opts = DiscSolveOptions(
        grid_n=n,
        tol=min(opts.tol, 1e-11),
        homotopy=True,
        certify=False,
        seed=opts.seed,
    )
    sol0 = solve_disc(fam0t, w_out, disc_opts)
    sol1 = solve_disc(fam1p, w_in, disc_opts)
    a = np.fft.fft(sol0.f_trace.values)[: kmax + 1] / n
    b = np.fft.fft(sol1.f_trace.values)[: kmax + 1] / n

    if m == 0:
        # both pieces are winding-free: align the free inner phase with the
        # outer piece and average the shared constant term instead of
        # double-counting it
        if abs(b[0]) > 0.0:
            b = b * np.exp(1j * (np.angle(a[0]) - np.angle(b[0])))
        shared = 0.5 * (a[0] + b[0])
        a = a.copy()
        b = b.copy()
        a[0] = shared
        b[0] = 0.0

    coeffs = np.zeros(2 * kmax + 1, dtype=complex)
    coeffs[kmax:] = a
    j = np.arange(1, kmax + 1)
    coeffs[:kmax] = (b[1:] * q ** j.astype(float))[::-1]

    t0, t1 = laurent_traces(grid, q, coeffs)
    theta = grid.theta
    pre = max(
        float(np.max(np.abs(fam0t.rho(theta, t0)))) / _rho_scale(fam0t, theta),
        float(np.max(np.abs(fam1t.rho(theta, t1)))) / _rho_scale(fam1t, theta),
    )

    # defect the cutoff blend would hand to the area transform
    s, _ = radial_quadrature(band.s_inner, band.s_outer)
    zb = s[:, None] * np.exp(1j * theta)[None, :]
    defect = band.chi_outer.derivative(s)[:, None] * (zb / (2.0 * s[:, None])) * (
        _polyval(zb, a) - _polyval(q / zb, b)
    )
    collar = float(np.max(np.abs(defect)))

    report = GlueReport(
        windings=(n0, n1),
        sigma=sigma,
        band=(band.s_inner, band.s_outer),
        pre_newton_residual=pre,
        dbar_norm=collar,
    )
    if pre > opts.glue_threshold:
        raise GlueTooCoarse(
            f"glued iterate has boundary residual {pre:.3e} "
            f"(threshold {opts.glue_threshold}); windings {windings} are too "
            f"small for modulus {q}"
        )
    return coeffs, report


def glue_construct(
    outer_family: CurveFamily,
    inner_family: CurveFamily,
    n: int,
    q: float,
    options: Optional[AnnulusSolveOptions] = None,
):
    """Glue two collar solutions of winding n into one annulus iterate.

    Each boundary gets a disc solve of winding n in its own coherent
    orientation (so the iterate carries 2n zeros); the pieces decay like
    q^n across the annulus and their sum is holomorphic, so the only
    defects are the cross terms each piece leaves on the other boundary.
    Returns ((outer trace, inner trace), report); the report carries the
    pre-Newton boundary residual in curve-relative units and the sup of
    the dbar defect a cutoff blend would hand to the area correction.
    """
    opts = options if options is not None else AnnulusSolveOptions()
    coeffs, report = _glue_coefficients(
        outer_family, inner_family, (int(n), -int(n)), q, opts
    )
    grid = BoundaryGrid(opts.grid_n)
    t0, t1 = laurent_traces(grid, q, coeffs)
    return (BoundaryTrace(grid, t0), BoundaryTrace(grid, t1)), report


# --------------------------------------------------------------------------
# Newton problem on Laurent coefficients
# --------------------------------------------------------------------------


def _laurent_sampler(grid: BoundaryGrid, q: float):
    kmax = grid.n // 2 - 1
    modes = laurent_modes(grid.n)
    window = np.abs(modes) <= 8
    damp = np.where(modes < 0, q ** np.abs(modes).astype(float), 1.0)
    weight = damp / (1.0 + np.abs(modes)) ** 2

    def sample(rng):
        g = rng.standard_normal(2 * kmax + 1) + 1j * rng.standard_normal(2 * kmax + 1)
        return np.where(window, g * weight, 0.0)

    return sample


def _residual_pair_sampler(grid: BoundaryGrid):
    theta = grid.theta
    modes = np.arange(1, 9)
    cos = np.cos(np.outer(modes, theta))
    sin = np.sin(np.outer(modes, theta))

    def half(rng):
        c0 = rng.standard_normal()
        a = rng.standard_normal(len(modes)) / (1.0 + modes) ** 2
        b = rng.standard_normal(len(modes)) / (1.0 + modes) ** 2
        return c0 + a @ cos + b @ sin

    def sample(rng):
        return np.concatenate([half(rng), half(rng)])

    return sample


def _annulus_problem(
    outer_family: CurveFamily,
    inner_family: CurveFamily,
    q: float,
    grid: BoundaryGrid,
    band: CollarBand,
    opts: AnnulusSolveOptions,
    state: dict,
) -> NewtonProblem:
    theta = grid.theta
    n = grid.n
    kmax = n // 2 - 1
    fam1p = pullback_family(inner_family)
    outer_circle = np.exp(1j * theta)
    inner_circle = q * outer_circle
    s_nodes, _ = radial_quadrature(band.s_inner, band.s_outer)
    zband = s_nodes[:, None] * outer_circle[None, :]
    dbar_chi = band.chi_outer.dbar(zband)
    # residual rows in curve-relative units, one fixed scale per boundary
    unit0 = _rho_scale(outer_family, theta)
    unit1 = _rho_scale(inner_family, theta)

    def traces(c):
        return laurent_traces(grid, q, c)

    def residual(c):
        t0, t1 = traces(c)
        return np.concatenate(
            [
                np.asarray(outer_family.rho(theta, t0), dtype=float) / unit0,
                np.asarray(inner_family.rho(theta, t1), dtype=float) / unit1,
            ]
        )

    def derivative_action(c, dc):
        t0, t1 = traces(c)
        d0, d1 = traces(dc)
        e0 = 2.0 * (np.conj(outer_family.dbar_w(theta, t0)) * d0).real / unit0
        e1 = 2.0 * (np.conj(inner_family.dbar_w(theta, t1)) * d1).real / unit1
        return np.concatenate([e0, e1])

    def right_inverse(c):
        t0, t1 = traces(c)
        dec0 = eta_decompose(outer_family, BoundaryTrace(grid, t0))
        dec1 = eta_decompose(fam1p, BoundaryTrace(grid, _reindex(t1)))
        f_band = laurent_evaluate(c, zband)
        base = dbar_chi * f_band
        cache = {"svd": None, "stalled": False}

        def collar_apply(r):
            # per-boundary explicit inverses, multiplied back onto the
            # iterate so each correction carries the iterate's divisor;
            # the explicit inverses work in raw rho units
            k0 = right_inverse_apply(dec0, r[:n] * unit0)
            k1t = right_inverse_apply(dec1, _reindex(r[n:] * unit1))
            a = np.fft.fft(k0)[: kmax + 1] / n
            b = np.fft.fft(k1t)[: kmax + 1] / n
            blend_gap = _polyval(zband, a) - _polyval(q / zband, b)
            charge = AreaCharge(band.s_inner, band.s_outer, grid, base * blend_gap)
            u0 = charge.evaluate(outer_circle)
            u1 = charge.evaluate(inner_circle)
            cand0 = t0 * k0 - u0
            cand1 = t1 * _reindex(k1t) - u1
            return laurent_from_traces(grid, q, cand0, cand1)

        # graded basis: a unit negative mode is q^{-|k|} on the inner circle,
        # so the dense solve works in coordinates scaled to trace size
        grade = np.where(
            laurent_modes(n) < 0,
            q ** np.abs(laurent_modes(n)).astype(float),
            1.0,
        )

        def dense_solve(r):
            if cache["svd"] is None:
                cols = np.empty((2 * n, 2 * (2 * kmax + 1)))
                basis = np.zeros(2 * kmax + 1, dtype=complex)
                for i in range(2 * kmax + 1):
                    basis[i] = grade[i]
                    cols[:, 2 * i] = derivative_action(c, basis)
                    basis[i] = 1.0j * grade[i]
                    cols[:, 2 * i + 1] = derivative_action(c, basis)
                    basis[i] = 0.0
                cache["svd"] = np.linalg.svd(cols, full_matrices=False)
            u, s, vt = cache["svd"]
            state["fallback"] = True
            # truncated pseudo-inverse with a deterministic damping ladder:
            # exact gauge kernels (the phase direction when the windings
            # cancel) are always cut; the undamped step is tried first so
            # quadratic convergence is untouched, and each damped variant
            # is scored by the residual it actually leaves, which guards
            # against overshooting the basin far from the solution
            cut = 1e-10 * s[0]
            keep = s > cut
            rhs = u.T @ r
            rsup = float(np.max(np.abs(r)))
            best_dc = None
            best_val = np.inf
            for lam in (0.0, 1e-8, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1):
                lam = lam * s[0]
                if lam == 0.0:
                    weight = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
                else:
                    weight = np.where(keep, s / (s * s + lam * lam), 0.0)
                sol = vt.T @ (weight * rhs)
                dc = (sol[0::2] + 1j * sol[1::2]) * grade
                if not np.all(np.isfinite(dc)):
                    continue
                val = float(np.max(np.abs(residual(c - dc))))
                if val < best_val:
                    best_val = val
                    best_dc = dc
                if val <= 0.3 * rsup:
                    break
            if best_dc is None:
                raise NeumannDiverges("least-squares fallback produced non-finite step")
            return best_dc

        def apply(r):
            if cache["stalled"]:
                return dense_solve(r)
            scale = float(np.max(np.abs(r)))
            if scale == 0.0:
                return np.zeros(2 * kmax + 1, dtype=complex)
            x = np.zeros(2 * kmax + 1, dtype=complex)
            err = r
            prev = scale
            best = scale
            best_x = x
            for _ in range(opts.neumann_max_terms):
                x = x + collar_apply(err)
                err = r - derivative_action(c, x)
                cur = float(np.max(np.abs(err)))
                if cur < best:
                    best = cur
                    best_x = x
                if cur <= opts.neumann_tol * scale or cur <= 1e-15:
                    return x
                if cur > opts.neumann_stall_ratio * prev:
                    break
                prev = cur
            if best <= 1e-4 * scale:
                # roundoff plateau, not a genuine stall; the step is still
                # far more accurate than Newton needs
                return best_x
            cache["stalled"] = True
            return dense_solve(r)

        return apply

    def iterate_norm(dc):
        d0, d1 = traces(dc)
        return max(float(np.max(np.abs(d0))), float(np.max(np.abs(d1))))

    def residual_norm(r):
        return float(np.max(np.abs(r)))

    def certify_residual_norm(r):
        out = 0.0
        for half in (r[:n], r[n:]):
            rep = holder_norms(BoundaryTrace(grid, np.asarray(half, dtype=complex)), opts.alpha)
            out = max(out, rep.sup_norm + rep.c_alpha)
        return out

    def certify_iterate_norm(dc):
        d0, d1 = traces(dc)
        out = 0.0
        for half in (d0, d1):
            out = max(out, holder_norms(BoundaryTrace(grid, half), opts.alpha).c1_alpha)
        return out

    return NewtonProblem(
        residual=residual,
        right_inverse=right_inverse,
        iterate_norm=iterate_norm,
        residual_norm=residual_norm,
        derivative_action=derivative_action,
        iterate_sampler=_laurent_sampler(grid, q),
        residual_sampler=_residual_pair_sampler(grid),
        certify_iterate_norm=certify_iterate_norm,
        certify_residual_norm=certify_residual_norm,
    )


@dataclass(frozen=True)
class AnnulusSolution:
    grid: BoundaryGrid
    q: float
    windings: tuple
    coefficients: np.ndarray
    outer_trace: BoundaryTrace
    inner_trace: BoundaryTrace
    residual_sup: float
    residual_by_boundary: tuple
    zeros: tuple
    glue: GlueReport
    run: Optional[NewtonRun]
    fallback_used: bool

    @property
    def winding_inner_coherent(self) -> int:
        return int(self.windings[1])

    @property
    def winding_inner_disc(self) -> int:
        # inner boundary traversed counterclockwise instead of coherently
        return -int(self.windings[1])

    def evaluate(self, z):
        return laurent_evaluate(self.coefficients, z)

    def derivative(self, z):
        return laurent_derivative(self.coefficients, z)


def solve_annulus(
    outer_family: CurveFamily,
    inner_family: CurveFamily,
    windings,
    q: float,
    options: Optional[AnnulusSolveOptions] = None,
) -> AnnulusSolution:
    """Solve the two-boundary problem with prescribed windings.

    windings = (n0, n1) counts boundary turns in the coherent orientation
    (outer counterclockwise, inner clockwise), so the solution carries
    n0 + n1 interior zeros. Starts from the glued collar iterate and runs
    certified Newton on the Laurent coefficients. The converged trace
    windings are checked against the prescription and the interior zeros
    are located from the boundary data, so the zero count is certified
    independently of the iteration.
    """
    opts = options if options is not None else AnnulusSolveOptions()
    grid = BoundaryGrid(opts.grid_n)
    kmax = grid.n // 2 - 1
    if kmax * abs(np.log(q)) > 600.0:
        raise ConfigError(f"modulus {q} is too extreme for a {grid.n}-point grid")
    band = make_collar_band(q)
    n0 = int(windings[0])
    n1 = -int(windings[1])  # disc convention used internally

    h0, glue = _glue_coefficients(outer_family, inner_family, (n0, n1), q, opts)
    # Newton runs in the twisted gauge (balanced windings, unit-scale inner
    # family); the monomial factor is restored afterwards
    sigma = glue.sigma
    fam0t = _twisted(outer_family, sigma, 1.0)
    fam1t = _twisted(inner_family, sigma, q ** float(sigma))
    state = {"fallback": False}
    problem = _annulus_problem(fam0t, fam1t, q, grid, band, opts, state)
    cert = (
        certify(problem, h0, CertifyOptions(seed=opts.seed))
        if opts.certify
        else None
    )
    run = iterate(
        problem,
        h0,
        IterateOptions(tol=opts.tol, max_iter=opts.max_iter, allow_damping=opts.damping),
        certificate=cert,
    )

    coeffs = _shift_modes(run.x, sigma)
    t0, t1 = laurent_traces(grid, q, coeffs)
    tr0 = BoundaryTrace(grid, t0)
    tr1 = BoundaryTrace(grid, t1)
    got = (winding_number(tr0), -winding_number(tr1))
    if got != (int(windings[0]), int(windings[1])):
        raise CountMismatch(
            f"converged trace windings {got} (coherent) != prescribed "
            f"{(int(windings[0]), int(windings[1]))}"
        )
    theta = grid.theta
    residual_by_boundary = (
        float(np.max(np.abs(outer_family.rho(theta, t0)))) / _rho_scale(outer_family, theta),
        float(np.max(np.abs(inner_family.rho(theta, t1)))) / _rho_scale(inner_family, theta),
    )
    zeros = ()
    if opts.locate and n0 - n1 > 0:
        zeros = tuple(locate_zeros((tr0, tr1), Annulus(q)))
    return AnnulusSolution(
        grid=grid,
        q=q,
        windings=(int(windings[0]), int(windings[1])),
        coefficients=coeffs,
        outer_trace=tr0,
        inner_trace=tr1,
        residual_sup=max(residual_by_boundary),
        residual_by_boundary=residual_by_boundary,
        zeros=zeros,
        glue=glue,
        run=run,
        fallback_used=state["fallback"],
    )


# --------------------------------------------------------------------------
# harmonic extension and the radial closed form
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LaurentHarmonic:
    """Harmonic extension u = c_log log|z| + Re G with Laurent G."""

    grid: BoundaryGrid
    q: float
    c_log: float
    coeffs: np.ndarray

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        return self.c_log * np.log(np.abs(z)) + laurent_evaluate(self.coeffs, z).real

    def holomorphic_part(self, z):
        return laurent_evaluate(self.coeffs, z)


def harmonic_extend_annulus(
    grid: BoundaryGrid, q: float, outer_values, inner_values
) -> LaurentHarmonic:
    """Harmonic function on the annulus with the given real boundary data.

    The log coefficient c_log = (inner mean - outer mean) / log q is the
    flux through the annulus; the rest is the real part of a single-valued
    Laurent series solved mode by mode.
    """
    if not 0.0 < q < 1.0:
        raise ConfigError(f"annulus modulus must lie in (0, 1), got {q}")
    if q * q > 1.0 - 1e-6:
        raise ModeConditioning("mode solve degenerates as the annulus thins")
    d0 = np.asarray(outer_values, dtype=float)
    d1 = np.asarray(inner_values, dtype=float)
    if d0.shape != (grid.n,) or d1.shape != (grid.n,):
        raise ConfigError("boundary data must be sampled on the grid")
    f0 = np.fft.fft(d0) / grid.n
    f1 = np.fft.fft(d1) / grid.n
    c_log = float((f1[0].real - f0[0].real) / np.log(q))
    kmax = grid.n // 2 - 1
    coeffs = np.zeros(2 * kmax + 1, dtype=complex)
    coeffs[kmax] = f0[0].real
    k = np.arange(1, kmax + 1)
    qk = q ** k.astype(float)
    denom = 1.0 - qk * qk
    fk = 2.0 * (f0[1 : kmax + 1] - f1[1 : kmax + 1] * qk) / denom
    # same as 2 d0 - f, but keeps the q^k damping explicit so the inner
    # trace is reproduced to roundoff relative to its own data
    gk = 2.0 * qk * (f1[1 : kmax + 1] - f0[1 : kmax + 1] * qk) / denom
    coeffs[kmax + 1 :] = fk
    coeffs[:kmax] = np.conj(gk)[::-1]
    return LaurentHarmonic(grid=grid, q=q, c_log=c_log, coeffs=coeffs)


def _split_flux(s: float):
    """Split the flux s into a monomial power and a fractional exponent.

    Returns (k1, t): the solution carries winding k1 at the inner boundary
    and, when t is not None, a single zero at radius q^t. Fluxes within
    1e-12 of an integer need no zero.
    """
    k1 = int(np.floor(s))
    t = s - k1
    if t > 1.0 - 1e-12:
        k1 += 1
        t = 0.0
    if t < 1e-12:
        return k1, None
    return k1, t


@dataclass(frozen=True)
class RadialSolution:
    """Product-form solution (z - z1) z^k1 exp(G) for circle-family data."""

    grid: BoundaryGrid
    q: float
    k1: int
    zero: Optional[complex]
    flux: float
    g_coeffs: np.ndarray
    outer_trace: BoundaryTrace
    inner_trace: BoundaryTrace
    residual_sup: float
    residual_by_boundary: tuple
    modulus_error: float
    zeros: tuple

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        out = z ** self.k1 * np.exp(laurent_evaluate(self.g_coeffs, z))
        if self.zero is not None:
            out = out * (z - self.zero)
        return out


def solve_annulus_radial(
    outer_family: CurveFamily,
    inner_family: CurveFamily,
    q: float,
    grid_n: int = 256,
    zero_phase: float = 0.0,
    locate: bool = True,
) -> RadialSolution:
    """Closed-form solve when every curve is a circle centered at 0.

    log|f| must extend the boundary data harmonically, so the flux of the
    extension dictates the inner winding and the single zero radius; the
    rest of f is the exponential of a mode-by-mode completion. The zero
    phase is free and can be prescribed.
    """
    from .errors import NotRadialFamily

    if outer_family.radial_profile is None or inner_family.radial_profile is None:
        raise NotRadialFamily("both families must be circles centered at the origin")
    grid = BoundaryGrid(grid_n)
    theta = grid.theta
    r0 = np.asarray(outer_family.radial_profile(theta), dtype=float)
    r1 = np.asarray(inner_family.radial_profile(theta), dtype=float)
    if np.min(r0) <= 0.0 or np.min(r1) <= 0.0:
        raise ConfigError("radial profiles must be positive")

    extension = harmonic_extend_annulus(grid, q, np.log(r0), np.log(r1))
    s = extension.c_log
    k1, t = _split_flux(s)
    zero = None if t is None else q ** t * np.exp(1j * zero_phase)

    w0 = np.log(r0)
    w1 = np.log(r1) - k1 * np.log(q)
    outer_circle = np.exp(1j * theta)
    inner_circle = q * outer_circle
    if zero is not None:
        # subtract the divisor's log-modulus with its circle mean pinned to
        # the analytic value (0 outer, log|z1| inner): the grid mean only
        # converges like |z1|^N when the zero sits near a circle, and the
        # flux must not inherit that error
        lg0 = np.log(np.abs(outer_circle - zero))
        lg1 = np.log(np.abs(inner_circle - zero))
        w0 = w0 - (lg0 - float(np.mean(lg0)))
        w1 = w1 - (lg1 - float(np.mean(lg1))) - np.log(np.abs(zero))
    flat = harmonic_extend_annulus(grid, q, w0, w1)
    if abs(flat.c_log) > 1e-6:
        raise ModeConditioning(
            f"flux {flat.c_log:.3e} left after removing divisor contributions"
        )

    g0 = laurent_evaluate(flat.coeffs, outer_circle)
    g1 = laurent_evaluate(flat.coeffs, inner_circle)
    f0 = outer_circle ** k1 * np.exp(g0)
    f1 = inner_circle ** k1 * np.exp(g1)
    if zero is not None:
        f0 = f0 * (outer_circle - zero)
        f1 = f1 * (inner_circle - zero)
    tr0 = BoundaryTrace(grid, f0)
    tr1 = BoundaryTrace(grid, f1)
    modulus_error = max(
        float(np.max(np.abs(np.abs(f0) - r0))),
        float(np.max(np.abs(np.abs(f1) - r1))),
    )
    residual_by_boundary = (
        float(np.max(np.abs(outer_family.rho(theta, f0)))) / _rho_scale(outer_family, theta),
        float(np.max(np.abs(inner_family.rho(theta, f1)))) / _rho_scale(inner_family, theta),
    )
    zeros = ()
    if locate and zero is not None:
        zeros = tuple(locate_zeros((tr0, tr1), Annulus(q)))
    return RadialSolution(
        grid=grid,
        q=q,
        k1=k1,
        zero=zero,
        flux=s,
        g_coeffs=flat.coeffs,
        outer_trace=tr0,
        inner_trace=tr1,
        residual_sup=max(residual_by_boundary),
        residual_by_boundary=residual_by_boundary,
        modulus_error=modulus_error,
        zeros=zeros,
    )
