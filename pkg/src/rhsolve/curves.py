"""Families of Jordan curves prescribing boundary moduli.

A family assigns to each boundary angle theta a closed curve
gamma_theta = {w : rho(theta, w) = 0}, star-shaped about the origin. The
solvers only interact with families through this interface: the defining
function rho, its Wirtinger and angular partials, and the ray radius
r(theta, psi) at which the ray arg w = psi meets gamma_theta.

eta_decompose supplies the multiplicative splitting of the linearized
boundary operator along a trace, and divisor_transform rescales a family by
a nonvanishing multiplier, which is how prescribed windings are divided out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .boundary import BoundaryGrid, BoundaryTrace, hilbert_transform, unwrapped_phase, winding_number
from .errors import (
    DegenerateAxis,
    EtaWindingNonzero,
    MultiplierVanishes,
    ZeroNotEnclosed,
    ZeroOnBoundary,
    ZeroOnTrace,
)
from .trig import TrigPolynomial, as_trig_polynomial

_FINE = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)


@dataclass(frozen=True)
class CurveFamily:
    """Callable bundle defining the curves and their partial derivatives.

    All callables accept broadcastable arrays (theta real, w complex).
    radial_profile is set when every curve is a circle centered at the
    origin; it maps theta to the radius.
    """

    rho: Callable
    d_w: Callable
    dbar_w: Callable
    d_theta: Callable
    ray_radius: Callable
    label: str = "custom"
    radial_profile: Optional[Callable] = None
    spec: Optional[dict] = None


def _is_zero_poly(p: TrigPolynomial) -> bool:
    return all(x == 0.0 for x in p.coefficients)


def builtin_circle_family(radius, center=0.0) -> CurveFamily:
    """Circles |w - c(theta)| = R(theta) with trig-polynomial R and real c.

    Raises ZeroNotEnclosed unless the origin lies strictly inside every
    curve, i.e. R(theta) > |c(theta)| for all theta.
    """
    R = as_trig_polynomial(radius)
    c = as_trig_polynomial(center)
    Rp, cp = R.derivative(), c.derivative()
    if np.min(R(_FINE) - np.abs(c(_FINE))) <= 0.0:
        raise ZeroNotEnclosed("some curve in the family does not enclose the origin")

    def rho(theta, w):
        d = w - c(theta)
        return (d * np.conj(d)).real - R(theta) ** 2

    def d_w(theta, w):
        return np.conj(w - c(theta))

    def dbar_w(theta, w):
        return w - c(theta)

    def d_theta(theta, w):
        return -2.0 * (np.conj(w - c(theta)) * cp(theta)).real - 2.0 * R(theta) * Rp(theta)

    def ray_radius(theta, psi):
        cv, rv = c(theta), R(theta)
        a = cv * np.cos(psi)
        return a + np.sqrt(a * a + rv * rv - cv * cv)

    return CurveFamily(
        rho=rho,
        d_w=d_w,
        dbar_w=dbar_w,
        d_theta=d_theta,
        ray_radius=ray_radius,
        label="circle",
        radial_profile=R if _is_zero_poly(c) else None,
        spec={"type": "circle", "fourier": {"R": list(R.coefficients), "c": list(c.coefficients)}},
    )


def builtin_ellipse_family(p, q, phi=0.0) -> CurveFamily:
    """Origin-centered ellipses with semi-axes p(theta), q(theta), tilt phi(theta).

    rho(theta, w) = (x/p)^2 + (y/q)^2 - 1 with x + iy = exp(-i phi) w.
    Raises DegenerateAxis when an axis profile is not strictly positive.
    """
    P = as_trig_polynomial(p)
    Q = as_trig_polynomial(q)
    Phi = as_trig_polynomial(phi)
    Pp, Qp, Phip = P.derivative(), Q.derivative(), Phi.derivative()
    if min(np.min(P(_FINE)), np.min(Q(_FINE))) <= 0.0:
        raise DegenerateAxis("ellipse axis profile must be strictly positive")

    def _hat(theta, w):
        u = np.exp(-1j * Phi(theta)) * w
        return u.real, u.imag

    def rho(theta, w):
        x, y = _hat(theta, w)
        return (x / P(theta)) ** 2 + (y / Q(theta)) ** 2 - 1.0

    def d_w(theta, w):
        x, y = _hat(theta, w)
        return np.exp(-1j * Phi(theta)) * (x / P(theta) ** 2 - 1j * y / Q(theta) ** 2)

    def dbar_w(theta, w):
        x, y = _hat(theta, w)
        return np.exp(1j * Phi(theta)) * (x / P(theta) ** 2 + 1j * y / Q(theta) ** 2)

    def d_theta(theta, w):
        x, y = _hat(theta, w)
        pv, qv = P(theta), Q(theta)
        return (
            -2.0 * x * x * Pp(theta) / pv**3
            - 2.0 * y * y * Qp(theta) / qv**3
            + 2.0 * Phip(theta) * x * y * (1.0 / pv**2 - 1.0 / qv**2)
        )

    def ray_radius(theta, psi):
        ang = psi - Phi(theta)
        return 1.0 / np.sqrt((np.cos(ang) / P(theta)) ** 2 + (np.sin(ang) / Q(theta)) ** 2)

    radial = P if P.coefficients == Q.coefficients else None
    return CurveFamily(
        rho=rho,
        d_w=d_w,
        dbar_w=dbar_w,
        d_theta=d_theta,
        ray_radius=ray_radius,
        label="ellipse",
        radial_profile=radial,
        spec={
            "type": "ellipse",
            "fourier": {
                "p": list(P.coefficients),
                "q": list(Q.coefficients),
                "phi": list(Phi.coefficients),
            },
        },
    )


def divisor_transform(family: CurveFamily, multiplier, multiplier_derivative) -> CurveFamily:
    """Family of the curves rho(theta, g(theta) w) = 0 for nonvanishing g.

    If f solves the transformed problem then g(theta) f solves the original
    one on the boundary; dividing out a prescribed winding uses
    g(theta) = exp(i n theta).
    """
    g, gp = multiplier, multiplier_derivative
    gv = np.asarray(g(_FINE), dtype=complex)
    if np.min(np.abs(gv)) <= 1e-14 * max(1.0, np.max(np.abs(gv))):
        raise MultiplierVanishes("divisor multiplier vanishes on the circle")

    def rho(theta, w):
        return family.rho(theta, g(theta) * w)

    def d_w(theta, w):
        return family.d_w(theta, g(theta) * w) * g(theta)

    def dbar_w(theta, w):
        return family.dbar_w(theta, g(theta) * w) * np.conj(g(theta))

    def d_theta(theta, w):
        zeta = g(theta) * w
        return family.d_theta(theta, zeta) + 2.0 * (family.d_w(theta, zeta) * gp(theta) * w).real

    def ray_radius(theta, psi):
        gt = g(theta)
        return family.ray_radius(theta, psi + np.angle(gt)) / np.abs(gt)

    radial = None
    if family.radial_profile is not None:
        parent = family.radial_profile
        radial = lambda theta: parent(theta) / np.abs(g(theta))
    return CurveFamily(
        rho=rho,
        d_w=d_w,
        dbar_w=dbar_w,
        d_theta=d_theta,
        ray_radius=ray_radius,
        label=family.label + "/divisor",
        radial_profile=radial,
        spec=None,
    )


def curvature_floor_check(family: CurveFamily, samples: int = 256) -> float:
    """Minimum of |dbar rho| over the curves: the transversality margin.

    The linearized boundary operator degenerates where this vanishes, so a
    small floor warns that Newton corrections are ill-conditioned.
    """
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    psi = theta.copy()
    tt, pp = np.meshgrid(theta, psi, indexing="ij")
    w = family.ray_radius(tt, pp) * np.exp(1j * pp)
    return float(np.min(np.abs(family.dbar_w(tt, w))))


# --------------------------------------------------------------------------
# eta decomposition of the linearized operator
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EtaDecomposition:
    """Multiplicative data of eta = w conj(dbar rho) along a trace.

    eta = exp(a + i b) with b the continuous (winding-zero) argument and
    b_tilde its circle conjugate; these feed the explicit right inverse of
    k -> 2 Re(eta k).
    """

    grid: BoundaryGrid
    eta: BoundaryTrace
    a: np.ndarray
    b: np.ndarray
    b_tilde: np.ndarray
    winding: int


def eta_decompose(family: CurveFamily, trace: BoundaryTrace) -> EtaDecomposition:
    """Decompose the linearization weight along a boundary trace.

    Raises ZeroOnTrace if eta vanishes (the trace crosses a curve's critical
    ray) and EtaWindingNonzero when the winding of eta is not zero, in which
    case the explicit inverse does not exist and a divisor transform is
    needed first.
    """
    theta = trace.grid.theta
    w = trace.values
    eta_vals = w * np.conj(family.dbar_w(theta, w))
    eta = BoundaryTrace(trace.grid, eta_vals)
    try:
        wind = winding_number(eta)
        b = unwrapped_phase(eta)
    except ZeroOnBoundary as exc:
        raise ZeroOnTrace(str(exc)) from exc
    if wind != 0:
        raise EtaWindingNonzero(f"eta has winding {wind}, expected 0")
    a = np.log(np.abs(eta_vals))
    b_tilde = hilbert_transform(BoundaryTrace(trace.grid, b)).values.real
    return EtaDecomposition(grid=trace.grid, eta=eta, a=a, b=b, b_tilde=b_tilde, winding=wind)


# --------------------------------------------------------------------------
# JSON interchange
# --------------------------------------------------------------------------

_SPEC_KEYS = {"circle": {"R", "c"}, "ellipse": {"p", "q", "phi"}}
_SPEC_REQUIRED = {"circle": {"R"}, "ellipse": {"p", "q"}}


def family_from_spec(data: dict) -> CurveFamily:
    """Build a builtin family from its JSON form.

    {"type": "circle", "fourier": {"R": [c0, a1, b1, ...], "c": [...]}} or
    {"type": "ellipse", "fourier": {"p": [...], "q": [...], "phi": [...]}}.
    """
    if not isinstance(data, dict) or set(data) != {"type", "fourier"}:
        raise ValueError("family spec must have exactly the keys 'type' and 'fourier'")
    kind = data["type"]
    if kind not in _SPEC_KEYS:
        raise ValueError(f"unknown family type {kind!r}")
    fourier = data["fourier"]
    if not isinstance(fourier, dict):
        raise ValueError("'fourier' must be a mapping of coefficient lists")
    extra = set(fourier) - _SPEC_KEYS[kind]
    missing = _SPEC_REQUIRED[kind] - set(fourier)
    if extra or missing:
        raise ValueError(f"bad fourier keys for {kind}: extra {sorted(extra)}, missing {sorted(missing)}")

    def poly(key, default):
        if key not in fourier:
            return as_trig_polynomial(default)
        coeffs = fourier[key]
        if not isinstance(coeffs, (list, tuple)) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in coeffs
        ):
            raise ValueError(f"fourier key {key!r} must be a flat list of numbers")
        return TrigPolynomial.from_list(coeffs)

    if kind == "circle":
        return builtin_circle_family(poly("R", 1.0), poly("c", 0.0))
    return builtin_ellipse_family(poly("p", 1.0), poly("q", 1.0), poly("phi", 0.0))


def family_to_spec(family: CurveFamily) -> dict:
    if family.spec is None:
        raise ValueError("only builtin families have a serializable spec")
    return family.spec
