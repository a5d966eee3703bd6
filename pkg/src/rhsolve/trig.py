"""Real trigonometric polynomials in the flat coefficient layout.

The interchange layout is a single list [c0, a1, b1, a2, b2, ...] meaning

    p(theta) = c0 + sum_k a_k cos(k theta) + b_k sin(k theta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TrigPolynomial:
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise ValueError("need at least the constant coefficient")
        if len(self.coefficients) % 2 == 0:
            raise ValueError("layout is [c0, a1, b1, ...]; length must be odd")

    @classmethod
    def from_list(cls, coefficients) -> "TrigPolynomial":
        coefficients = [float(c) for c in coefficients]
        if len(coefficients) % 2 == 0:
            coefficients.append(0.0)
        return cls(tuple(coefficients))

    @classmethod
    def constant(cls, value: float) -> "TrigPolynomial":
        return cls((float(value),))

    @property
    def degree(self) -> int:
        return (len(self.coefficients) - 1) // 2

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, self.coefficients[0], dtype=float)
        for k in range(1, self.degree + 1):
            a = self.coefficients[2 * k - 1]
            b = self.coefficients[2 * k]
            if a:
                out += a * np.cos(k * theta)
            if b:
                out += b * np.sin(k * theta)
        return out

    def derivative(self) -> "TrigPolynomial":
        # d/dtheta: a_k cos -> -a_k k sin, b_k sin -> b_k k cos
        coeffs = [0.0]
        for k in range(1, self.degree + 1):
            a = self.coefficients[2 * k - 1]
            b = self.coefficients[2 * k]
            coeffs.extend([k * b, -k * a])
        return TrigPolynomial(tuple(coeffs))

    def min_value(self, samples: int = 4096) -> float:
        theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        return float(np.min(self(theta)))


def as_trig_polynomial(value) -> TrigPolynomial:
    """Coerce a float, coefficient list, or TrigPolynomial to a TrigPolynomial."""
    if isinstance(value, TrigPolynomial):
        return value
    if np.isscalar(value):
        return TrigPolynomial.constant(float(value))
    return TrigPolynomial.from_list(value)
