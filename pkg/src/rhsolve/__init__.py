"""Nonlinear boundary-value solver for holomorphic functions on disc and annulus."""

from . import (
    analysis,
    annulus,
    boundary,
    cli,
    curves,
    disc,
    domains,
    errors,
    newton,
    pompeiu,
    serialize,
    trig,
)

__all__ = [
    "analysis",
    "annulus",
    "boundary",
    "cli",
    "curves",
    "disc",
    "domains",
    "errors",
    "newton",
    "pompeiu",
    "serialize",
    "trig",
]
__version__ = "0.1.0"
