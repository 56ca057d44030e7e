"""Canonical surfaces, curves and variation fields used by the test matrix and scripts."""
from __future__ import annotations

from functools import lru_cache

from . import surfaces as S
from .curves import expression_curve, reparameterize_arclength

SURFACES = {
    "sphere": lambda: S.sphere(1.0),
    "cylinder": lambda: S.cylinder(1.0),
    "torus": lambda: S.torus(2.0, 1.0),
    "graph": lambda: S.graph("0.5*u^2+0.25*v^2+0.1*u*v"),
}

# (u(sigma), v(sigma)) in a general parameter, sigma in [0, 2]
CURVES = {
    "sphere": [("1.0+0.3*s", "0.8*s+0.1*s^2"), ("1.2-0.2*s+0.05*s^2", "0.5+0.9*s"),
               ("0.9+0.25*sin(s)", "1.1*s")],
    "cylinder": [("s", "0.5*s+0.1*s^2"), ("0.8*s+0.1*s^2", "0.3*s"), ("0.6*s", "0.4*s+0.2*sin(s)")],
    "torus": [("0.3+0.4*s", "0.2+0.7*s"), ("1.0+0.5*s", "0.3*s+0.1*s^2"), ("-0.5+0.6*s", "0.4+0.5*sin(s)")],
    "graph": [("0.2+0.6*s", "-0.3+0.5*s+0.1*s^2"), ("-0.4+0.7*s", "0.2+0.3*s+0.2*s^2"),
              ("0.5*cos(s)", "0.5*sin(s)")],
}

FIELDS = ("s^3", "s^3*(l-s)", "sin(s)^3")

PARAM_LENGTH = 2.0


@lru_cache(maxsize=None)
def matrix_curve(surface: str, index: int):
    """Arc-length reparameterized test curve ``index`` on ``surface``."""
    u, v = CURVES[surface][index]
    raw = expression_curve(SURFACES[surface](), u, v, PARAM_LENGTH, parameter="general",
                           label=f"{surface}[{index}]")
    return reparameterize_arclength(raw)


def matrix():
    """All (surface, index) pairs."""
    return [(name, i) for name in SURFACES for i in range(len(CURVES[name]))]
