"""Torsion-energy extremals (relaxed elastic lines of second kind) on surfaces.

Submodules: ``jets`` (truncated Taylor arithmetic), ``surfaces`` and ``dsl``
(patches), ``curves`` (Darboux invariants, energies), ``variation`` (the
length-preserving family and first variation), ``elastic`` (residuals and
verdict), ``relax`` (constrained minimization) and ``cli``.
"""

__version__ = "0.1.0"

from .curves import (  # noqa: E402
    CurveOnSurface,
    darboux_state,
    expression_curve,
    frenet_oracles,
    reparameterize_arclength,
    total_square_curvature,
    total_square_torsion,
)
from .elastic import boundary_residuals, classify_curve, corollary_residual, el_residual, verify_relaxed_elastic  # noqa: E402
from .surfaces import SurfacePatch, eval_patch, unit_normal  # noqa: E402

__all__ = [
    "CurveOnSurface",
    "SurfacePatch",
    "boundary_residuals",
    "classify_curve",
    "corollary_residual",
    "darboux_state",
    "el_residual",
    "eval_patch",
    "expression_curve",
    "frenet_oracles",
    "reparameterize_arclength",
    "total_square_curvature",
    "total_square_torsion",
    "unit_normal",
    "verify_relaxed_elastic",
]
