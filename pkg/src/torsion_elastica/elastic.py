"""Residuals of the intrinsic equations for a relaxed elastic line of second kind.

Every evaluator works on jets of the Darboux invariants (kg, kn, tg) in arc
length, so each primed group is differentiated exactly.  With
w = tau / kappa^2 the Euler-Lagrange density is

    E = kg tau(l)^2 + 2 w P0 - 2 (w P1)' + 2 (w P2)'' + 2 (kn w)'''

and the free-end residuals are

    B1 = w P1 - (w P2)' - (kn w)'',   B2 = w P2 + (kn w)',   B3 = kn tau.

The first variation of the torsion functional along an admissible field mu is
``int mu E ds + 2 mu(l) B1 + 2 mu'(l) B2 - 2 mu''(l) B3 / kappa^2(l)``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .curves import CurveOnSurface, frame_jets, require_curvature
from .errors import HypothesisViolation
from .jets import Jet

COROLLARIES = ("geodesic", "line_of_curvature", "asymptotic")


def _groups(kg: Jet, kn: Jet, tg: Jet):
    kg1, kn1, tg1 = kg.d(), kn.d(), tg.d()
    tg2 = tg1.d()
    k2 = kg * kg + kn * kn
    tau = tg + (kg * kn1 - kg1 * kn) / k2
    P0 = (
        kg * k2 * (tg + tau)
        + 2 * kg * kn * kg1
        - 2 * kg * kn * kn * tg
        - kg1 * tg1
        + 4 * kn * tg * tg1
        - 2 * kg * kg * kn1
        - 2 * kg**3 * tg
        - tg * tg * kn1
        - 2 * kg * tg**3
        + kg * tg2
        - 2 * kn * tg1 * tau
        + 2 * kg * tau * (k2 + tg * tg)
    )
    P1 = -kn * k2 + 5 * kn * tg * tg - 2 * tg * kg1 + 3 * kg * tg1 - 4 * kn * tg * tau
    P2 = kn1 + 4 * kg * tg - 2 * kg * tau
    return tau, k2, tau / k2, P0, P1, P2


def el_density(kg: Jet, kn: Jet, tg: Jet, tau_l) -> Jet:
    """Left side of the Euler-Lagrange equation as a jet (needs kg etc. of order >= 4)."""
    tau, k2, w, P0, P1, P2 = _groups(kg, kn, tg)
    return kg * tau_l**2 + 2 * w * P0 - 2 * (w * P1).d() + 2 * (w * P2).d(2) + 2 * (kn * w).d(3)


def boundary_groups(kg: Jet, kn: Jet, tg: Jet):
    tau, k2, w, P0, P1, P2 = _groups(kg, kn, tg)
    B1 = w * P1 - (w * P2).d() - (kn * w).d(2)
    B2 = w * P2 + (kn * w).d()
    B3 = kn * tau
    return B1, B2, B3


def tau_at_end(curve: CurveOnSurface) -> float:
    fj = frame_jets(curve, curve.length, order=4)
    require_curvature(fj.kappa2.value, curve.length)
    return float(fj.tau.value)


def el_residual(curve: CurveOnSurface, s, tau_at_l: float) -> np.ndarray:
    """E(s); ``tau_at_l`` is the torsion at the free end, which enters nonlocally."""
    fj = frame_jets(curve, s)
    require_curvature(fj.kappa2.value, fj.s)
    return el_density(fj.kg, fj.kn, fj.tg, tau_at_l).value


def boundary_residuals(curve: CurveOnSurface):
    fj = frame_jets(curve, curve.length)
    require_curvature(fj.kappa2.value, curve.length)
    return tuple(float(b.value) for b in boundary_groups(fj.kg, fj.kn, fj.tg))


# ---------------------------------------------------------------------------
# Specializations


def _geodesic(kn, tg):
    # kg == 0 so tau == tg and kappa^2 == kn^2
    kn1, tg1 = kn.d(), tg.d()
    return 2 * (
        tg / (kn * kn) * (2 * kn * tg * tg1 - tg * tg * kn1)
        - (tg / kn * (tg * tg - kn * kn)).d()
        + (tg * kn1 / (kn * kn)).d(2)
        + (tg / kn).d(3)
    )


def _line_of_curvature(kg, kn, tau_l):
    # tg == 0
    k2 = kg * kg + kn * kn
    tau = (kg * kn.d() - kg.d() * kn) / k2
    return (
        kg * tau_l**2
        + 2 * kg * tau * tau
        + 2 * (kn * tau).d()
        + 2 * (tau / k2 * (kn.d() - 2 * kg * tau)).d(2)
        + 2 * (kn * tau / k2).d(3)
    )


def _asymptotic(kg, tg, tau_l):
    # kn == 0 so tau == tg and kappa^2 == kg^2
    kg1, tg1 = kg.d(), tg.d()
    return kg * tau_l**2 + 2 * (
        tg / (kg * kg) * (2 * kg**3 * tg - kg1 * tg1 + kg * tg1.d())
        - (tg / (kg * kg) * (3 * kg * tg1 - 2 * tg * kg1)).d()
        + 2 * (tg * tg / kg).d(2)
    )


_HYPOTHESIS = {"geodesic": "kg", "line_of_curvature": "tg", "asymptotic": "kn"}


def _sup_invariant(curve, name, stations=101):
    fj = frame_jets(curve, np.linspace(0.0, curve.length, stations), order=2)
    return float(np.max(np.abs(getattr(fj, name).value)))


def default_threshold(curve: CurveOnSurface) -> float:
    return 1e-8 / curve.length


def corollary_residual(curve: CurveOnSurface, which: str, s, threshold: float | None = None) -> np.ndarray:
    """Residual of the specialized equation for geodesics, lines of curvature or asymptotic curves.

    The vanishing invariant is dropped from the formula rather than
    evaluated, so agreement with :func:`el_residual` on the hypothesis class
    is a genuine consistency check.
    """
    if which not in _HYPOTHESIS:
        raise ValueError(f"unknown corollary {which!r}")
    threshold = default_threshold(curve) if threshold is None else threshold
    sup = _sup_invariant(curve, _HYPOTHESIS[which])
    if sup > threshold:
        raise HypothesisViolation(
            f"curve is not a {which.replace('_', ' ')}: sup |{_HYPOTHESIS[which]}| = {sup:.3g}", sup
        )
    fj = frame_jets(curve, s)
    require_curvature(fj.kappa2.value, fj.s)
    end = frame_jets(curve, curve.length, order=4)
    if which == "geodesic":
        return _geodesic(fj.kn, fj.tg).value
    if which == "line_of_curvature":
        k2 = end.kg * end.kg + end.kn * end.kn
        tau_l = float(((end.kg * end.kn.d() - end.kg.d() * end.kn) / k2).value)
        return _line_of_curvature(fj.kg, fj.kn, tau_l).value
    return _asymptotic(fj.kg, fj.tg, float(end.tg.value)).value


def corollary_boundary(curve: CurveOnSurface, which: str):
    """Free-end conditions of the specialized problem, as residual values."""
    fj = frame_jets(curve, curve.length)
    kg, kn, tg = fj.kg, fj.kn, fj.tg
    if which == "geodesic":
        return tuple(float(x) for x in tg.derivs(2))
    if which == "line_of_curvature":
        k2 = kg * kg + kn * kn
        tau = (kg * kn.d() - kg.d() * kn) / k2
        g = tau / k2 * (kn.d() - 2 * kg * tau)
        h = kn * tau / k2
        return (float((g.d() + h.d(2)).value), float((g + h.d()).value), float((kn * tau).value))
    if which == "asymptotic":
        return (float(tg.value),)
    raise ValueError(f"unknown corollary {which!r}")


# ---------------------------------------------------------------------------
# Classification and verdict


@dataclass
class Classification:
    planar: bool
    geodesic: bool
    line_of_curvature: bool
    asymptotic: bool
    sup_tau: float
    sup_kg: float
    sup_tg: float
    sup_kn: float
    threshold: float

    @property
    def generic(self):
        return not (self.planar or self.geodesic or self.line_of_curvature or self.asymptotic)

    def labels(self):
        names = [n for n in ("planar",) + COROLLARIES if getattr(self, n)]
        return names or ["generic"]


def classify_curve(curve: CurveOnSurface, threshold: float | None = None, stations: int = 101) -> Classification:
    theta = default_threshold(curve) if threshold is None else threshold
    fj = frame_jets(curve, np.linspace(0.0, curve.length, stations), order=4)
    require_curvature(fj.kappa2.value, fj.s)
    sup = lambda j: float(np.max(np.abs(j.value)))
    st, sg, sgt, sn = sup(fj.tau), sup(fj.kg), sup(fj.tg), sup(fj.kn)
    return Classification(st <= theta, sg <= theta, sgt <= theta, sn <= theta, st, sg, sgt, sn, theta)


@dataclass
class Tolerances:
    E: float = 1e-6
    B: float = 1e-6
    classification: float | None = None


@dataclass
class ResidualReport:
    stations: np.ndarray
    E_values: np.ndarray
    E_normalized: np.ndarray
    B1: float
    B2: float
    B3: float
    B_normalized: tuple
    sup_E: float
    sup_E_normalized: float
    classification: Classification
    verdict: bool
    violated: list
    tolerances: Tolerances
    orientation_note: str
    corollaries: dict = field(default_factory=dict)
    reduced_accuracy: bool = False
    tau_at_l: float = 0.0

    def to_dict(self):
        c = self.classification
        return {
            "stations": [float(x) for x in self.stations],
            "E": [float(x) for x in self.E_values],
            "E_normalized": [float(x) for x in self.E_normalized],
            "sup_E": self.sup_E,
            "sup_E_normalized": self.sup_E_normalized,
            "B1": self.B1,
            "B2": self.B2,
            "B3": self.B3,
            "B_normalized": list(self.B_normalized),
            "tau_at_l": self.tau_at_l,
            "classification": {"labels": c.labels(), **asdict(c)},
            "corollaries": self.corollaries,
            "verdict": self.verdict,
            "violated": self.violated,
            "orientation": self.orientation_note,
            "tolerances": asdict(self.tolerances),
            "reduced_accuracy": self.reduced_accuracy,
        }


def verify_relaxed_elastic(curve: CurveOnSurface, tolerances: Tolerances | None = None,
                           stations: int = 101) -> ResidualReport:
    """Evaluate the Euler-Lagrange and free-end residuals and decide the verdict.

    E is normalized by max(1, sup kappa^3); B1, B2, B3 by max(1, sup kappa^k)
    with k = 2, 1, 2 matching their units.
    """
    tol = tolerances or Tolerances()
    s = np.linspace(0.0, curve.length, stations)
    fj = frame_jets(curve, s)
    require_curvature(fj.kappa2.value, s)
    tau_l = tau_at_end(curve)
    E = el_density(fj.kg, fj.kn, fj.tg, tau_l).value
    kmax = float(np.sqrt(np.max(fj.kappa2.value)))
    scale_E = max(1.0, kmax**3)
    B = boundary_residuals(curve)
    scale_B = (max(1.0, kmax**2), max(1.0, kmax), max(1.0, kmax**2))
    Bn = tuple(b / sc for b, sc in zip(B, scale_B))
    En = E / scale_E
    cls = classify_curve(curve, tol.classification, stations)

    violated = []
    if np.max(np.abs(En)) > tol.E:
        violated.append("E")
    for name, b in zip(("B1", "B2", "B3"), Bn):
        if abs(b) > tol.B:
            violated.append(name)

    cors = {}
    for which in COROLLARIES:
        if getattr(cls, which):
            r = corollary_residual(curve, which, s, threshold=cls.threshold)
            cors[which] = {
                "sup_residual": float(np.max(np.abs(r))),
                "boundary": [float(x) for x in corollary_boundary(curve, which)],
            }

    return ResidualReport(
        s, E, En, B[0], B[1], B[2], Bn, float(np.max(np.abs(E))), float(np.max(np.abs(En))),
        cls, not violated, violated, tol, curve.patch.orientation, cors,
        curve.reduced_accuracy, tau_l,
    )
