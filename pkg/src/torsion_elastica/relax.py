"""Constrained minimization of total square torsion over curves of fixed length.

A discrete curve in chart coordinates is the polynomial

    P(sigma) = P0 + sigma r w + sigma^2 sum_k c_k T_k(2 sigma - 1),  0 <= sigma <= 1,

of degree N - 1, where T_k are Chebyshev polynomials, P0 is the pinned initial
point and w the pinned initial chart direction.  Its ``nodes`` are the values
at the N Chebyshev-Lobatto points.  The free coordinates are r and the c_k
(2N - 3 numbers); the length constraint is restored after every step by
scaling P - P0 about the initial point, which leaves P0 and the initial
direction untouched.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import chebyshev as C

from .curves import KAPPA_MIN, CurveOnSurface, reparameterize_arclength
from .elastic import ResidualReport, Tolerances, verify_relaxed_elastic
from .errors import ConfigError, ConvergenceError, CurvatureDegeneracyError, GeometryError
from .jets import Jet
from .quadrature import QuadratureSpec, nodes_and_weights
from .surfaces import SurfacePatch, position

log = logging.getLogger(__name__)

MIN_NODES = 12
DESCENT_SLACK = 1e-12  # relative below F = 1, absolute above
EXTENSION = 1.05


def lobatto(N: int) -> np.ndarray:
    """Chebyshev-Lobatto points mapped to [0, 1], increasing."""
    return 0.5 * (1.0 - np.cos(np.pi * np.arange(N) / (N - 1)))


@dataclass
class DiscreteCurve:
    patch: SurfacePatch
    P0: np.ndarray
    w: np.ndarray
    r: float
    coeffs: np.ndarray  # (N - 2, 2)
    length_target: float

    @property
    def N(self):
        return self.coeffs.shape[0] + 2

    @property
    def z(self):
        return np.concatenate([[self.r], self.coeffs.ravel()])

    def with_z(self, z):
        return replace(self, r=float(z[0]), coeffs=np.asarray(z[1:], float).reshape(-1, 2))

    def series(self):
        """Chebyshev coefficients in x = 2 sigma - 1 of (u, v), shape (N, 2)."""
        sig = np.array([0.5, 0.5])  # sigma as a series in x
        sig2 = C.chebmul(sig, sig)
        out = np.zeros((self.N, 2))
        for j in range(2):
            d = C.chebadd(self.r * self.w[j] * sig, C.chebmul(sig2, self.coeffs[:, j]))
            d = C.chebadd(d, [self.P0[j]])
            out[: len(d), j] = d
        return out

    def uv_derivs(self, sigma, order):
        """Values and sigma-derivatives of (u, v) up to ``order``: shape (order+1, 2, ...)."""
        x = 2.0 * np.asarray(sigma, float) - 1.0
        ser = self.series()
        out = []
        for k in range(order + 1):
            dk = C.chebder(ser, k, axis=0) * 2.0**k if k else ser
            out.append(np.stack([C.chebval(x, dk[:, 0]), C.chebval(x, dk[:, 1])]))
        return np.array(out)

    def uv_jets(self, sigma, order):
        d = self.uv_derivs(sigma, order)
        fact = np.cumprod([1.0] + list(range(1, order + 1)))
        c = d / fact.reshape((-1,) + (1,) * (d.ndim - 1))
        return Jet(c[:, 0]), Jet(c[:, 1])

    @property
    def nodes(self):
        return self.uv_derivs(lobatto(self.N), 0)[0].T

    def uv_fn(self, s: Jet):
        """(u, v) on an arbitrary parameter jet."""
        u, v = self.uv_jets(s.value, max(s.order, 0))
        return u.compose(s) if s.order else u, v.compose(s) if s.order else v

    def to_curve(self, label="relaxed") -> CurveOnSurface:
        """General-parameter curve on [0, 1] (extended to allow end derivatives)."""
        return CurveOnSurface(self.patch, self.uv_fn, 1.0, EXTENSION, "general", label=label)

    def to_dict(self):
        return {
            "P0": self.P0.tolist(),
            "w": self.w.tolist(),
            "r": self.r,
            "coeffs": self.coeffs.tolist(),
            "nodes": self.nodes.tolist(),
            "length_target": self.length_target,
        }


# ---------------------------------------------------------------------------
# Geometry of a discrete curve


_QUAD = QuadratureSpec(nodes=16, panels=8)


def _frenet(dc: DiscreteCurve, sigma):
    u, v = dc.uv_jets(sigma, 3)
    dc.patch.check_domain(u.value, v.value)
    a = position(dc.patch, u, v)
    d1, d2, d3 = a.deriv(1), a.deriv(2), a.deriv(3)
    c = np.cross(d1, d2, axis=0)
    c2 = (c * c).sum(axis=0)
    sp = np.sqrt((d1 * d1).sum(axis=0))
    return sp, c2 / sp**6, (c * d3).sum(axis=0) / np.where(c2 > 0, c2, 1.0)


def curve_length(dc: DiscreteCurve, quad: QuadratureSpec = _QUAD) -> float:
    x, w = nodes_and_weights(0.0, 1.0, quad)
    u, v = dc.uv_jets(x, 1)
    d1 = position(dc.patch, u, v).deriv(1)
    return float(np.dot(w, np.sqrt((d1 * d1).sum(axis=0))))


def torsion_residuals(dc: DiscreteCurve, quad: QuadratureSpec = _QUAD) -> np.ndarray:
    """r_i with sum r_i^2 = int tau^2 ds; raises on curvature degeneracy."""
    x, w = nodes_and_weights(0.0, 1.0, quad)
    sp, k2, tau = _frenet(dc, x)
    if np.any(k2 < KAPPA_MIN**2):
        raise CurvatureDegeneracyError("curvature vanishes along the iterate", x[k2 < KAPPA_MIN**2])
    return np.sqrt(w * sp) * tau


def total_square_torsion(dc: DiscreteCurve, quad: QuadratureSpec = _QUAD) -> float:
    r = torsion_residuals(dc, quad)
    return float(r @ r)


# ---------------------------------------------------------------------------
# Constraints


def _direction(d):
    w = np.asarray(d, float)
    nrm = np.hypot(*w)
    if not nrm > 0:
        raise GeometryError("degenerate initial direction")
    return w / nrm


def discretize(curve: CurveOnSurface, N: int) -> DiscreteCurve:
    """Least-squares polynomial fit of an arc-length curve, sigma = s / l."""
    if N < MIN_NODES:
        raise ConfigError(f"node count {N} below minimum {MIN_NODES}")
    l = curve.length
    u, v = curve.uv(Jet.variable(np.array([0.0]), 1))
    P0 = np.array([u.value[0], v.value[0]])
    d0 = np.array([u.c[1, 0], v.c[1, 0]]) * l
    w = _direction(d0)
    r = float(np.hypot(*d0))
    sig = lobatto(4 * N)
    pu, pv = curve.point(sig * l)
    rest = np.stack([pu, pv], axis=1) - P0 - np.outer(sig * r, w)
    basis = C.chebvander(2 * sig - 1, N - 3) * (sig**2)[:, None]
    coeffs, *_ = np.linalg.lstsq(basis[1:], rest[1:], rcond=None)
    dc = DiscreteCurve(curve.patch, P0, w, r, coeffs, float(l))
    return project_constraints(dc)


def project_constraints(dc: DiscreteCurve, tol: float = 1e-13, maxiter: int = 50) -> DiscreteCurve:
    """Scale P - P0 so that the length equals the target."""
    l = dc.length_target
    L = curve_length(dc)
    if abs(L - l) <= tol * l:
        return dc
    if not L > 0:
        raise ConvergenceError("curve collapsed; cannot restore length")
    g0, L0 = 1.0, L
    g1 = l / L
    for _ in range(maxiter):
        L1 = curve_length(dc.with_z(g1 * dc.z))
        if abs(L1 - l) <= tol * l:
            return dc.with_z(g1 * dc.z)
        if L1 == L0:
            break
        g0, g1, L0 = g1, g1 + (l - L1) * (g1 - g0) / (L1 - L0), L1
        if not g1 > 0:
            break
    raise ConvergenceError("length projection did not converge")


# ---------------------------------------------------------------------------
# Optimizer


@dataclass
class RelaxConfig:
    """Optimizer settings.

    The merit function is F plus ``speed_weight``^2 times the squared
    deviation of |alpha'| from the target length.  The second part pins the
    parameterization (equal arc length per unit sigma) without touching the
    geometry, which removes the tangential near-null directions of F.
    """

    N: int = 32
    max_iters: int = 500
    step_rule: str = "armijo"       # or "fixed"
    direction: str = "gauss_newton"  # or "gradient"
    fixed_step: float = 1e-2
    armijo_c: float = 1e-4
    fd_step: float = 1e-7
    f_tol: float = 1e-28
    grad_tol: float = 1e-30
    stall_iters: int = 8
    max_rejections: int = 20
    damping: float = 1e-3
    speed_weight: float = 1.0
    restarts: int = 0
    restart_scale: float = 1e-3
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.N < MIN_NODES:
            raise ConfigError(f"node count {self.N} below minimum {MIN_NODES}")
        if self.step_rule not in ("armijo", "fixed"):
            raise ConfigError(f"unknown step rule {self.step_rule!r}")
        if self.direction not in ("gauss_newton", "gradient"):
            raise ConfigError(f"unknown direction {self.direction!r}")
        if self.max_iters < 0 or self.max_rejections < 1:
            raise ConfigError("max_iters must be >= 0 and max_rejections >= 1")


@dataclass
class RelaxResult:
    curve: DiscreteCurve
    history: list
    report: ResidualReport | None
    status: str
    iterations: int
    message: str = ""

    @property
    def verdict(self):
        return bool(self.report is not None and self.report.verdict)


def _residuals(dc, cfg):
    x, w = nodes_and_weights(0.0, 1.0, _QUAD)
    sp, k2, tau = _frenet(dc, x)
    if np.any(k2 < KAPPA_MIN**2):
        raise CurvatureDegeneracyError("curvature vanishes along the iterate", x[k2 < KAPPA_MIN**2])
    rt = np.sqrt(w * sp) * tau
    return rt, cfg.speed_weight * np.sqrt(w) * (sp - dc.length_target)


class _Point:
    """Projected iterate with its residuals; ``ok`` is False outside the admissible set."""

    def __init__(self, dc, z, cfg):
        try:
            self.dc = project_constraints(dc.with_z(z))
            rt, rs = _residuals(self.dc, cfg)
        except GeometryError:
            self.ok = False
            return
        self.ok = True
        self.r = np.concatenate([rt, rs])
        self.F = float(rt @ rt)
        self.phi = float(self.r @ self.r)


def _jacobian(dc, z, cfg):
    cols = []
    for i in range(len(z)):
        step = cfg.fd_step * max(1.0, abs(z[i]))
        zp, zm = z.copy(), z.copy()
        zp[i] += step
        zm[i] -= step
        a, b = _Point(dc, zp, cfg), _Point(dc, zm, cfg)
        if not (a.ok and b.ok):
            raise CurvatureDegeneracyError("finite-difference probe left the admissible set")
        cols.append((a.r - b.r) / (2 * step))
    return np.array(cols).T


def _descend(dc: DiscreteCurve, cfg: RelaxConfig):
    cur = _Point(dc, dc.z, cfg)
    if not cur.ok:
        raise CurvatureDegeneracyError("starting curve is degenerate")
    history = [cur.F]
    status, msg, stall, lam, it = "max_iters", "", 0, cfg.damping, 0
    for it in range(1, cfg.max_iters + 1):
        if cur.F <= cfg.f_tol:
            status, it = "converged", it - 1
            break
        z = cur.dc.z
        try:
            J = _jacobian(cur.dc, z, cfg)
        except CurvatureDegeneracyError as exc:
            status, msg, it = "degenerate", str(exc), it - 1
            break
        g = J.T @ cur.r  # half the merit gradient
        if np.linalg.norm(g) <= cfg.grad_tol:
            status, it = "converged", it - 1
            break
        if cfg.direction == "gauss_newton":
            A = J.T @ J
            d = -np.linalg.solve(A + lam * np.diag(np.diag(A) + 1e-300), g)
        else:
            d = -g
        slope = 2.0 * float(g @ d)
        alpha = 1.0 if cfg.step_rule == "armijo" else cfg.fixed_step
        new = None
        for k in range(cfg.max_rejections):
            trial = _Point(cur.dc, z + alpha * d, cfg)
            if trial.ok and trial.F <= cur.F + DESCENT_SLACK * min(1.0, cur.F) and (
                trial.phi <= cur.phi + cfg.armijo_c * alpha * slope
                if cfg.step_rule == "armijo" else trial.phi < cur.phi
            ):
                new = trial
                break
            alpha *= 0.5
            lam *= 4.0
        if new is None:
            status, msg = "line_search_failed", f"no acceptable step after {cfg.max_rejections} halvings"
            it -= 1
            break
        if alpha == 1.0:
            lam = max(lam / 3.0, 1e-15)
        stall = stall + 1 if cur.phi - new.phi <= 1e-14 * cur.phi else 0
        cur = new
        history.append(cur.F)
        log.debug("iter %d F=%.3e phi=%.3e alpha=%.2e", it, cur.F, cur.phi, alpha)
        if stall >= cfg.stall_iters:
            status = "stalled"
            break
    return cur.dc, history, status, msg, it


def relax(dc: DiscreteCurve, cfg: RelaxConfig = RelaxConfig()) -> RelaxResult:
    """Minimize F from ``dc``, then certify the terminal curve.

    F history is monotone non-increasing: steps are only accepted when they
    satisfy the decrease rule.
    """
    dc = project_constraints(dc)
    best = _descend(dc, cfg)
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.restarts):
        z = dc.z + cfg.restart_scale * rng.standard_normal(dc.z.shape) * np.maximum(1.0, np.abs(dc.z))
        start = _Point(dc, z, cfg)
        if not start.ok:
            continue
        try:
            cand = _descend(start.dc, cfg)
        except GeometryError:
            continue
        if cand[1][-1] < best[1][-1]:
            best = cand
    out, history, status, msg, it = best
    report = None
    try:
        report = certify(out, cfg.tolerances)
    except GeometryError as exc:
        msg = (msg + "; " if msg else "") + f"certification failed: {exc}"
    return RelaxResult(out, history, report, status, it, msg)


def certify(dc: DiscreteCurve, tolerances: Tolerances | None = None, stations: int = 101) -> ResidualReport:
    return verify_relaxed_elastic(reparameterize_arclength(dc.to_curve()), tolerances, stations)


def config_hash(cfg_dict) -> str:
    return hashlib.sha256(json.dumps(cfg_dict, sort_keys=True).encode()).hexdigest()


def checkpoint(result: RelaxResult, cfg_dict=None) -> dict:
    return {
        "curve": result.curve.to_dict(),
        "history": [float(f) for f in result.history],
        "status": result.status,
        "iterations": result.iterations,
        "message": result.message,
        "verdict": result.verdict,
        "config_sha256": config_hash(cfg_dict or {}),
        "orientation": result.curve.patch.orientation,
    }
