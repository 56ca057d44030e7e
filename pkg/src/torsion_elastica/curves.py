"""Curves on patches: arc length, Darboux frame invariants, Frenet oracles, energies."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import make_interp_spline

from .dsl import parse_expression
from .errors import ConfigError, ConvergenceError, CurvatureDegeneracyError, RegularityError
from .jets import DEFAULT_ORDER, Jet, JetVec3
from .quadrature import QuadratureSpec, QuadResult, _legendre, integrate
from .surfaces import SurfacePatch, normal_from_partials, partials, position

KAPPA_MIN = 1e-8
L_STAR_FACTOR = 1.05


@dataclass
class CurveOnSurface:
    """(u(s), v(s)) in a patch for 0 <= s <= l_star, analysed on [0, length].

    ``uv_fn`` maps a parameter jet to the pair of coordinate jets.  For
    ``param_kind == "general"`` the parameter is not arc length and
    ``length``/``l_star`` are bounds in that parameter; use
    :func:`reparameterize_arclength` before computing invariants.
    """

    patch: SurfacePatch
    uv_fn: Callable
    length: float
    l_star: float
    param_kind: str = "arc_length"
    reduced_accuracy: bool = False
    label: str = ""
    raw: "CurveOnSurface | None" = None
    arcmap: "ArcLengthMap | None" = field(default=None, repr=False)

    def __post_init__(self):
        if not self.length > 0:
            raise ConfigError("curve length must be positive")
        if not self.l_star >= self.length:
            raise ConfigError("extension must not be shorter than the curve")

    def uv(self, s):
        if not isinstance(s, Jet):
            s = Jet.constant(s, 0)
        u, v = self.uv_fn(s)
        zero = s * 0.0
        return u + zero, v + zero

    def point(self, s):
        u, v = self.uv(Jet.constant(np.asarray(s, dtype=float), 0))
        return u.value, v.value


def expression_curve(patch, u_expr, v_expr, length, extension=None, parameter="arc_length",
                     constants=None, label=""):
    consts = {"pi": np.pi}
    consts.update(constants or {})
    fu = parse_expression(u_expr, ("s",), consts)
    fv = parse_expression(v_expr, ("s",), consts)
    l_star = extension if extension is not None else L_STAR_FACTOR * length
    return CurveOnSurface(patch, lambda s: (fu(s), fv(s)), float(length), float(l_star),
                          parameter, label=label or f"({u_expr}, {v_expr})")


def function_curve(patch, uv_fn, length, extension=None, parameter="arc_length", label=""):
    l_star = extension if extension is not None else L_STAR_FACTOR * length
    return CurveOnSurface(patch, uv_fn, float(length), float(l_star), parameter, label=label)


class _TaylorSpline:
    """Quintic interpolating spline usable on jets (derivatives above 5 vanish)."""

    def __init__(self, x, y):
        self.spl = make_interp_spline(x, y, k=5)

    def __call__(self, t: Jet):
        K = t.order
        c = np.zeros((K + 1,) + t.shape)
        fact = 1.0
        for k in range(min(K, 5) + 1):
            if k:
                fact *= k
            c[k] = self.spl(t.value, nu=k) / fact
        return Jet(c).compose(t)


def spline_curve(patch, points, length=None, label="spline"):
    """Curve through (u, v) control points, lifted by quintic splines on [0, 1]."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 6:
        raise ConfigError("points must be at least 6 (u, v) pairs")
    sig = np.linspace(0.0, 1.0, len(pts))
    su, sv = _TaylorSpline(sig, pts[:, 0]), _TaylorSpline(sig, pts[:, 1])
    raw = CurveOnSurface(patch, lambda t: (su(t), sv(t)), 1.0, 1.0, "general", True, label)
    arc = reparameterize_arclength(raw)
    total = arc.l_star
    l = total / L_STAR_FACTOR if length is None else float(length)
    if not 0 < l < total:
        raise ConfigError(f"length {l} must lie inside the spline's arc length {total:.6g}")
    return replace(arc, length=l)


# ---------------------------------------------------------------------------
# Arc length


class ArcLengthMap:
    """Cumulative arc length s(sigma) of a general-parameter curve and its inverse."""

    def __init__(self, raw: CurveOnSurface, sigma_max: float, panels: int = 64, nodes: int = 20):
        self.raw = raw
        self.sigma_max = sigma_max
        self.edges = np.linspace(0.0, sigma_max, panels + 1)
        self.xg, self.wg = _legendre(nodes)
        lo, hi = self.edges[:-1], self.edges[1:]
        seg = self._panel_integral(lo, hi)
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def total(self):
        return self.cum[-1]

    def speed(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        u, v = self.raw.uv(Jet.variable(sigma, 1))
        a = position(self.raw.patch, u, v).deriv(1)
        return np.sqrt((a * a).sum(axis=0))

    def _panel_integral(self, lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = mid[..., None] + half[..., None] * self.xg
        return half * (self.speed(x) * self.wg).sum(axis=-1)

    def s_of_sigma(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        idx = np.clip(np.searchsorted(self.edges, sigma, side="right") - 1, 0, len(self.edges) - 2)
        return self.cum[idx] + self._panel_integral(self.edges[idx], sigma)

    def sigma_of_s(self, s, tol=1e-15, maxiter=30):
        s = np.asarray(s, dtype=float)
        sigma = np.interp(s, self.cum, self.edges)
        for _ in range(maxiter):
            step = (self.s_of_sigma(sigma) - s) / self.speed(sigma)
            sigma = sigma - step
            if np.all(np.abs(step) <= tol * (1.0 + np.abs(sigma))):
                return sigma
        if np.all(np.abs(step) <= 1e-12 * (1.0 + np.abs(sigma))):
            return sigma
        raise ConvergenceError("arc-length inversion did not converge")

    def sigma_jet(self, s: Jet) -> Jet:
        """Taylor jet of sigma(s) by reversion of the arc-length series."""
        K = s.order
        sigma0 = self.sigma_of_s(s.value)
        if K == 0:
            return Jet(sigma0[None] if np.ndim(sigma0) else np.array([sigma0]))
        u, v = self.raw.uv(Jet.variable(sigma0, K))
        sp = position(self.raw.patch, u, v).d().norm()
        a = [None] + [sp.c[k - 1] / k for k in range(1, K + 1)]
        delta = Jet.variable(np.zeros_like(sigma0), K)
        h = delta / a[1]
        for _ in range(K - 1):
            tail = Jet.constant(a[K], K)
            for k in range(K - 1, 1, -1):
                tail = tail * h + a[k]
            h = (delta - tail * h * h) / a[1]
        c = h.c.copy()
        c[0] = sigma0
        return Jet(c).compose(s)


def reparameterize_arclength(curve: CurveOnSurface, tol: float = 1e-12) -> CurveOnSurface:
    if curve.param_kind == "arc_length":
        check_unit_speed(curve)
        return curve
    arc = ArcLengthMap(curve, curve.l_star)
    sig = np.linspace(0.0, curve.l_star, 257)
    if np.min(arc.speed(sig)) < 1e-10:
        raise RegularityError("curve speed vanishes; cannot reparameterize by arc length")
    l = float(arc.s_of_sigma(curve.length)) if curve.length < curve.l_star else arc.total
    out = CurveOnSurface(
        curve.patch,
        lambda s: curve.uv(arc.sigma_jet(s)),
        l,
        float(arc.total),
        "arc_length",
        curve.reduced_accuracy,
        curve.label,
        raw=curve,
        arcmap=arc,
    )
    check_unit_speed(out, tol=max(1e-9, 1e3 * tol))
    return out


def check_unit_speed(curve: CurveOnSurface, stations: int = 64, tol: float = 1e-8):
    s = np.linspace(0.0, curve.l_star, stations)
    u, v = curve.uv(Jet.variable(s, 1))
    curve.patch.check_domain(u.value, v.value)
    a = position(curve.patch, u, v).deriv(1)
    sp = np.sqrt((a * a).sum(axis=0))
    err = np.max(np.abs(sp - 1.0))
    if err > tol:
        raise ConfigError(
            f"curve is not unit speed (max |speed - 1| = {err:.3g}); declare parameter 'general'"
        )


# ---------------------------------------------------------------------------
# Darboux frame


@dataclass
class FrameJets:
    s: np.ndarray
    u: Jet
    v: Jet
    alpha: JetVec3
    xu: JetVec3
    xv: JetVec3
    T: JetVec3
    Q: JetVec3
    n: JetVec3
    kg: Jet
    kn: Jet
    tg: Jet

    @property
    def kappa2(self):
        return self.kg * self.kg + self.kn * self.kn

    @property
    def tau(self):
        kg, kn = self.kg, self.kn
        return self.tg + (kg * kn.d() - kg.d() * kn) / self.kappa2

    def pq(self):
        """Components of Q in the coordinate basis: Q = p x_u + q x_v."""
        E, F, G = self.xu.dot(self.xu), self.xu.dot(self.xv), self.xv.dot(self.xv)
        qu, qv = self.Q.dot(self.xu), self.Q.dot(self.xv)
        det = E * G - F * F
        return (G * qu - F * qv) / det, (E * qv - F * qu) / det


def frame_jets(curve: CurveOnSurface, s, order: int = DEFAULT_ORDER) -> FrameJets:
    """Frame and invariants as jets in arc length (kg, kn, tg keep order - 2)."""
    s = np.asarray(s, dtype=float)
    sj = Jet.variable(s, order)
    u, v = curve.uv(sj)
    curve.patch.check_domain(u.value, v.value)
    x, xu, xv = partials(curve.patch, u, v)
    n = normal_from_partials(curve.patch, xu, xv)
    T = x.d()
    Q = n.cross(T)
    Tp = T.d()
    return FrameJets(s, u, v, x, xu, xv, T, Q, n, Tp.dot(Q), Tp.dot(n), Q.d().dot(n))


def require_curvature(kappa2, s, kappa_min=KAPPA_MIN):
    bad = np.atleast_1d(kappa2 < kappa_min**2)
    if np.any(bad):
        st = np.atleast_1d(s)[bad] if np.ndim(s) else [float(s)]
        raise CurvatureDegeneracyError(
            f"curvature below {kappa_min:g} at s = {np.asarray(st)[:5]}", st
        )


@dataclass
class DarbouxState:
    s: np.ndarray
    T: np.ndarray
    Q: np.ndarray
    n: np.ndarray
    p: np.ndarray
    q: np.ndarray
    kg: np.ndarray
    kn: np.ndarray
    tg: np.ndarray
    kappa2: np.ndarray
    tau: np.ndarray


def darboux_state(curve: CurveOnSurface, s, order: int = DEFAULT_ORDER) -> DarbouxState:
    """Darboux frame and invariants with s-derivatives up to order 3.

    Arrays carry a leading derivative axis (length 4) for kg, kn, tg, tau
    and a leading component axis for T, Q, n; trailing axes follow ``s``.
    """
    if order < 6:
        raise ValueError("darboux_state needs jet order >= 6")
    fj = frame_jets(curve, s, order)
    k2 = fj.kappa2
    require_curvature(k2.value, fj.s)
    p, q = fj.pq()
    return DarbouxState(
        fj.s, fj.T.value, fj.Q.value, fj.n.value, p.value, q.value,
        fj.kg.derivs(3), fj.kn.derivs(3), fj.tg.derivs(3), k2.value, fj.tau.derivs(3),
    )


def frenet_oracles(curve: CurveOnSurface, s):
    """Frenet curvature and torsion straight from the embedded curve.

    For reparameterized curves the original parameter is used; both values
    are invariant under reparameterization.
    """
    s = np.asarray(s, dtype=float)
    if curve.raw is not None:
        src, t = curve.raw, curve.arcmap.sigma_of_s(s)
    else:
        src, t = curve, s
    u, v = src.uv(Jet.variable(t, 3))
    a = position(src.patch, u, v)
    d1, d2, d3 = a.deriv(1), a.deriv(2), a.deriv(3)
    c = np.cross(d1, d2, axis=0)
    c2 = (c * c).sum(axis=0)
    sp = np.sqrt((d1 * d1).sum(axis=0))
    kappa = np.sqrt(c2) / sp**3
    if np.any(kappa <= 1e-9):
        raise CurvatureDegeneracyError("Frenet curvature vanishes; torsion undefined", np.atleast_1d(s)[np.atleast_1d(kappa <= 1e-9)])
    tau = (c * d3).sum(axis=0) / c2
    return kappa, tau


# ---------------------------------------------------------------------------
# Energies


def _invariant_integrand(curve, which):
    def f(s):
        fj = frame_jets(curve, s, order=3)
        k2 = fj.kappa2
        require_curvature(k2.value, s)
        if which == "kappa2":
            return k2.value
        return fj.tau.value ** 2
    return f


def total_square_torsion(curve: CurveOnSurface, quad: QuadratureSpec = QuadratureSpec()) -> QuadResult:
    """F = integral of tau^2 ds over [0, l]."""
    return integrate(_invariant_integrand(curve, "tau2"), 0.0, curve.length, quad)


def total_square_curvature(curve: CurveOnSurface, quad: QuadratureSpec = QuadratureSpec()) -> QuadResult:
    """K = integral of kappa^2 ds over [0, l]."""
    return integrate(_invariant_integrand(curve, "kappa2"), 0.0, curve.length, quad)


def curve_from_config(cfg: dict, patch: SurfacePatch) -> CurveOnSurface:
    if "points" in cfg:
        return spline_curve(patch, cfg["points"], cfg.get("length"))
    try:
        curve = expression_curve(
            patch, cfg["u"], cfg["v"], cfg["length"], cfg.get("extension"),
            cfg.get("parameter", "arc_length"),
        )
    except KeyError as exc:
        raise ConfigError(f"curve spec is missing key {exc}") from None
    return reparameterize_arclength(curve)
