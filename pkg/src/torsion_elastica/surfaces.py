"""Oriented parametric surface patches x(u, v) evaluated on jets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .dsl import SurfaceAst, parse_expression, parse_surface
from .errors import ConfigError, DomainError, RegularityError
from .jets import Dual, Jet, JetVec3

REGULARITY_TOL = 1e-12
INF = math.inf


@dataclass(frozen=True)
class SurfacePatch:
    """A single coordinate patch.

    ``domain`` is ((u_min, u_max), (v_min, v_max)); infinite bounds mark
    unbounded or periodic coordinates.  The unit normal is
    ``(x_u x x_v) / |x_u x x_v|``, negated when ``flip`` is set.
    """

    kind: str
    params: dict = field(default_factory=dict)
    domain: tuple = ((-INF, INF), (-INF, INF))
    flip: bool = False
    ast: SurfaceAst | None = None
    height: object = None

    def map(self, u, v):
        k, p = self.kind, self.params
        if k == "plane":
            return u, v, u * 0.0
        if k == "sphere":
            R = p["R"]
            su = jets.sin(u)
            return R * su * jets.cos(v), R * su * jets.sin(v), R * jets.cos(u)
        if k == "cylinder":
            r = p["r"]
            return r * jets.cos(u), r * jets.sin(u), v + u * 0.0
        if k == "torus":
            R, r = p["R"], p["r"]
            w = R + r * jets.cos(u)
            return w * jets.cos(v), w * jets.sin(v), r * jets.sin(u) + v * 0.0
        if k == "graph":
            return u + v * 0.0, v + u * 0.0, self.height(u, v) + (u + v) * 0.0
        if k == "dsl":
            return tuple(c + (u + v) * 0.0 for c in self.ast(u, v))
        raise ConfigError(f"unknown surface kind {k!r}")

    @property
    def orientation(self):
        sign = "-" if self.flip else "+"
        return f"n = {sign}(x_u x x_v)/|x_u x x_v|"

    def dsl_text(self):
        """Defining expression in the DSL with numeric parameters substituted."""
        k, p = self.kind, self.params
        if k == "plane":
            return "(u, v, 0)"
        if k == "sphere":
            R = repr(float(p["R"]))
            return f"({R}*sin(u)*cos(v), {R}*sin(u)*sin(v), {R}*cos(u))"
        if k == "cylinder":
            r = repr(float(p["r"]))
            return f"({r}*cos(u), {r}*sin(u), v)"
        if k == "torus":
            R, r = repr(float(p["R"])), repr(float(p["r"]))
            return f"(({R}+{r}*cos(u))*cos(v), ({R}+{r}*cos(u))*sin(v), {r}*sin(u))"
        if k == "graph":
            return f"(u, v, {self.height.text})"
        return self.ast.text

    def check_domain(self, u0, v0):
        (umin, umax), (vmin, vmax) = self.domain
        u0, v0 = np.broadcast_arrays(np.asarray(u0, dtype=float), np.asarray(v0, dtype=float))
        ok = (u0 > umin) & (u0 < umax) & (v0 > vmin) & (v0 < vmax)
        if not np.all(ok):
            i = np.flatnonzero(~ok.ravel())[0]
            raise DomainError(
                f"point (u, v) = ({u0.ravel()[i]:.6g}, {v0.ravel()[i]:.6g}) "
                f"outside {self.kind} domain {self.domain}"
            )

    def boundary_margin(self, u0, v0):
        (umin, umax), (vmin, vmax) = self.domain
        u0 = np.asarray(u0, dtype=float)
        v0 = np.asarray(v0, dtype=float)
        return np.minimum.reduce([u0 - umin, umax - u0, v0 - vmin, vmax - v0])


def _vec(parts, like):
    zero = like * 0.0
    out = []
    for p in parts:
        if isinstance(p, Jet):
            out.append(p + zero)
        else:
            out.append(zero + p)
    return JetVec3(*out)


def _as_jets(u, v):
    if not isinstance(u, Jet):
        u = Jet.constant(u, 0)
    if not isinstance(v, Jet):
        v = Jet.constant(v, u.order)
    return u, v


def position(patch: SurfacePatch, u: Jet, v: Jet) -> JetVec3:
    """x(u, v) without checks (hot path)."""
    return _vec(patch.map(u, v), u + v)


def partials(patch: SurfacePatch, u: Jet, v: Jet):
    """(x, x_u, x_v) as jets in the parameter carried by u and v."""
    like = u + v
    du = patch.map(Dual(u, 1.0), Dual(v, 0.0))
    dv = patch.map(Dual(u, 0.0), Dual(v, 1.0))
    x = _vec([Dual._parts(c)[0] for c in du], like)
    xu = _vec([Dual._parts(c)[1] for c in du], like)
    xv = _vec([Dual._parts(c)[1] for c in dv], like)
    return x, xu, xv


def _check_regular(xu, xv):
    w = xu.cross(xv).value
    nrm = np.sqrt((w * w).sum(axis=0))
    if np.any(nrm < REGULARITY_TOL):
        raise RegularityError(f"|x_u x x_v| = {np.min(nrm):.3g} below {REGULARITY_TOL:g}")


def eval_patch(patch: SurfacePatch, u, v) -> JetVec3:
    u, v = _as_jets(u, v)
    patch.check_domain(u.value, v.value)
    x, xu, xv = partials(patch, u.truncate(0) if u.order else u, v.truncate(0) if v.order else v)
    _check_regular(xu, xv)
    return position(patch, u, v)


def normal_from_partials(patch: SurfacePatch, xu: JetVec3, xv: JetVec3) -> JetVec3:
    _check_regular(xu, xv)
    n = xu.cross(xv).normalized()
    return -n if patch.flip else n


def unit_normal(patch: SurfacePatch, u, v) -> JetVec3:
    u, v = _as_jets(u, v)
    patch.check_domain(u.value, v.value)
    _, xu, xv = partials(patch, u, v)
    return normal_from_partials(patch, xu, xv)


# ---------------------------------------------------------------------------
# Builders


def plane(flip=False):
    return SurfacePatch("plane", {}, ((-INF, INF), (-INF, INF)), flip)


def sphere(R=1.0, flip=False):
    # v is the periodic longitude; only the colatitude has a chart boundary
    return SurfacePatch("sphere", {"R": float(R)}, ((0.0, math.pi), (-INF, INF)), flip)


def cylinder(r=1.0, flip=False):
    return SurfacePatch("cylinder", {"r": float(r)}, ((-INF, INF), (-INF, INF)), flip)


def torus(R=2.0, r=1.0, flip=False):
    if not R > r > 0:
        raise ConfigError("torus needs R > r > 0")
    return SurfacePatch("torus", {"R": float(R), "r": float(r)}, ((-INF, INF), (-INF, INF)), flip)


def graph(expr: str, domain=((-INF, INF), (-INF, INF)), flip=False):
    f = parse_expression(expr, ("u", "v"))
    return SurfacePatch("graph", {"f": expr}, _domain(domain), flip, height=f)


def from_dsl(text: str, domain=((-INF, INF), (-INF, INF)), flip=False):
    return SurfacePatch("dsl", {"expr": text}, _domain(domain), flip, ast=parse_surface(text))


def _bound(x, default):
    if x is None:
        return default
    return float(x)


def _domain(d):
    (a, b), (c, e) = d
    return ((_bound(a, -INF), _bound(b, INF)), (_bound(c, -INF), _bound(e, INF)))


def patch_from_config(cfg: dict) -> SurfacePatch:
    kind = cfg.get("kind")
    params = cfg.get("params", {})
    flip = bool(cfg.get("flip", False))
    domain = cfg.get("domain", [[None, None], [None, None]])
    try:
        if kind == "plane":
            return plane(flip)
        if kind == "sphere":
            return sphere(params.get("R", 1.0), flip)
        if kind == "cylinder":
            return cylinder(params.get("r", 1.0), flip)
        if kind == "torus":
            return torus(params.get("R", 2.0), params.get("r", 1.0), flip)
        if kind == "graph":
            return graph(cfg["expr"], domain, flip)
        if kind == "dsl":
            return from_dsl(cfg["expr"], domain, flip)
    except KeyError as exc:
        raise ConfigError(f"surface of kind {kind!r} is missing key {exc}") from None
    raise ConfigError(f"unknown surface kind {kind!r}")
