"""Length-preserving variations inside the surface and the first variation of F.

A field mu on [0, l_star] displaces the base curve along its tangential
normal Q.  The displacement is pulled back to the chart, Q = p x_u + q x_v,
so every member of the family

    beta(sigma; t) = x(u + t mu p, v + t mu q)

stays on the surface.  The constrained length fixes the upper limit lambda(t)
through int_0^lambda |beta_sigma| = l, and the family functional is
F(t) = int_0^lambda tau_beta^2 dsigma.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .curves import KAPPA_MIN, CurveOnSurface, frame_jets
from .dsl import parse_expression
from .elastic import boundary_residuals, el_density, tau_at_end
from .errors import BracketError, ConfigError, CurvatureDegeneracyError, EndpointConditionError
from .fd import FDResult, richardson_derivative
from .jets import Jet
from .quadrature import QuadratureSpec, _legendre, integrate, nodes_and_weights
from .surfaces import position

ENDPOINT_TOL = 1e-12


@dataclass
class VariationField:
    """Scalar field mu(s) acting on jets; ``breakpoints`` mark non-smooth points."""

    mu: Callable[[Jet], Jet]
    label: str = ""
    breakpoints: tuple = ()

    def __call__(self, s):
        if isinstance(s, Jet):
            return self.mu(s) + s * 0.0
        sj = Jet.constant(np.asarray(s, dtype=float), 0)
        return (self.mu(sj) + sj * 0.0).value

    def derivs(self, s, n=2):
        sj = Jet.variable(np.asarray(s, dtype=float), n)
        return (self.mu(sj) + sj * 0.0).derivs(n)


def polynomial_field(coeffs: Sequence[float]) -> VariationField:
    coeffs = [float(c) for c in coeffs]

    def mu(s):
        out = s * 0.0 + coeffs[-1]
        for c in reversed(coeffs[:-1]):
            out = out * s + c
        return out

    return VariationField(mu, "poly" + str(coeffs))


def bump_field(a: float, b: float, power: int = 4) -> VariationField:
    """((s - a)(b - s))^power on [a, b], zero elsewhere, normalized to peak 1."""
    if not b > a:
        raise ConfigError("bump needs a < b")
    scale = (0.5 * (b - a)) ** (-2 * power)

    def mu(s):
        g = ((s - a) * (b - s)) ** power * scale
        inside = (s.value > a) & (s.value < b)
        return Jet(g.c * inside)

    return VariationField(mu, f"bump[{a},{b}]^{power}", (float(a), float(b)))


def make_variation_field(spec, curve: CurveOnSurface) -> VariationField:
    """Build and validate mu from an expression, coefficient list, bump spec or field.

    Expressions are in ``s`` and may use the constants ``l`` (curve length)
    and ``pi``.  mu, mu' and mu'' must vanish at s = 0 and mu must not vanish
    identically on [0, l].
    """
    if isinstance(spec, VariationField):
        fld = spec
    elif isinstance(spec, str):
        e = parse_expression(spec, ("s",), {"l": curve.length, "pi": np.pi})
        fld = VariationField(lambda s: e(s), spec)
    elif isinstance(spec, dict) and "bump" in spec:
        a, b = spec["bump"]
        fld = bump_field(a, b, int(spec.get("power", 4)))
    elif isinstance(spec, dict) and "poly" in spec:
        fld = polynomial_field(spec["poly"])
    elif isinstance(spec, (list, tuple)):
        fld = polynomial_field(spec)
    else:
        raise ConfigError(f"cannot build a variation field from {spec!r}")

    d = fld.derivs(0.0, 2)
    failed = [name for name, x in zip(("mu(0)", "mu'(0)", "mu''(0)"), d) if abs(x) > ENDPOINT_TOL]
    if failed:
        vals = ", ".join(f"{n} = {x:.3g}" for n, x in zip(("mu(0)", "mu'(0)", "mu''(0)"), d))
        raise EndpointConditionError(f"field {fld.label!r} violates the clamped end: {vals}", failed)
    probe = fld(np.linspace(0.0, curve.length, 257))
    if not np.any(np.abs(probe) > 0):
        raise EndpointConditionError(f"field {fld.label!r} vanishes identically", ["mu != 0"])
    return fld


# ---------------------------------------------------------------------------
# The family


@dataclass
class VariationFamily:
    base: CurveOnSurface
    field: VariationField
    eps: float
    panels: int = 16
    nodes: int = 24

    @property
    def breakpoints(self):
        return tuple(b for b in self.field.breakpoints if 0 < b < self.base.l_star)


def _lift(family: VariationFamily, sigma, order: int):
    """Base coordinates and chart displacement (eta, zeta) as jets of ``order``."""
    fj = frame_jets(family.base, sigma, max(order + 1, 2))
    p, q = fj.pq()
    mu = family.field(Jet.variable(fj.s, order))
    u, v = fj.u.truncate(order), fj.v.truncate(order)
    return u, v, mu * p, mu * q


def beta_jets(family: VariationFamily, sigma, t: float, order: int = 3):
    """beta(sigma; t) as a jet in sigma."""
    u, v, eta, zeta = _lift(family, sigma, order)
    U, V = u + t * eta, v + t * zeta
    family.base.patch.check_domain(U.value, V.value)
    return position(family.base.patch, U, V)


def beta_point(family: VariationFamily, sigma: Jet, t: float):
    """beta evaluated on an arbitrary parameter jet (composition)."""
    b = beta_jets(family, sigma.value, t, max(sigma.order, 1))
    return b.compose(sigma)


def _speed(family, sigma, t):
    b = beta_jets(family, sigma, t, 1).deriv(1)
    return np.sqrt((b * b).sum(axis=0))


def _edges(family, hi):
    e = np.linspace(0.0, hi, family.panels + 1)
    return np.unique(np.concatenate([e, [b for b in family.breakpoints if 0 < b < hi]]))


def _gl(family, lo, hi, f):
    xg, wg = _legendre(family.nodes)
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
    x = mid[..., None] + half[..., None] * xg
    return half * (f(x) * wg).sum(axis=-1)


def family_length(family: VariationFamily, t: float, upper: float | None = None) -> float:
    """Length of beta(.; t) on [0, upper] (default: the whole extension)."""
    hi = family.base.l_star if upper is None else upper
    e = _edges(family, hi)
    return float(_gl(family, e[:-1], e[1:], lambda x: _speed(family, x, t)).sum())


def solve_lambda(family: VariationFamily, t: float, tol: float = 1e-13, maxiter: int = 50) -> float:
    """lambda(t) with int_0^lambda |beta_sigma(.; t)| = l, by Newton inside the bracketing panel."""
    l = family.base.length
    if t == 0.0:
        return l
    e = _edges(family, family.base.l_star)
    cum = np.concatenate([[0.0], np.cumsum(_gl(family, e[:-1], e[1:], lambda x: _speed(family, x, t)))])
    if not cum[-1] > l:
        raise BracketError(
            f"varied curve at t = {t:g} has length {cum[-1]:.6g} <= l = {l:.6g} on the extension"
        )
    i = int(np.searchsorted(cum, l, side="right") - 1)
    lo, hi = e[i], e[i + 1]
    lam = lo + (hi - lo) * (l - cum[i]) / (cum[i + 1] - cum[i])
    for _ in range(maxiter):
        g = cum[i] + float(_gl(family, lo, lam, lambda x: _speed(family, x, t))) - l
        lam_new = lam - g / float(_speed(family, lam, t))
        lam_new = min(max(lam_new, lo), hi)
        if abs(lam_new - lam) <= tol * max(1.0, lam) or abs(g) <= tol:
            return lam_new
        lam = lam_new
    raise BracketError(f"lambda({t:g}) Newton iteration did not converge")


def _torsion_sq(family, sigma, t):
    b = beta_jets(family, sigma, t, 3)
    b1, b2, b3 = b.deriv(1), b.deriv(2), b.deriv(3)
    c = np.cross(b1, b2, axis=0)
    D = (c * c).sum(axis=0)
    sp2 = (b1 * b1).sum(axis=0)
    k2 = D / sp2**3
    if np.any(k2 < KAPPA_MIN**2):
        bad = np.atleast_1d(sigma)[np.atleast_1d(k2 < KAPPA_MIN**2)]
        raise CurvatureDegeneracyError(f"varied curve at t = {t:g} loses curvature", bad)
    return ((c * b3).sum(axis=0) / D) ** 2


def functional_of_family(family: VariationFamily, t: float,
                         quad: QuadratureSpec = QuadratureSpec(), estimate_error=False):
    """F(t) = int_0^lambda(t) tau_beta^2 dsigma."""
    lam = solve_lambda(family, t)
    bp = [b for b in family.breakpoints if b < lam]
    r = integrate(lambda x: _torsion_sq(family, x, t), 0.0, lam, quad, bp, estimate_error)
    return r if estimate_error else r.value


def admissible_eps(base: CurveOnSurface, fld: VariationField, max_halvings: int = 40) -> float:
    """Largest tested |t| for which the family stays in the chart, long enough and curved.

    The starting amplitude keeps t mu, t mu' and t mu'' small against the
    curve length, unity and the curvature scale, so that narrow fields do
    not fold the curve; it is then halved until the length and curvature
    guards hold at t = +-eps and +-eps/2.
    """
    fam = VariationFamily(base, fld, 0.0)
    sig, _ = nodes_and_weights(0.0, base.l_star, QuadratureSpec(16, 16), fam.breakpoints)
    u, v, eta, zeta = _lift(fam, sig, 0)
    disp = np.hypot(eta.value, zeta.value)
    m = np.max(np.abs(fld.derivs(sig, 2)), axis=1)
    fj = frame_jets(base, sig, order=2)
    kref = max(float(np.sqrt(np.max(fj.kappa2.value))), 1.0 / base.length)
    bounds = [0.1 * base.length / m[0]]
    if m[1] > 0:
        bounds.append(0.1 / m[1])
    if m[2] > 0:
        bounds.append(0.1 * kref / m[2])
    eps = min(bounds)
    moving = disp > 0
    if np.any(moving):
        margin = base.patch.boundary_margin(u.value, v.value)
        eps = min(eps, 0.5 * float(np.min(margin[moving] / disp[moving])))
    need = 0.5 * (base.length + base.l_star)
    for _ in range(max_halvings):
        fam.eps = eps
        try:
            ok = all(family_length(fam, t) > need for t in (eps, -eps))
            if ok:
                for t in (eps, -eps, 0.5 * eps, -0.5 * eps):
                    _torsion_sq(fam, sig, t)
                return eps
        except (CurvatureDegeneracyError, ValueError):
            pass
        eps *= 0.5
    raise BracketError("no admissible variation amplitude found")


def make_family(base: CurveOnSurface, field_spec, eps: float | None = None) -> VariationFamily:
    fld = make_variation_field(field_spec, base)
    return VariationFamily(base, fld, admissible_eps(base, fld) if eps is None else float(eps))


# ---------------------------------------------------------------------------
# First variation


def _shrinking_richardson(F, h, levels, rtol, max_shrink):
    best = None
    for _ in range(max_shrink + 1):
        r = richardson_derivative(F, h, levels, rtol=rtol)
        if best is None or r.error < best.error:
            best = r
        if r.converged:
            break
        h *= 0.25
    return best


def dlambda_dt(family: VariationFamily, h0: float | None = None, levels: int = 4,
               rtol: float = 1e-9):
    """(finite-difference value, closed form int_0^l mu kg ds)."""
    h0 = 0.25 * family.eps if h0 is None else h0
    fd = _shrinking_richardson(lambda t: solve_lambda(family, t), h0, levels, rtol, 6)

    def f(s):
        fj = frame_jets(family.base, s, order=2)
        return family.field(s) * fj.kg.value

    formula = integrate(f, 0.0, family.base.length, QuadratureSpec(), family.breakpoints)
    return fd, formula.value


def first_variation_fd(family: VariationFamily, h0: float | None = None, levels: int = 4,
                       steps=None, quad: QuadratureSpec = QuadratureSpec(),
                       rtol: float = 1e-9, max_shrink: int = 6) -> FDResult:
    """dF/dt at t = 0 by Richardson-extrapolated central differences.

    Without explicit ``steps`` the starting step shrinks by 4 until the
    extrapolation table settles to ``rtol``; the result with the smallest
    error estimate is returned.
    """
    F = lambda t: functional_of_family(family, t, quad)
    if steps is not None:
        return richardson_derivative(F, steps=steps, rtol=rtol)
    h = 0.25 * family.eps if h0 is None else h0
    return _shrinking_richardson(F, h, levels, rtol, max_shrink)


@dataclass
class FirstVariation:
    interior: float
    b1_term: float
    b2_term: float
    b3_term: float
    total: float
    quad_error: float = 0.0


def first_variation_analytic(curve: CurveOnSurface, fld: VariationField,
                             quad: QuadratureSpec = QuadratureSpec(), density=None) -> FirstVariation:
    """int mu E + 2 mu(l) B1 + 2 mu'(l) B2 - 2 mu''(l) B3 / kappa^2(l).

    ``density`` replaces the Euler-Lagrange density (signature
    ``density(kg, kn, tg, tau_l) -> Jet``); used for negative controls.
    """
    density = el_density if density is None else density
    tau_l = tau_at_end(curve)

    def f(s):
        fj = frame_jets(curve, s)
        return fld(s) * density(fj.kg, fj.kn, fj.tg, tau_l).value

    bp = [b for b in fld.breakpoints if 0 < b < curve.length]
    interior = integrate(f, 0.0, curve.length, quad, bp)
    B1, B2, B3 = boundary_residuals(curve)
    m0, m1, m2 = fld.derivs(curve.length, 2)
    end = frame_jets(curve, curve.length, order=3)
    k2l = float(end.kappa2.value)
    t1, t2, t3 = 2 * m0 * B1, 2 * m1 * B2, -2 * m2 * B3 / k2l
    return FirstVariation(interior.value, t1, t2, t3, interior.value + t1 + t2 + t3, interior.error)
