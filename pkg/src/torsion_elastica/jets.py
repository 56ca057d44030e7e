"""Truncated Taylor (jet) arithmetic.

A :class:`Jet` of order K stores ``c[k] = f^(k)(s0) / k!`` for k = 0..K.  The
coefficient array may carry trailing batch axes, so one jet can describe the
expansion of the same expression at many base points at once; every
operation acts elementwise over the batch.

:class:`Dual` adds a first-order infinitesimal on top of a jet.  Surfaces use
it to obtain x_u and x_v along a curve without a second Taylor variable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import JetDomainError, JetError, SingularDivisionError

DEFAULT_ORDER = 7


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 1000

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=float)
        if c.ndim == 0:
            raise JetError("a jet needs at least one coefficient")
        self.c = c

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, order=DEFAULT_ORDER):
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, value, order=DEFAULT_ORDER):
        value = np.asarray(value, dtype=float)
        if not np.all(np.isfinite(value)):
            raise JetDomainError("jet base point must be finite")
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    # -- basic properties -------------------------------------------------
    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def shape(self):
        return self.c.shape[1:]

    @property
    def value(self):
        return self.c[0]

    def __repr__(self):
        return f"Jet(order={self.order}, c={self.c!r})"

    def __getitem__(self, idx):
        """Index the batch axes."""
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.c[(slice(None),) + idx])

    def truncate(self, order):
        if order > self.order:
            raise JetError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.c[: order + 1])

    def deriv(self, k=1):
        """k-th derivative value at the base point."""
        if not 0 <= k <= self.order:
            raise JetError(f"derivative order {k} outside 0..{self.order}")
        return math.factorial(k) * self.c[k]

    def derivs(self, n):
        """Stack of derivative values 0..n along a new leading axis."""
        return np.stack([self.deriv(k) for k in range(n + 1)])

    def d(self, k=1):
        """Jet of the k-th derivative (order drops by k)."""
        c = self.c
        for _ in range(k):
            if c.shape[0] < 2:
                raise JetError("jet order exhausted by differentiation")
            m = np.arange(1, c.shape[0], dtype=float).reshape((-1,) + (1,) * (c.ndim - 1))
            c = c[1:] * m
        return Jet(c)

    def integrate(self, const=0.0):
        """Antiderivative jet (order grows by one)."""
        c = self.c
        m = np.arange(1, c.shape[0] + 1, dtype=float).reshape((-1,) + (1,) * (c.ndim - 1))
        out = np.empty((c.shape[0] + 1,) + c.shape[1:])
        out[0] = const
        out[1:] = c / m
        return Jet(out)

    def compose(self, g):
        """Evaluate this Taylor series at the jet ``g`` (expanded about g's constant term)."""
        g = _as_jet(g, self.order)
        K = min(self.order, g.order)
        h = Jet(g.c[: K + 1].copy())
        h.c[0] = 0.0
        out = Jet.constant(self.c[K], K)
        for k in range(K - 1, -1, -1):
            out = out * h + self.c[k]
        return out

    # -- arithmetic -------------------------------------------------------
    def __neg__(self):
        return Jet(-self.c)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Dual):
            return NotImplemented
        if isinstance(other, Jet):
            a, b = _align(self, other)
            return Jet(a + b)
        c = self.c + np.zeros_like(np.asarray(other, dtype=float))
        c = np.array(c, copy=True)
        c[0] = c[0] + other
        return Jet(c)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Dual):
            return NotImplemented
        if isinstance(other, Jet):
            a, b = _align(self, other)
            return Jet(_cauchy(a, b))
        return Jet(self.c * np.asarray(other, dtype=float))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return NotImplemented
        if isinstance(other, Jet):
            a, b = _align(self, other)
            return Jet(_divide(a, b))
        other = np.asarray(other, dtype=float)
        if np.any(other == 0):
            raise SingularDivisionError("division by zero constant")
        return Jet(self.c / other)

    def __rtruediv__(self, other):
        return Jet.constant(other, self.order) / self

    def __pow__(self, n):
        if isinstance(n, Jet):
            return (n * self.log()).exp()
        if isinstance(n, (int, np.integer)) or (np.ndim(n) == 0 and float(n).is_integer()):
            return self._pow_int(int(n))
        return (self.log() * float(n)).exp()

    def __rpow__(self, base):
        return (self * np.log(base)).exp()

    def _pow_int(self, n):
        if n < 0:
            return 1.0 / self._pow_int(-n)
        result = Jet.constant(np.ones(self.shape), self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- elementary functions --------------------------------------------
    def exp(self):
        a = self.c
        K = self.order
        e = np.empty_like(a)
        e[0] = np.exp(a[0])
        for k in range(1, K + 1):
            j = _ramp(k, a.ndim)
            e[k] = (j * a[1 : k + 1] * e[k - 1 :: -1][: k]).sum(axis=0) / k
        return Jet(e)

    def log(self):
        a = self.c
        if np.any(a[0] <= 0):
            raise JetDomainError("log of non-positive constant term")
        K = self.order
        out = np.empty_like(a)
        out[0] = np.log(a[0])
        for k in range(1, K + 1):
            acc = a[k].copy()
            if k > 1:
                j = _ramp(k - 1, a.ndim)
                acc = acc - (j * out[1:k] * a[k - 1 : 0 : -1]).sum(axis=0) / k
            out[k] = acc / a[0]
        return Jet(out)

    def sqrt(self):
        a = self.c
        if np.any(a[0] <= 0):
            raise JetDomainError("sqrt needs a positive constant term")
        K = self.order
        r = np.empty_like(a)
        r[0] = np.sqrt(a[0])
        for k in range(1, K + 1):
            acc = a[k].copy()
            if k > 1:
                acc = acc - (r[1:k] * r[k - 1 : 0 : -1]).sum(axis=0)
            r[k] = acc / (2.0 * r[0])
        return Jet(r)

    def _sincos(self):
        a = self.c
        K = self.order
        sn = np.empty_like(a)
        cs = np.empty_like(a)
        sn[0] = np.sin(a[0])
        cs[0] = np.cos(a[0])
        for k in range(1, K + 1):
            j = _ramp(k, a.ndim)
            ja = j * a[1 : k + 1]
            sn[k] = (ja * cs[k - 1 :: -1][:k]).sum(axis=0) / k
            cs[k] = -(ja * sn[k - 1 :: -1][:k]).sum(axis=0) / k
        return Jet(sn), Jet(cs)

    def sin(self):
        return self._sincos()[0]

    def cos(self):
        return self._sincos()[1]

    def atan(self):
        if self.order == 0:
            return Jet(np.arctan(self.c))
        q = self.d() / (1.0 + self.truncate(self.order - 1) ** 2)
        return q.integrate(np.arctan(self.c[0]))


def _ramp(k, ndim):
    return np.arange(1, k + 1, dtype=float).reshape((-1,) + (1,) * (ndim - 1))


def _as_jet(x, order):
    return x if isinstance(x, Jet) else Jet.constant(x, order)


def _align(a, b):
    K = min(a.order, b.order)
    return a.c[: K + 1], b.c[: K + 1]


def _cauchy(a, b):
    K = a.shape[0] - 1
    shape = (K + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.empty(shape)
    for k in range(K + 1):
        out[k] = (a[: k + 1] * b[k::-1]).sum(axis=0)
    return out


def _divide(a, b):
    if np.any(b[0] == 0):
        raise SingularDivisionError("division by a jet with zero constant term")
    K = a.shape[0] - 1
    shape = (K + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:])
    q = np.empty(shape)
    for k in range(K + 1):
        acc = a[k]
        if k:
            acc = acc - (b[1 : k + 1] * q[k - 1 :: -1][:k]).sum(axis=0)
        q[k] = acc / b[0]
    if not np.all(np.isfinite(q)):
        raise SingularDivisionError("non-finite quotient coefficients")
    return q


# ---------------------------------------------------------------------------
# Functional entry points


def jet_variable(value, order=DEFAULT_ORDER):
    if order < 0:
        raise JetError("order must be non-negative")
    return Jet.variable(value, order)


def jet_constant(value, order=DEFAULT_ORDER):
    return Jet.constant(value, order)


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "neg": lambda a, b: -a,
    "pow_int": lambda a, b: a._pow_int(int(b)),
}


def jet_arith(op, a, b=None):
    if op not in _ARITH:
        raise ValueError(f"unknown jet operation {op!r}")
    if isinstance(a, Jet) and isinstance(b, Jet) and a.order != b.order:
        raise JetError(f"operand orders differ: {a.order} vs {b.order}")
    return _ARITH[op](a, b)


def jet_elementary(fn, a):
    if fn not in ("sin", "cos", "exp", "log", "sqrt", "atan"):
        raise ValueError(f"unknown elementary function {fn!r}")
    return getattr(a, fn)()


def jet_derivative(a, k):
    return a.deriv(k)


# ---------------------------------------------------------------------------
# Dual numbers over jets


class Dual:
    """``value + eps * d`` with d^2 = 0; both parts may be jets or plain numbers."""

    __slots__ = ("value", "eps")
    __array_priority__ = 2000

    def __init__(self, value, eps=0.0):
        self.value = value
        self.eps = eps

    @staticmethod
    def _parts(x):
        if isinstance(x, Dual):
            return x.value, x.eps
        return x, 0.0

    def __add__(self, other):
        b, db = self._parts(other)
        return Dual(self.value + b, self.eps + db)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.value, -self.eps)

    def __sub__(self, other):
        b, db = self._parts(other)
        return Dual(self.value - b, self.eps - db)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b, db = self._parts(other)
        return Dual(self.value * b, self.value * db + self.eps * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b, db = self._parts(other)
        q = self.value / b
        return Dual(q, (self.eps - q * db) / b)

    def __rtruediv__(self, other):
        return Dual(other) / self

    def __pow__(self, n):
        if isinstance(n, (int, np.integer)) or (np.ndim(n) == 0 and not isinstance(n, (Jet, Dual)) and float(n).is_integer()):
            n = int(n)
            if n == 0:
                return Dual(self.value ** 0, 0.0)
            return Dual(self.value**n, n * self.value ** (n - 1) * self.eps)
        return exp(n * log(self))

    def __rpow__(self, base):
        return exp(self * np.log(base))

    def sin(self):
        return Dual(sin(self.value), cos(self.value) * self.eps)

    def cos(self):
        return Dual(cos(self.value), -sin(self.value) * self.eps)

    def exp(self):
        e = exp(self.value)
        return Dual(e, e * self.eps)

    def log(self):
        return Dual(log(self.value), self.eps / self.value)

    def sqrt(self):
        r = sqrt(self.value)
        return Dual(r, self.eps / (2.0 * r))

    def atan(self):
        return Dual(atan(self.value), self.eps / (1.0 + self.value * self.value))


def _dispatch(name, npfn, x):
    method = getattr(x, name, None)
    if method is not None and isinstance(x, (Jet, Dual)):
        return method()
    x = np.asarray(x, dtype=float)
    if name == "log" and np.any(x <= 0):
        raise JetDomainError("log of non-positive value")
    if name == "sqrt" and np.any(x < 0):
        raise JetDomainError("sqrt of negative value")
    return npfn(x)


def sin(x):
    return _dispatch("sin", np.sin, x)


def cos(x):
    return _dispatch("cos", np.cos, x)


def exp(x):
    return _dispatch("exp", np.exp, x)


def log(x):
    return _dispatch("log", np.log, x)


def sqrt(x):
    return _dispatch("sqrt", np.sqrt, x)


def atan(x):
    return _dispatch("atan", np.arctan, x)


# ---------------------------------------------------------------------------
# Vectors of jets


@dataclass(frozen=True)
class JetVec3:
    x: Jet
    y: Jet
    z: Jet

    @property
    def order(self):
        return min(self.x.order, self.y.order, self.z.order)

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def __add__(self, o):
        return JetVec3(self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o):
        return JetVec3(self.x - o.x, self.y - o.y, self.z - o.z)

    def __neg__(self):
        return JetVec3(-self.x, -self.y, -self.z)

    def __mul__(self, k):
        return JetVec3(self.x * k, self.y * k, self.z * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return JetVec3(self.x / k, self.y / k, self.z / k)

    def dot(self, o):
        return self.x * o.x + self.y * o.y + self.z * o.z

    def cross(self, o):
        return JetVec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )

    def norm(self):
        return self.dot(self).sqrt()

    def normalized(self):
        return self / self.norm()

    def d(self, k=1):
        return JetVec3(self.x.d(k), self.y.d(k), self.z.d(k))

    def truncate(self, order):
        return JetVec3(self.x.truncate(order), self.y.truncate(order), self.z.truncate(order))

    def compose(self, g):
        return JetVec3(self.x.compose(g), self.y.compose(g), self.z.compose(g))

    def deriv(self, k=0):
        return np.stack([self.x.deriv(k), self.y.deriv(k), self.z.deriv(k)])

    @property
    def value(self):
        return self.deriv(0)
