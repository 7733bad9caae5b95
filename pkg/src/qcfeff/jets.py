"""Truncated multivariate Taylor arithmetic (forward-mode jets).

A Jet holds the Taylor coefficients of a smooth function at a point,
up to a fixed total degree, densely indexed by multi-index.  Products
are exact to the truncation order; elementary functions are built by
composing their univariate series with the nilpotent part.

Jet spaces are cached per (num_vars, order), including the index table
driving multiplication.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


class JetDomainError(ArithmeticError):
    """Raised when an elementary function hits a pole or branch point."""


@lru_cache(maxsize=None)
def jet_space(num_vars: int, order: int) -> "JetSpace":
    return JetSpace(num_vars, order)


def _multi_indices(num_vars, order):
    idx = [()]

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for d in range(remaining + 1):
            rec(prefix + [d], remaining - d, slots - 1)

    out = []
    rec([], order, num_vars)
    out.sort(key=lambda a: (sum(a), a))
    return out


class JetSpace:
    """Shared coefficient layout and multiplication table."""

    def __init__(self, num_vars: int, order: int):
        self.num_vars = num_vars
        self.order = order
        self.indices = _multi_indices(num_vars, order)
        self.size = len(self.indices)
        self.position = {a: i for i, a in enumerate(self.indices)}
        self.degrees = np.array([sum(a) for a in self.indices])
        ii, jj, kk = [], [], []
        for i, a in enumerate(self.indices):
            da = sum(a)
            for j, b in enumerate(self.indices):
                if da + sum(b) > order:
                    continue
                c = tuple(x + y for x, y in zip(a, b))
                ii.append(i)
                jj.append(j)
                kk.append(self.position[c])
        self._mul_i = np.array(ii, dtype=np.intp)
        self._mul_j = np.array(jj, dtype=np.intp)
        self._mul_k = np.array(kk, dtype=np.intp)
        # partial-derivative index maps: coef of alpha+e_v scaled by alpha_v+1
        self._deriv = []
        for v in range(num_vars):
            src, dst, fac = [], [], []
            for i, a in enumerate(self.indices):
                if sum(a) == order:
                    continue
                b = tuple(x + (1 if u == v else 0) for u, x in enumerate(a))
                src.append(self.position[b])
                dst.append(i)
                fac.append(a[v] + 1)
            self._deriv.append(
                (np.array(src, dtype=np.intp), np.array(dst, dtype=np.intp), np.array(fac, float))
            )

    def mul(self, ca, cb):
        out = np.zeros(self.size)
        np.add.at(out, self._mul_k, ca[self._mul_i] * cb[self._mul_j])
        return out

    def array_mul(self, A, B):
        """Jet product over the trailing axis for broadcastable arrays."""
        prod = A[..., self._mul_i] * B[..., self._mul_j]
        out = np.zeros(np.broadcast(A[..., 0], B[..., 0]).shape + (self.size,))
        np.add.at(out, (..., self._mul_k), prod)
        return out

    def deriv(self, coef, v):
        src, dst, fac = self._deriv[v]
        out = np.zeros(coef.shape[:-1] + (self.size,))
        out[..., dst] = coef[..., src] * fac
        return out


class Jet:
    """Taylor expansion of a scalar function, truncated at total degree."""

    __slots__ = ("space", "coef")

    def __init__(self, space: JetSpace, coef=None):
        self.space = space
        self.coef = np.zeros(space.size) if coef is None else np.asarray(coef, float)

    @classmethod
    def constant(cls, space, value):
        j = cls(space)
        j.coef[0] = value
        return j

    @classmethod
    def variable(cls, space, v, value):
        j = cls(space)
        j.coef[0] = value
        j.coef[space.position[tuple(1 if u == v else 0 for u in range(space.num_vars))]] = 1.0
        return j

    @property
    def value(self) -> float:
        return float(self.coef[0])

    def _coerce(self, o):
        if isinstance(o, Jet):
            if o.space is not self.space:
                raise ValueError("jets from different spaces")
            return o
        return Jet.constant(self.space, float(o))

    def __add__(self, o):
        o = self._coerce(o)
        return Jet(self.space, self.coef + o.coef)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._coerce(o)
        return Jet(self.space, self.coef - o.coef)

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __neg__(self):
        return Jet(self.space, -self.coef)

    def __mul__(self, o):
        if not isinstance(o, Jet):
            return Jet(self.space, self.coef * float(o))
        o = self._coerce(o)
        return Jet(self.space, self.space.mul(self.coef, o.coef))

    def __rmul__(self, o):
        return self.__mul__(o)

    def __truediv__(self, o):
        if not isinstance(o, Jet):
            return Jet(self.space, self.coef / float(o))
        return self * o.reciprocal()

    def __rtruediv__(self, o):
        return self.reciprocal() * float(o)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = Jet.constant(self.space, 1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def _compose_series(self, series):
        """sum_m series[m] * (self - value)^m, truncated."""
        sp = self.space
        delta = Jet(sp, self.coef.copy())
        delta.coef[0] = 0.0
        out = Jet.constant(sp, series[0])
        power = Jet.constant(sp, 1.0)
        for m in range(1, sp.order + 1):
            power = power * delta
            if series[m]:
                out = out + power * series[m]
        return out

    def reciprocal(self):
        x0 = self.value
        if x0 == 0.0:
            raise JetDomainError("reciprocal at zero")
        series = [(-1.0) ** m / x0 ** (m + 1) for m in range(self.space.order + 1)]
        return self._compose_series(series)

    def sqrt(self):
        x0 = self.value
        if x0 <= 0.0:
            raise JetDomainError("sqrt branch point")
        series = []
        c = math.sqrt(x0)
        half = 0.5
        for m in range(self.space.order + 1):
            series.append(c)
            c = c * (half - m) / ((m + 1) * x0)
        return self._compose_series(series)

    def exp(self):
        e = math.exp(self.value)
        series = [e / math.factorial(m) for m in range(self.space.order + 1)]
        return self._compose_series(series)

    def log(self):
        x0 = self.value
        if x0 <= 0.0:
            raise JetDomainError("log branch point")
        series = [math.log(x0)]
        for m in range(1, self.space.order + 1):
            series.append((-1.0) ** (m + 1) / (m * x0 ** m))
        return self._compose_series(series)

    def sin(self):
        s, c = math.sin(self.value), math.cos(self.value)
        cyc = [s, c, -s, -c]
        series = [cyc[m % 4] / math.factorial(m) for m in range(self.space.order + 1)]
        return self._compose_series(series)

    def cos(self):
        s, c = math.sin(self.value), math.cos(self.value)
        cyc = [c, -s, -c, s]
        series = [cyc[m % 4] / math.factorial(m) for m in range(self.space.order + 1)]
        return self._compose_series(series)

    def deriv(self, v):
        return Jet(self.space, self.space.deriv(self.coef, v))

    def derivative_value(self, alpha) -> float:
        """Value of the partial derivative d^alpha at the base point."""
        pos = self.space.position[tuple(alpha)]
        fac = 1.0
        for a in alpha:
            fac *= math.factorial(a)
        return float(self.coef[pos] * fac)


def jet_variables(point, order: int):
    """Seed jets (one per coordinate) for expansion around the point."""
    sp = jet_space(len(point), order)
    return [Jet.variable(sp, v, float(x)) for v, x in enumerate(point)]


def jet_eval(f, point, order: int) -> Jet:
    """Taylor coefficients of f at the point, to total degree ``order``.

    ``f`` is a callable combining its jet arguments through arithmetic
    and the elementary functions defined on Jet.
    """
    out = f(*jet_variables(point, order))
    if not isinstance(out, Jet):
        out = Jet.constant(jet_space(len(point), order), float(out))
    return out
