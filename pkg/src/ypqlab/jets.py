"""Forward-mode automatic differentiation with first/second-order jets.

A :class:`Jet` is a truncated Taylor scalar: a value plus a gradient over a
fixed seed space, and optionally a Hessian.  Arithmetic propagates the
expansion exactly, so derivatives carry only roundoff error.  The value and
seed entries may themselves be jets, which makes nested (higher-order or
layered) differentiation of composed evaluators work without extra code.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["Jet", "sin", "cos", "sqrt", "seed_jets", "eval_with_partials"]


def _outer(a, b):
    return np.outer(a, b)


class Jet:
    """Scalar with gradient ``g`` and optional Hessian ``h`` seed blocks."""

    __slots__ = ("v", "g", "h")

    def __init__(self, v, g, h=None):
        self.v = v
        self.g = np.asarray(g)
        self.h = None if h is None else np.asarray(h)

    # -- arithmetic ---------------------------------------------------------
    # ndarray operands are declined so numpy broadcasts jets elementwise,
    # which the nested evaluation paths rely on.

    def __add__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, Jet):
            h = None if self.h is None else self.h + other.h
            return Jet(self.v + other.v, self.g + other.g, h)
        return Jet(self.v + other, self.g, self.h)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, Jet):
            h = None if self.h is None else self.h - other.h
            return Jet(self.v - other.v, self.g - other.g, h)
        return Jet(self.v - other, self.g, self.h)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet(-self.v, -self.g, None if self.h is None else -self.h)

    def __mul__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, Jet):
            h = None
            if self.h is not None:
                h = (self.v * other.h + other.v * self.h
                     + _outer(self.g, other.g) + _outer(other.g, self.g))
            return Jet(self.v * other.v,
                       self.v * other.g + other.v * self.g, h)
        return Jet(self.v * other, self.g * other,
                   None if self.h is None else self.h * other)

    __rmul__ = __mul__

    def _reciprocal(self):
        iv = 1.0 / self.v
        iv2 = iv * iv
        g = -iv2 * self.g
        h = None
        if self.h is not None:
            h = -iv2 * self.h + (2.0 * iv2 * iv) * _outer(self.g, self.g)
        return Jet(iv, g, h)

    def __truediv__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, Jet):
            return self * other._reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise TypeError("Jet.__pow__ supports non-negative integers only")
        out = 1.0
        for _ in range(n):
            out = self * out
        return out

    def _chain(self, f0, f1, f2):
        # f(x): value f0, first derivative f1, second derivative f2 at self.v
        h = None
        if self.h is not None:
            h = f1 * self.h + f2 * _outer(self.g, self.g)
        return Jet(f0, f1 * self.g, h)

    def __repr__(self):
        return f"Jet({self.v!r}, grad={self.g!r})"


def sin(x):
    if isinstance(x, Jet):
        s, c = sin(x.v), cos(x.v)
        return x._chain(s, c, -s)
    return math.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = sin(x.v), cos(x.v)
        return x._chain(c, -s, -c)
    return math.cos(x)


def sqrt(x):
    if isinstance(x, Jet):
        s = sqrt(x.v)
        f1 = 0.5 / s
        return x._chain(s, f1, -0.5 * f1 / x.v)
    return math.sqrt(x)


def seed_jets(coords, order=1, nseeds=None, offset=0):
    """Wrap coordinates in unit-seeded jets.

    ``nseeds``/``offset`` let several coordinate blocks (e.g. positions and
    momenta) share one seed space.  Nested use is supported: if the entries
    of ``coords`` are already jets, object-dtype seed blocks are used.
    """
    n = len(coords)
    nseeds = n if nseeds is None else nseeds
    nested = any(isinstance(c, Jet) for c in coords)
    dtype = object if nested else float
    out = []
    for i, c in enumerate(coords):
        g = np.zeros(nseeds, dtype=dtype)
        g[offset + i] = 1.0
        h = None
        if order == 2:
            h = np.zeros((nseeds, nseeds), dtype=dtype)
        out.append(Jet(c, g, h))
    return out


def _unpack(arr, nseeds, order):
    """Split a (possibly object) array of jets into value/grad[/hess] arrays."""
    arr = np.asarray(arr, dtype=object)
    nested = False
    for c in arr.flat:
        if isinstance(c, Jet) and isinstance(c.v, Jet):
            nested = True
            break
    dtype = object if nested else float
    val = np.zeros(arr.shape, dtype=dtype)
    grad = np.zeros((nseeds,) + arr.shape, dtype=dtype)
    hess = None
    if order == 2:
        hess = np.zeros((nseeds, nseeds) + arr.shape, dtype=dtype)
    for idx in np.ndindex(arr.shape):
        c = arr[idx]
        if isinstance(c, Jet):
            val[idx] = c.v
            grad[(slice(None),) + idx] = c.g
            if order == 2:
                hess[(slice(None), slice(None)) + idx] = c.h
        else:
            val[idx] = c
    if order == 2:
        return val, grad, hess
    return val, grad


def eval_with_partials(evaluator, coords, order=1):
    """Evaluate ``evaluator(coords)`` together with its coordinate partials.

    Returns ``(value, partials)`` for ``order=1`` or
    ``(value, partials, second_partials)`` for ``order=2``, each shaped with
    the differentiation axes first.  Entries inherit the scalar type of
    ``coords``: plain floats give float arrays, jets give jet-valued arrays
    (this is the nesting mechanism).
    """
    n = len(coords)
    jets = seed_jets(coords, order=order, nseeds=n)
    comps = evaluator(jets)
    return _unpack(comps, n, order)
