"""Geometry parameters, coordinate domain and interior sampling.

The five-dimensional chart uses coordinates (θ, φ, y, β, ψ) where ψ is the
primed angle of the fibered presentation; the cone chart prefixes a radius r.
The admissible y-interval is bounded by the two smallest real roots of the
cubic a − 3y² + 2cy³.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParamOutOfRange, PointOutOfDomain, RootFindingFailed, UnsupportedC

__all__ = [
    "YpqParams",
    "ChartDomain",
    "ChartPoint",
    "ConePoint",
    "validate_params",
    "compute_domain",
    "sample_point",
    "sample_cone_point",
    "w_of_y",
    "q_of_y",
    "p_of_y",
]

THETA_RANGE = (0.0, np.pi)


@dataclass(frozen=True)
class YpqParams:
    a: float
    c: float

    @property
    def is_homogeneous_limit(self):
        """True for c = 0, the homogeneous T^{1,1} form of the metric."""
        return self.c == 0.0


@dataclass(frozen=True)
class ChartDomain:
    y1: float
    y2: float
    theta_range: tuple = THETA_RANGE
    margin: float = 1e-3


@dataclass(frozen=True)
class ChartPoint:
    theta: float
    phi: float
    y: float
    beta: float
    psi: float

    def coords(self):
        return np.array([self.theta, self.phi, self.y, self.beta, self.psi])

    @staticmethod
    def from_coords(x):
        return ChartPoint(*(float(v) for v in x))


@dataclass(frozen=True)
class ConePoint:
    r: float
    base: ChartPoint

    def __post_init__(self):
        if self.r <= 0:
            raise PointOutOfDomain(f"cone radius must be positive, got {self.r}")

    def coords(self):
        return np.concatenate(([self.r], self.base.coords()))


# -- structure functions of the metric (generic over floats and jets) --------

def w_of_y(params, y):
    return 2.0 * (params.a - y * y) / (1.0 - params.c * y)


def q_of_y(params, y):
    return (params.a - 3.0 * y * y + 2.0 * params.c * y ** 3) / (params.a - y * y)


def p_of_y(params, y):
    """p = w·q, written in cancelled form to stay regular at y² = a."""
    return 2.0 * (params.a - 3.0 * y * y + 2.0 * params.c * y ** 3) / (1.0 - params.c * y)


def _cubic(params, y):
    return params.a - 3.0 * y * y + 2.0 * params.c * y ** 3


def _cubic_deriv(params, y):
    return -6.0 * y + 6.0 * params.c * y * y


def validate_params(a, c):
    """Check the (a, c) parameter pair and return a YpqParams.

    c is restricted to {0, 1}: any nonzero c can be rescaled away, and c = 0
    is the homogeneous limit.  For c = 1 the cubic a − 3y² + 2y³ must have
    three distinct real roots, which happens exactly for 0 < a < 1.
    """
    if c not in (0.0, 1.0, 0, 1):
        raise UnsupportedC(f"c must be 0 or 1, got {c}")
    c = float(c)
    if c == 1.0:
        if not 0.0 < a < 1.0:
            raise ParamOutOfRange(
                f"a = {a} outside (0, 1): the cubic has no three distinct real roots")
        # discriminant of 2y³ − 3y² + a, positive iff three distinct real roots
        disc = 108.0 * a * (1.0 - a)
        if disc <= 0.0:
            raise ParamOutOfRange(f"a = {a}: cubic discriminant not positive")
    else:
        if a <= 0.0:
            raise ParamOutOfRange(f"a = {a} must be positive for c = 0")
    return YpqParams(float(a), c)


def _bracketed_newton(f, df, lo, hi, tol=1e-14, max_iter=100):
    """Newton iteration safeguarded by the bracket [lo, hi] (bisection fallback)."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise RootFindingFailed(f"no sign change on [{lo}, {hi}]")
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        fx = f(x)
        if fx == 0.0:
            return x
        if fx * flo < 0.0:
            hi = x
        else:
            lo, flo = x, fx
        d = df(x)
        step = fx / d if d != 0.0 else np.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < tol * max(1.0, abs(x)):
            return x_new
        x = x_new
    raise RootFindingFailed("bracketed Newton did not converge")


def compute_domain(params, margin=1e-3):
    """Locate the y-interval of the chart from the roots of a − 3y² + 2cy³."""
    if params.c == 0.0:
        yb = np.sqrt(params.a / 3.0)
        return ChartDomain(-yb, yb, margin=margin)
    f = lambda y: _cubic(params, y)
    df = lambda y: _cubic_deriv(params, y)
    grid = np.linspace(-1.0, 1.5, 201)
    vals = f(grid)
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(_bracketed_newton(f, df, grid[i], grid[i + 1]))
    roots = sorted(set(np.round(roots, 14)))
    if len(roots) != 3:
        raise RootFindingFailed(
            f"expected 3 real roots for a = {params.a}, found {len(roots)}")
    y1, y2 = roots[0], roots[1]
    for y in (y1, y2):
        if abs(f(y)) > 1e-12:
            raise RootFindingFailed(f"root {y} has residual {f(y)}")
    return ChartDomain(float(y1), float(y2), margin=margin)


def sample_point(domain, rng):
    """Draw a uniform interior chart point away from coordinate degeneracies."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    m = domain.margin
    theta = rng.uniform(m, np.pi - m)
    dy = domain.y2 - domain.y1
    y = rng.uniform(domain.y1 + m * dy, domain.y2 - m * dy)
    phi, beta, psi = rng.uniform(0.0, 2.0 * np.pi, size=3)
    return ChartPoint(theta, phi, y, beta, psi)


def sample_cone_point(domain, rng, r_range=(0.5, 2.0)):
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    r = rng.uniform(*r_range)
    return ConePoint(r, sample_point(domain, rng))


def check_interior(domain, pt):
    if not (0.0 < pt.theta < np.pi):
        raise PointOutOfDomain(f"theta = {pt.theta} not in (0, π)")
    if not (domain.y1 < pt.y < domain.y2):
        raise PointOutOfDomain(f"y = {pt.y} not in ({domain.y1}, {domain.y2})")
    return pt
