"""Dense multi-index tensors and exterior algebra at a point.

Everything is stored dense with all index permutations populated, which keeps
contraction code uniform (antisymmetry is asserted where required, never
assumed).  Dimensions in this package are 5 (the odd-dimensional space) and 6
(its metric cone), so dense storage is cheap.

The low-level helpers (``wedge_dense``, ``ext_deriv_from_partials``, ...)
operate on raw arrays and accept object-dtype arrays of jets; the public
wrappers work with the :class:`Tensor` / :class:`DifferentialForm` value
types.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import factorial

import numpy as np

from .errors import (
    BadSlots,
    DegreeOverflow,
    DimensionMismatch,
    MixedValence,
    ZeroDegree,
)

__all__ = [
    "Tensor",
    "DifferentialForm",
    "wedge",
    "interior_product",
    "antisymmetrize",
    "symmetrize",
    "contract",
    "wedge_dense",
    "interior_dense",
    "form_from_terms",
    "fill_antisym",
    "ext_deriv_from_partials",
    "levi_civita",
    "perm_parity",
]


def perm_parity(perm):
    """Sign of a permutation given as a tuple of distinct sortable items."""
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def levi_civita(dim):
    eps = np.zeros((dim,) * dim)
    for p in permutations(range(dim)):
        eps[p] = perm_parity(p)
    return eps


@dataclass(frozen=True)
class Tensor:
    """General small dense tensor; contravariant slots come first."""

    dim: int
    contravariant_rank: int
    covariant_rank: int
    components: np.ndarray

    def __post_init__(self):
        rank = self.contravariant_rank + self.covariant_rank
        if self.components.shape != (self.dim,) * rank:
            raise DimensionMismatch(
                f"expected shape {(self.dim,) * rank}, got {self.components.shape}")

    @property
    def rank(self):
        return self.contravariant_rank + self.covariant_rank


@dataclass(frozen=True)
class DifferentialForm:
    """Fully antisymmetric covariant tensor with all permutations stored."""

    dim: int
    degree: int
    components: np.ndarray

    def __post_init__(self):
        if not (0 <= self.degree <= self.dim):
            raise DegreeOverflow(f"degree {self.degree} out of range in dim {self.dim}")
        if self.components.shape != (self.dim,) * self.degree:
            raise DimensionMismatch(
                f"expected shape {(self.dim,) * self.degree}, got {self.components.shape}")

    def assert_antisymmetric(self, tol=1e-12):
        c = self.components
        for i in range(self.degree - 1):
            swapped = np.swapaxes(c, i, i + 1)
            if np.max(np.abs(c + swapped)) > tol * max(1.0, np.max(np.abs(c))):
                raise ValueError("components are not antisymmetric")

    def max_abs(self):
        return 0.0 if self.degree < 0 else float(np.max(np.abs(self.components))) \
            if self.components.size else float(abs(self.components))


# ---------------------------------------------------------------------------
# raw-array helpers (float or object dtype)

def fill_antisym(dim, degree, entries, like=None):
    """Densify a map {sorted index tuple: value} into a full antisymmetric array."""
    dtype = object if _has_objects(entries.values()) or (
        like is not None and like == object) else float
    out = np.zeros((dim,) * degree, dtype=dtype)
    for idx, val in entries.items():
        for p in permutations(range(degree)):
            sign = perm_parity(p)
            out[tuple(idx[k] for k in p)] = sign * val
    return out


def _has_objects(values):
    return any(not isinstance(v, (int, float, np.floating)) for v in values)


def form_from_terms(dim, degree, terms):
    """Build dense antisymmetric components from (index tuple, coefficient) terms.

    Index tuples need not be sorted; repeated (sorted) tuples accumulate.
    """
    if degree == 0:
        total = 0.0
        for _, c in terms:
            total = total + c
        return total
    acc = {}
    for idx, coeff in terms:
        s = tuple(sorted(idx))
        if len(set(idx)) != len(idx):
            continue
        sign = perm_parity(idx)
        acc[s] = acc.get(s, 0.0) + sign * coeff
    return fill_antisym(dim, degree, acc)


def wedge_dense(a, p, b, q, dim):
    """Wedge product of dense antisymmetric arrays (degrees p, q)."""
    if p == 0:
        return a * b if not isinstance(b, np.ndarray) or b.dtype != object else _scale(b, a)
    if q == 0:
        return _scale_maybe(a, b)
    deg = p + q
    dtype = object if (getattr(a, "dtype", None) == object
                       or getattr(b, "dtype", None) == object) else float
    entries = {}
    for idx in combinations(range(dim), deg):
        val = 0.0
        for sel in combinations(range(deg), p):
            rest = tuple(k for k in range(deg) if k not in sel)
            sign = perm_parity(sel + rest)
            val = val + sign * (a[tuple(idx[k] for k in sel)]
                                * b[tuple(idx[k] for k in rest)])
        entries[idx] = val
    return fill_antisym(dim, deg, entries, like=dtype)


def _scale(arr, s):
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = s * arr[idx]
    return out


def _scale_maybe(a, s):
    if getattr(a, "dtype", None) == object or not isinstance(s, (int, float, np.floating)):
        return _scale(np.asarray(a, dtype=object), s)
    return a * s


def interior_dense(v, omega, degree):
    """(v ⌟ ω) with v contravariant components and ω dense antisymmetric."""
    if getattr(omega, "dtype", None) == object or getattr(v, "dtype", None) == object:
        out = np.zeros(omega.shape[1:], dtype=object)
        for lam in range(len(v)):
            out = out + np.asarray(_scale(omega[lam], v[lam]))
        return out
    return np.tensordot(np.asarray(v, dtype=float), omega, axes=([0], [0]))


def ext_deriv_from_partials(partials, degree, dim):
    """Exterior derivative from the array of coordinate partials.

    ``partials[k, i1..ip]`` holds the partial derivative along coordinate k of
    the degree-p component array; the result is the dense (p+1)-form
    (dω)_{i0..ip} = Σ_j (−1)^j ∂_{i_j} ω_{i0.. without i_j ..ip}.
    """
    entries = {}
    for idx in combinations(range(dim), degree + 1):
        val = 0.0
        for j in range(degree + 1):
            rest = idx[:j] + idx[j + 1:]
            val = val + (-1) ** j * partials[(idx[j],) + rest]
        entries[idx] = val
    like = object if getattr(partials, "dtype", None) == object else None
    return fill_antisym(dim, degree + 1, entries, like=like)


def sym_dense(t):
    rank = t.ndim
    out = np.zeros_like(t)
    for p in permutations(range(rank)):
        out = out + np.transpose(t, p)
    return out / factorial(rank)


def alt_dense(t):
    rank = t.ndim
    out = np.zeros_like(t)
    for p in permutations(range(rank)):
        out = out + perm_parity(p) * np.transpose(t, p)
    return out / factorial(rank)


# ---------------------------------------------------------------------------
# public wrappers

def wedge(alpha: DifferentialForm, beta: DifferentialForm) -> DifferentialForm:
    if alpha.dim != beta.dim:
        raise DimensionMismatch("wedge of forms in different dimensions")
    deg = alpha.degree + beta.degree
    if deg > alpha.dim:
        raise DegreeOverflow(f"degree {deg} exceeds dimension {alpha.dim}")
    comps = wedge_dense(alpha.components, alpha.degree,
                        beta.components, beta.degree, alpha.dim)
    return DifferentialForm(alpha.dim, deg, np.asarray(comps, dtype=float))


def interior_product(v, omega: DifferentialForm) -> DifferentialForm:
    v = np.asarray(v, dtype=float)
    if v.shape != (omega.dim,):
        raise DimensionMismatch("vector dimension does not match form")
    if omega.degree == 0:
        raise ZeroDegree("cannot contract a vector into a 0-form")
    comps = interior_dense(v, omega.components, omega.degree)
    return DifferentialForm(omega.dim, omega.degree - 1, comps)


def symmetrize(t: Tensor) -> Tensor:
    if t.contravariant_rank:
        raise MixedValence("symmetrize expects a fully covariant tensor")
    return Tensor(t.dim, 0, t.covariant_rank, sym_dense(t.components))


def antisymmetrize(t: Tensor) -> DifferentialForm:
    if t.contravariant_rank:
        raise MixedValence("antisymmetrize expects a fully covariant tensor")
    return DifferentialForm(t.dim, t.covariant_rank, alt_dense(t.components))


def contract(t: Tensor, slot_up: int, slot_down: int) -> Tensor:
    if not (0 <= slot_up < t.contravariant_rank):
        raise BadSlots(f"slot_up {slot_up} is not a contravariant slot")
    axis_down = t.contravariant_rank + slot_down
    if not (0 <= slot_down < t.covariant_rank):
        raise BadSlots(f"slot_down {slot_down} is not a covariant slot")
    comps = np.trace(t.components, axis1=slot_up, axis2=axis_down)
    return Tensor(t.dim, t.contravariant_rank - 1, t.covariant_rank - 1, comps)
