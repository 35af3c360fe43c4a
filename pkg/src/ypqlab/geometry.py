"""Metric providers for the five-dimensional space and its cone, with
connection, curvature, Hodge theory and covariant derivatives of form fields.

All coordinate derivatives come from forward-mode jets (module :mod:`.jets`),
so curvature-level quantities are exact up to roundoff.  Finite differences
appear only in the test suite as an independent oracle.

Conventions (fixed here once, validated through identities in the tests):
  * Riemann  R^ρ_{σμν} = ∂_μ Γ^ρ_{νσ} − ∂_ν Γ^ρ_{μσ} + Γ^ρ_{μλ}Γ^λ_{νσ}
    − Γ^ρ_{νλ}Γ^λ_{μσ};  Ricci by first-third contraction.
  * Codifferential d* = −(metric trace of ∇ on the first two slots).
  * Orientation: coordinate order (θ, φ, y, β, ψ) and (r, θ, φ, y, β, ψ).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Sequence

import numpy as np

from . import chart as chart_mod
from .jets import Jet, eval_with_partials
from .tensor import Tensor, DifferentialForm, ext_deriv_from_partials, levi_civita
from .errors import SingularMetric

from .jets import sin as jsin, cos as jcos

__all__ = [
    "MetricProvider",
    "ypq_provider",
    "cone_provider",
    "metric_ypq",
    "metric_cone",
    "inverse_metric",
    "christoffel",
    "riemann",
    "ricci",
    "einstein_residual",
    "covariant_derivative_form",
    "exterior_derivative",
    "codifferential",
    "hodge_star",
    "sharp",
    "flat",
    "volume_form",
    "generic_inverse",
]


@dataclass(frozen=True)
class MetricProvider:
    """A dimension plus metric components evaluable on floats or jets.

    ``grad_components``, when set, is a float-only fast path returning
    (g, ∂g); it exists for the geodesic integrator's inner loop and is
    cross-validated against the jet evaluation in the tests.
    """

    dim: int
    label: str  # "YPQ" or "CONE"
    components: Callable[[Sequence], list]
    params: object = None
    grad_components: Callable = None

    def matrix(self, x):
        g = np.array(self.components(np.asarray(x, dtype=float)), dtype=float)
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise SingularMetric(
                f"{self.label} metric not positive-definite at {np.asarray(x)}")
        return g


def _ypq_covectors(params, z):
    """(coefficient, covector) pairs whose squares sum to the line element."""
    if params.c == 1.0:
        th, _, y, _, _ = z
        p = chart_mod.p_of_y(params, y)
        ct, st = jcos(th), jsin(th)
        return [
            ((1.0 - y) / 6.0, [1.0, 0.0, 0.0, 0.0, 0.0]),
            ((1.0 - y) / 6.0, [0.0, st, 0.0, 0.0, 0.0]),
            (1.0 / p, [0.0, 0.0, 1.0, 0.0, 0.0]),
            (p / 36.0, [0.0, ct, 0.0, 1.0, 0.0]),
            (1.0 / 9.0, [0.0, (y - 1.0) * ct, 0.0, y, 1.0]),
        ]
    # c = 0: homogeneous limit in the unprimed chart (θ, φ, y, α, ψ)
    th, _, y, _, _ = z
    a = params.a
    w = chart_mod.w_of_y(params, y)
    q = chart_mod.q_of_y(params, y)
    p = chart_mod.p_of_y(params, y)
    ct, st = jcos(th), jsin(th)
    f = -y / (3.0 * (a - y * y))
    return [
        (1.0 / 6.0, [1.0, 0.0, 0.0, 0.0, 0.0]),
        (1.0 / 6.0, [0.0, st, 0.0, 0.0, 0.0]),
        (1.0 / p, [0.0, 0.0, 1.0, 0.0, 0.0]),
        (q / 9.0, [0.0, -ct, 0.0, 0.0, 1.0]),
        (w, [0.0, -f * ct, 0.0, 1.0, f]),
    ]


def _metric_from_covectors(pairs, dim):
    g = [[0.0] * dim for _ in range(dim)]
    for coeff, u in pairs:
        for i in range(dim):
            if isinstance(u[i], float) and u[i] == 0.0:
                continue
            for j in range(dim):
                if isinstance(u[j], float) and u[j] == 0.0:
                    continue
                g[i][j] = g[i][j] + coeff * u[i] * u[j]
    return g


def _ypq_metric_grad(params, z):
    """Closed-form (g, ∂g) for the c = 1 chart; floats only."""
    th, _, y, _, _ = z
    a = params.a
    ct, st = np.cos(th), np.sin(th)
    one_y = 1.0 - y
    p = 2.0 * (a - 3.0 * y * y + 2.0 * y ** 3) / one_y
    dp = (2.0 * (-6.0 * y + 6.0 * y * y) * one_y
          + 2.0 * (a - 3.0 * y * y + 2.0 * y ** 3)) / (one_y * one_y)
    g = np.zeros((5, 5))
    dg = np.zeros((5, 5, 5))
    A = one_y / 6.0
    g[0, 0] = A
    g[1, 1] = A * st * st + (p / 36.0 + (y - 1.0) ** 2 / 9.0) * ct * ct
    g[2, 2] = 1.0 / p
    g[3, 3] = p / 36.0 + y * y / 9.0
    g[4, 4] = 1.0 / 9.0
    g[1, 3] = g[3, 1] = (p / 36.0 + y * (y - 1.0) / 9.0) * ct
    g[1, 4] = g[4, 1] = (y - 1.0) / 9.0 * ct
    g[3, 4] = g[4, 3] = y / 9.0
    # θ-derivatives
    dg[0, 1, 1] = 2.0 * st * ct * (A - p / 36.0 - (y - 1.0) ** 2 / 9.0)
    dg[0, 1, 3] = dg[0, 3, 1] = -(p / 36.0 + y * (y - 1.0) / 9.0) * st
    dg[0, 1, 4] = dg[0, 4, 1] = -(y - 1.0) / 9.0 * st
    # y-derivatives
    dg[2, 0, 0] = -1.0 / 6.0
    dg[2, 1, 1] = -st * st / 6.0 + (dp / 36.0 + 2.0 * (y - 1.0) / 9.0) * ct * ct
    dg[2, 2, 2] = -dp / (p * p)
    dg[2, 3, 3] = dp / 36.0 + 2.0 * y / 9.0
    dg[2, 1, 3] = dg[2, 3, 1] = (dp / 36.0 + (2.0 * y - 1.0) / 9.0) * ct
    dg[2, 1, 4] = dg[2, 4, 1] = ct / 9.0
    dg[2, 3, 4] = dg[2, 4, 3] = 1.0 / 9.0
    return g, dg


def ypq_provider(params):
    def components(z):
        return _metric_from_covectors(_ypq_covectors(params, z), 5)
    grad = None
    if params.c == 1.0:
        grad = lambda z: _ypq_metric_grad(params, z)
    return MetricProvider(5, "YPQ", components, params, grad)


def cone_provider(params):
    def components(z):
        r = z[0]
        base = _metric_from_covectors(_ypq_covectors(params, z[1:]), 5)
        r2 = r * r
        g = [[0.0] * 6 for _ in range(6)]
        g[0][0] = 1.0
        for i in range(5):
            for j in range(5):
                g[i + 1][j + 1] = r2 * base[i][j]
        return g
    return MetricProvider(6, "CONE", components, params)


def metric_ypq(params, pt):
    """5×5 metric matrix at a chart point."""
    return ypq_provider(params).matrix(pt.coords() if hasattr(pt, "coords") else pt)


def metric_cone(params, cpt):
    return cone_provider(params).matrix(cpt.coords() if hasattr(cpt, "coords") else cpt)


def inverse_metric(provider, x):
    g = provider.matrix(x)
    ginv = np.linalg.inv(g)
    if np.max(np.abs(g @ ginv - np.eye(provider.dim))) > 1e-10:
        raise SingularMetric("metric inverse inaccurate; matrix near singular")
    return ginv


def generic_inverse(g):
    """Gauss-Jordan inverse that also works on object (jet-valued) matrices."""
    g = np.asarray(g)
    if g.dtype != object:
        return np.linalg.inv(g)
    n = g.shape[0]
    a = np.empty((n, 2 * n), dtype=object)
    a[:, :n] = g
    a[:, n:] = np.eye(n)

    def _val(x):
        while isinstance(x, Jet):
            x = x.v
        return abs(x)

    for col in range(n):
        # partial pivoting on the value part keeps the elimination stable
        best = max(range(col, n), key=lambda r: _val(a[r, col]))
        if best != col:
            a[[col, best], :] = a[[best, col], :]
        piv = a[col, col]
        inv_piv = 1.0 / piv
        a[col, :] = a[col, :] * inv_piv
        for row in range(n):
            if row != col:
                a[row, :] = a[row, :] - a[row, col] * a[col, :]
    return a[:, n:]


# ---------------------------------------------------------------------------
# jet plumbing

def _metric_jets(provider, x, order):
    out = eval_with_partials(lambda z: provider.components(z), list(x), order=order)
    if order == 1:
        g, dg = out
        return np.asarray(g, float), np.asarray(dg, float)
    g, dg, d2g = out
    return np.asarray(g, float), np.asarray(dg, float), np.asarray(d2g, float)


def _christoffel_raw(provider, x):
    g, dg = _metric_jets(provider, x, order=1)
    ginv = np.linalg.inv(g)
    A = dg + dg.transpose(2, 1, 0) - dg.transpose(1, 0, 2)
    return 0.5 * np.einsum("lr,mrn->lmn", ginv, A)


def _christoffel_and_grad(provider, x):
    g, dg, d2g = _metric_jets(provider, x, order=2)
    ginv = np.linalg.inv(g)
    A = dg + dg.transpose(2, 1, 0) - dg.transpose(1, 0, 2)
    gamma = 0.5 * np.einsum("lr,mrn->lmn", ginv, A)
    dginv = -np.einsum("ia,kab,bj->kij", ginv, dg, ginv)
    dA = d2g + d2g.transpose(0, 3, 2, 1) - d2g.transpose(0, 2, 1, 3)
    dgamma = 0.5 * (np.einsum("klr,mrn->klmn", dginv, A)
                    + np.einsum("lr,kmrn->klmn", ginv, dA))
    return gamma, dgamma


def christoffel(provider, x) -> Tensor:
    """Levi-Civita connection coefficients Γ^λ_{μν} (index order λ, μ, ν)."""
    x = _coords(x)
    return Tensor(provider.dim, 1, 2, _christoffel_raw(provider, x))


def riemann(provider, x) -> Tensor:
    x = _coords(x)
    gamma, dgamma = _christoffel_and_grad(provider, x)
    R = (np.einsum("mrns->rsmn", dgamma) - np.einsum("nrms->rsmn", dgamma)
         + np.einsum("rml,lns->rsmn", gamma, gamma)
         - np.einsum("rnl,lms->rsmn", gamma, gamma))
    return Tensor(provider.dim, 1, 3, R)


def ricci(provider, x) -> Tensor:
    R = riemann(provider, x).components
    return Tensor(provider.dim, 0, 2, np.einsum("rsrn->sn", R))


def einstein_residual(provider, x):
    """max|Ric − 4g| on the base, max|Ric| on the (Ricci-flat) cone."""
    x = _coords(x)
    ric = ricci(provider, x).components
    if provider.label == "CONE":
        return float(np.max(np.abs(ric)))
    g = provider.matrix(x)
    return float(np.max(np.abs(ric - 4.0 * g)))


def _coords(x):
    if hasattr(x, "coords"):
        return x.coords()
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# derivatives of differential form fields

def covariant_derivative_form(provider, field, x):
    """(∇ω)_{λ;μ1..μp} as a dense (p+1)-index covariant array.

    The new (derivative) index comes first.  The field evaluator is
    differentiated with jets; Christoffel corrections are applied per slot.
    """
    x = _coords(x)
    omega, dom = eval_with_partials(field.evaluator, list(x), order=1)
    omega = np.asarray(omega, float)
    dom = np.asarray(dom, float)
    gamma = _christoffel_raw(provider, x)
    nabla = dom.copy()
    p = field.degree
    for i in range(p):
        tmp = np.tensordot(gamma, np.moveaxis(omega, i, 0), axes=([0], [0]))
        nabla -= np.moveaxis(tmp, 1, i + 1)
    return nabla


def exterior_derivative(field, x, dim=None):
    """dω as a dense (p+1)-form; metric-free."""
    x = _coords(x)
    dim = len(x) if dim is None else dim
    _, dom = eval_with_partials(field.evaluator, list(x), order=1)
    return ext_deriv_from_partials(np.asarray(dom, float), field.degree, dim)


def codifferential(provider, field, x):
    """d*ω = −g^{λμ}(∇ω)_{λ;μ ...}; degree drops by one."""
    x = _coords(x)
    nabla = covariant_derivative_form(provider, field, x)
    ginv = inverse_metric(provider, x)
    return -np.einsum("lm,lm...->...", ginv, nabla)


# ---------------------------------------------------------------------------
# pointwise Hodge theory and musical maps

def hodge_star(provider, omega: DifferentialForm, x) -> DifferentialForm:
    x = _coords(x)
    n, p = provider.dim, omega.degree
    g = provider.matrix(x)
    ginv = np.linalg.inv(g)
    up = omega.components
    for _ in range(p):
        up = np.tensordot(up, ginv, axes=([0], [0]))
    sqrtg = np.sqrt(np.linalg.det(g))
    if p == 0:
        comps = float(up) * sqrtg * levi_civita(n)
    else:
        comps = np.tensordot(up, levi_civita(n),
                             axes=(tuple(range(p)), tuple(range(p)))) * (sqrtg / factorial(p))
    return DifferentialForm(n, n - p, comps)


def flat(provider, v, x):
    return provider.matrix(_coords(x)) @ np.asarray(v, float)


def sharp(provider, omega, x):
    return inverse_metric(provider, _coords(x)) @ np.asarray(omega, float)


def volume_form(provider, x) -> DifferentialForm:
    x = _coords(x)
    g = provider.matrix(x)
    comps = np.sqrt(np.linalg.det(g)) * levi_civita(provider.dim)
    return DifferentialForm(provider.dim, provider.dim, comps)
