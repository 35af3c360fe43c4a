"""Closed-form evaluators for the named differential forms of the geometry,
the cone-lift map, and the three residual checkers (conformal Killing-Yano,
special Killing, parallel on the cone).

All evaluators are generic over floats and jets, so they can be fed directly
to the jet-based derivative machinery in :mod:`.geometry`.  Complex forms are
kept as (real, imaginary) pairs of real forms; no complex arithmetic enters
the tensor core.

Coordinate index conventions: base chart (θ, φ, y, β, ψ) = (0..4); cone chart
(r, θ, φ, y, β, ψ) = (0..5).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chart import p_of_y
from .errors import UnsupportedC
from .jets import eval_with_partials, sin, cos, sqrt
from .geometry import (
    covariant_derivative_form,
    codifferential,
    exterior_derivative,
)
from .tensor import (
    DifferentialForm,
    ext_deriv_from_partials,
    form_from_terms,
    wedge_dense,
)

__all__ = [
    "FormField",
    "NamedFormCatalog",
    "build_catalog",
    "eval_eta",
    "eval_sigma",
    "eval_psi",
    "eval_phi_k",
    "eval_xi",
    "eval_upsilon",
    "eval_base_volume",
    "eval_kahler_cone",
    "eval_complex_volume",
    "cone_lift",
    "exterior_derivative_field",
    "cky_residual",
    "sky_residual",
    "parallel_residual",
]


@dataclass(frozen=True)
class FormField:
    """A named p-form field: an evaluator differentiable via jets."""

    name: str
    dim: int
    degree: int
    evaluator: Callable

    def at(self, x) -> DifferentialForm:
        comps = self.evaluator(list(np.asarray(x, dtype=float)))
        if self.degree == 0:
            comps = np.asarray(comps, dtype=float)
        return DifferentialForm(self.dim, self.degree, np.asarray(comps, dtype=float))


def _require_sasaki(params):
    if params.c != 1.0:
        raise UnsupportedC("explicit form evaluators are defined for c = 1 only")


# ---------------------------------------------------------------------------
# base-space evaluators

def _eta_terms(z):
    th, _, y, _, _ = z
    ct = cos(th)
    return [((1,), (y - 1.0) * ct / 3.0), ((3,), y / 3.0), ((4,), 1.0 / 3.0)]


def _sigma_terms(z):
    return _eta_terms(z)[:2]


def _psi_components(params, z):
    th, _, y, _, _ = z
    st, ct = sin(th), cos(th)
    terms = [
        ((0, 1, 4), (1.0 - y) * st / 9.0),
        ((2, 3, 4), 1.0 / 9.0),
        ((2, 1, 4), ct / 9.0),
        ((2, 3, 1), -ct / 9.0),
        ((3, 0, 1), (1.0 - y) * y * st / 9.0),
    ]
    return form_from_terms(5, 3, terms)


def _xi_upsilon_brackets(params, z):
    """The two 2-form blocks mixed by the ψ rotation, and the common prefactor."""
    th, _, y, _, _ = z
    st, ct = sin(th), cos(th)
    p = p_of_y(params, y)
    pref = sqrt((1.0 - y) / (6.0 * p))
    p6 = p / 6.0
    b1 = form_from_terms(5, 2, [((2, 0), -1.0), ((3, 1), p6 * st)])
    b2 = form_from_terms(5, 2, [((2, 1), -st), ((3, 0), -p6), ((0, 1), p6 * ct)])
    return pref, b1, b2


def _xi_components(params, z):
    ps = z[4]
    pref, b1, b2 = _xi_upsilon_brackets(params, z)
    return _scalmul(pref, _sub(_scalmul(cos(ps), b1), _scalmul(sin(ps), b2)))


def _upsilon_components(params, z):
    ps = z[4]
    pref, b1, b2 = _xi_upsilon_brackets(params, z)
    return _scalmul(pref, _add(_scalmul(cos(ps), b2), _scalmul(sin(ps), b1)))


def _base_volume_components(params, z):
    """(Re, Im) of the holomorphic 2-form of the four-dimensional base."""
    th, _, y, _, _ = z
    st, ct = sin(th), cos(th)
    p = p_of_y(params, y)
    pref = sqrt((1.0 - y) / (6.0 * p))
    p6 = p / 6.0
    re = form_from_terms(5, 2, [((0, 2), pref), ((1, 3), -pref * p6 * st)])
    im = form_from_terms(5, 2, [((0, 3), pref * p6), ((0, 1), pref * p6 * ct),
                                ((1, 2), pref * st)])
    return re, im


# ---------------------------------------------------------------------------
# cone evaluators

def _omega_cone_components(params, zc):
    r = zc[0]
    th, _, y, _, _ = zc[1:]
    st, ct = sin(th), cos(th)
    r2 = r * r
    terms = [
        ((1, 2), r2 * (1.0 - y) * st / 6.0),
        ((3, 4), r2 / 6.0),
        ((3, 2), r2 * ct / 6.0),
        ((0, 4), r * y / 3.0),
        ((0, 5), r / 3.0),
        ((0, 2), -r * (1.0 - y) * ct / 3.0),
    ]
    return form_from_terms(6, 2, terms)


def _embed(arr, degree, obj=False):
    """Index-inclusion of a base-chart form into the cone chart (zero r-slots)."""
    dtype = object if obj or getattr(arr, "dtype", None) == object else float
    out = np.zeros((6,) * degree, dtype=dtype)
    if degree == 0:
        return arr
    out[(slice(1, None),) * degree] = arr
    return out


_DR = np.zeros(6)
_DR[0] = 1.0


def _complex_volume_components(params, zc):
    r = zc[0]
    ps = zc[5]
    reb, imb = _base_volume_components(params, zc[1:])
    reb_e, imb_e = _embed(reb, 2), _embed(imb, 2)
    eta_e = _embed(form_from_terms(5, 1, _eta_terms(zc[1:])), 1)
    r_eta = _scalmul(r, eta_e)
    re3 = _sub(wedge_dense(reb_e, 2, _DR, 1, 6), wedge_dense(imb_e, 2, r_eta, 1, 6))
    im3 = _add(wedge_dense(reb_e, 2, r_eta, 1, 6), wedge_dense(imb_e, 2, _DR, 1, 6))
    cps, sps = cos(ps), sin(ps)
    r2 = r * r
    re = _scalmul(r2, _sub(_scalmul(cps, re3), _scalmul(sps, im3)))
    im = _scalmul(r2, _add(_scalmul(cps, im3), _scalmul(sps, re3)))
    return re, im


def _scalmul(s, arr):
    if isinstance(s, (int, float)) and getattr(arr, "dtype", None) != object:
        return s * arr
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = s * arr[idx]
    return out


def _add(a, b):
    return a + b


def _sub(a, b):
    return a - b


# ---------------------------------------------------------------------------
# fields, catalog and derived fields

def _field(name, dim, degree, fn):
    return FormField(name, dim, degree, fn)


def eta_field(params):
    _require_sasaki(params)
    return _field("ETA", 5, 1, lambda z: form_from_terms(5, 1, _eta_terms(z)))


def sigma_field(params):
    _require_sasaki(params)
    return _field("SIGMA", 5, 1, lambda z: form_from_terms(5, 1, _sigma_terms(z)))


def psi_field(params):
    _require_sasaki(params)
    return _field("PSI", 5, 3, lambda z: _psi_components(params, z))


def phi_field(params, k):
    """Φ_k = (dη)^k, computed by jet exterior derivative and wedge power."""
    _require_sasaki(params)
    eta_ev = eta_field(params).evaluator

    def evaluator(z):
        _, dom = eval_with_partials(eta_ev, list(z), order=1)
        deta = ext_deriv_from_partials(dom, 1, 5)
        out = deta
        for _ in range(k - 1):
            out = wedge_dense(out, 2, deta, 2, 5)
        return out

    return _field(f"PHI{k}", 5, 2 * k, evaluator)


def xi_field(params):
    _require_sasaki(params)
    return _field("XI", 5, 2, lambda z: _xi_components(params, z))


def upsilon_field(params):
    _require_sasaki(params)
    return _field("UPSILON", 5, 2, lambda z: _upsilon_components(params, z))


def base_volume_fields(params):
    _require_sasaki(params)
    return (_field("RE_DV_BASE", 5, 2, lambda z: _base_volume_components(params, z)[0]),
            _field("IM_DV_BASE", 5, 2, lambda z: _base_volume_components(params, z)[1]))


def kahler_cone_field(params):
    _require_sasaki(params)
    return _field("OMEGA_CONE", 6, 2, lambda z: _omega_cone_components(params, z))


def complex_volume_fields(params):
    _require_sasaki(params)
    return (_field("RE_DV_CONE", 6, 3, lambda z: _complex_volume_components(params, z)[0]),
            _field("IM_DV_CONE", 6, 3, lambda z: _complex_volume_components(params, z)[1]))


def cone_lift(field, params=None):
    """Lift a base p-form ω to the cone: r^p dr∧ω + r^{p+1}/(p+1) dω."""
    p = field.degree

    def evaluator(zc):
        r = zc[0]
        base = list(zc[1:])
        omega, dom = eval_with_partials(field.evaluator, base, order=1)
        domega = ext_deriv_from_partials(dom, p, 5)
        obj = getattr(omega, "dtype", None) == object or not isinstance(r, (int, float))
        om_e = _embed(omega, p, obj=obj)
        dom_e = _embed(domega, p + 1, obj=obj)
        rp = r ** p if isinstance(r, (int, float)) else r.__pow__(p)
        first = _scalmul(rp, wedge_dense(_DR, 1, om_e, p, 6))
        second = _scalmul(rp * r / (p + 1.0), dom_e)
        return _add(first, second)

    return _field(f"LIFT_{field.name}", 6, p + 1, evaluator)


def exterior_derivative_field(field):
    """dω as a new field (evaluator differentiates ω with nested jets)."""
    p, dim = field.degree, field.dim

    def evaluator(z):
        _, dom = eval_with_partials(field.evaluator, list(z), order=1)
        return ext_deriv_from_partials(dom, p, dim)

    return _field(f"D_{field.name}", dim, p + 1, evaluator)


def constant_dy_field():
    """Constant-coefficient dy; not a Killing form (negative control)."""
    comps = np.zeros(5)
    comps[2] = 1.0
    return _field("CONTROL_DY", 5, 1, lambda z: comps.copy() + 0.0 * z[0] * comps)


def cone_control_field():
    """r·dr∧dθ on the cone; not parallel (negative control)."""
    return _field("CONTROL_CONE", 6, 2,
                  lambda zc: form_from_terms(6, 2, [((0, 1), zc[0])]))


@dataclass(frozen=True)
class NamedFormCatalog:
    params: object
    eta: FormField
    sigma: FormField
    psi: FormField
    phi1: FormField
    phi2: FormField
    xi: FormField
    upsilon: FormField
    re_dv_base: FormField
    im_dv_base: FormField
    omega_cone: FormField
    re_dv_cone: FormField
    im_dv_cone: FormField


def build_catalog(params) -> NamedFormCatalog:
    _require_sasaki(params)
    reb, imb = base_volume_fields(params)
    rec, imc = complex_volume_fields(params)
    return NamedFormCatalog(
        params=params,
        eta=eta_field(params),
        sigma=sigma_field(params),
        psi=psi_field(params),
        phi1=phi_field(params, 1),
        phi2=phi_field(params, 2),
        xi=xi_field(params),
        upsilon=upsilon_field(params),
        re_dv_base=reb,
        im_dv_base=imb,
        omega_cone=kahler_cone_field(params),
        re_dv_cone=rec,
        im_dv_cone=imc,
    )


# top-level convenience evaluators ----------------------------------------

def eval_eta(params, pt):
    return eta_field(params).at(_coords(pt))


def eval_sigma(params, pt):
    return sigma_field(params).at(_coords(pt))


def eval_psi(params, pt):
    return psi_field(params).at(_coords(pt))


def eval_phi_k(params, pt, k):
    return phi_field(params, k).at(_coords(pt))


def eval_xi(params, pt):
    return xi_field(params).at(_coords(pt))


def eval_upsilon(params, pt):
    return upsilon_field(params).at(_coords(pt))


def eval_base_volume(params, pt):
    re, im = base_volume_fields(params)
    return re.at(_coords(pt)), im.at(_coords(pt))


def eval_kahler_cone(params, cpt):
    return kahler_cone_field(params).at(_coords(cpt))


def eval_complex_volume(params, cpt):
    re, im = complex_volume_fields(params)
    return re.at(_coords(cpt)), im.at(_coords(cpt))


def _coords(pt):
    return pt.coords() if hasattr(pt, "coords") else np.asarray(pt, dtype=float)


# ---------------------------------------------------------------------------
# residual checkers

def cky_residual(provider, field, x):
    """Conformal Killing-Yano residual at a point (max over basis vectors)."""
    x = _coords(x)
    n, p = provider.dim, field.degree
    nabla = covariant_derivative_form(provider, field, x)
    dom = exterior_derivative(field, x, dim=n)
    cod = codifferential(provider, field, x)
    g = provider.matrix(x)
    worst = 0.0
    for a in range(n):
        res = nabla[a] - dom[a] / (p + 1.0)
        res = res + np.asarray(wedge_dense(g[a], 1, cod, p - 1, n), float) / (n - p + 1.0)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def sky_residual(provider, field, c_const, x):
    """Special Killing residual ∇_X(dω) − c·X♭∧ω at a point."""
    x = _coords(x)
    n, p = provider.dim, field.degree
    dfield = exterior_derivative_field(field)
    nabla_d = covariant_derivative_form(provider, dfield, x)
    omega = np.asarray(field.evaluator(list(x)), float)
    g = provider.matrix(x)
    worst = 0.0
    for a in range(n):
        res = nabla_d[a] - c_const * np.asarray(wedge_dense(g[a], 1, omega, p, n), float)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def parallel_residual(provider, field, x):
    """max-norm of the full covariant derivative ∇ω (cone parallelism gate)."""
    nabla = covariant_derivative_form(provider, field, _coords(x))
    return float(np.max(np.abs(nabla)))
