"""Stäckel-Killing tensors from Killing-form pairs, geodesic Hamiltonian
flow, conserved quantities with drift measurement, and the functional
independence rank of the first integrals.

Momenta live in the chart of :mod:`.chart`: (P_θ, P_φ, P_y, P_β, P_ψ).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .chart import ChartPoint, check_interior, compute_domain
from .errors import (
    BadInitialState,
    DegenerateState,
    DegreeMismatch,
    PointOutOfDomain,
    StepFailure,
)
from .geometry import generic_inverse, ypq_provider
from .jets import Jet, eval_with_partials, seed_jets, sin, cos
from .tensor import Tensor, sym_dense

__all__ = [
    "StackelTensor",
    "PhaseState",
    "ConservedSet",
    "Trajectory",
    "stackel_from_pair",
    "killing_tensor_residual",
    "hamiltonian",
    "conserved_set",
    "geodesic_rhs",
    "integrate_geodesic",
    "drift_report",
    "independence_rank",
    "poisson_bracket_with_h",
    "build_invariants",
    "CATALOG_PAIRS",
]

# the admissible Killing-form pairings feeding quadratic invariants
CATALOG_PAIRS = (("psi", "psi"), ("xi", "xi"), ("upsilon", "upsilon"), ("xi", "upsilon"))


@dataclass(frozen=True)
class StackelTensor:
    """Rank-2 symmetric covariant field with its source-form provenance."""

    provenance: tuple
    degree: int
    evaluator: Callable  # coords -> dense symmetric matrix (generic scalars)

    def at(self, x) -> Tensor:
        comps = np.asarray(self.evaluator(list(np.asarray(x, float))), float)
        return Tensor(5, 0, 2, comps)

    @property
    def label(self):
        return f"K({self.provenance[0]},{self.provenance[1]})"


@dataclass(frozen=True)
class PhaseState:
    point: ChartPoint
    momenta: np.ndarray

    def vector(self):
        return np.concatenate([self.point.coords(), np.asarray(self.momenta, float)])

    @staticmethod
    def from_vector(v):
        return PhaseState(ChartPoint.from_coords(v[:5]), np.asarray(v[5:], float))


@dataclass(frozen=True)
class ConservedSet:
    H: float
    P_phi: float
    P_beta: float
    P_psi: float
    J2: float
    quadratics: tuple  # of (label, value)

    def as_dict(self):
        d = {"H": self.H, "P_phi": self.P_phi, "P_beta": self.P_beta,
             "P_psi": self.P_psi, "J2": self.J2}
        d.update({lbl: val for lbl, val in self.quadratics})
        return d


def _raise_last(arr, ginv, k):
    rank = arr.ndim if hasattr(arr, "ndim") else 0
    for ax in range(rank - k, rank):
        arr = np.moveaxis(np.tensordot(arr, ginv, axes=([ax], [0])), -1, ax)
    return arr


def stackel_from_pair(provider, omega_field, sigma_field):
    """K_{μν} = ω_{μλ..}σ_ν^{λ..} + σ_{μλ..}ω_ν^{λ..} with g-raised indices."""
    if omega_field.degree != sigma_field.degree:
        raise DegreeMismatch(
            f"degrees {omega_field.degree} and {sigma_field.degree} differ")
    r = omega_field.degree

    def evaluator(z):
        g = np.array(provider.components(z), dtype=object)
        ginv = generic_inverse(g)
        om = np.asarray(omega_field.evaluator(z))
        sg = np.asarray(sigma_field.evaluator(z))
        if om.dtype != object:
            g = g.astype(float)
            ginv = ginv.astype(float)
        up = _raise_last(sg, ginv, r - 1)
        axes = (tuple(range(1, r)), tuple(range(1, r)))
        k1 = np.tensordot(om, up, axes=axes)
        return k1 + k1.T

    return StackelTensor((omega_field.name, sigma_field.name), r, evaluator)


def killing_tensor_residual(provider, stackel, x):
    """max-norm of ∇_(λ K_{μν}) — zero exactly for a Killing tensor.

    The residual is normalized by the size of the cancelling terms, since
    the tensor components grow without bound toward the chart boundary.
    """
    x = np.asarray(x, float)
    K, dK = eval_with_partials(stackel.evaluator, list(x), order=1)
    K = np.asarray(K, float)
    dK = np.asarray(dK, float)
    from .geometry import _christoffel_raw
    gamma = _christoffel_raw(provider, x)
    nabla = (dK - np.einsum("rlm,rn->lmn", gamma, K)
             - np.einsum("rln,mr->lmn", gamma, K))
    scale = max(1.0, float(np.max(np.abs(dK))))
    return float(np.max(np.abs(sym_dense(nabla)))) / scale


# ---------------------------------------------------------------------------
# Hamiltonian mechanics

def _hamiltonian_generic(provider, z, p):
    g = np.array(provider.components(z), dtype=object)
    if not any(isinstance(c, Jet) for c in np.asarray(z).flat):
        g = g.astype(float)
        ginv = np.linalg.inv(g)
    else:
        ginv = generic_inverse(g)
    h = 0.0
    for i in range(5):
        for j in range(5):
            h = h + 0.5 * p[i] * ginv[i, j] * p[j]
    return h


def _j2_generic(z, p):
    th = z[0]
    st, ct = sin(th), cos(th)
    # The SU(2)-invariant fiber momentum is the one conjugate to the
    # unprimed fiber angle; in this chart that is P_ψ − P_β (the fiber
    # coordinates mix under the change to the primed chart).
    pf = p[4] - p[3]
    return p[0] * p[0] + ((p[1] + ct * pf) ** 2) / (st * st) + pf * pf


def _quadratic_generic(provider, stackel, z, p):
    g = np.array(provider.components(z), dtype=object)
    if not any(isinstance(c, Jet) for c in np.asarray(z).flat):
        g = g.astype(float)
        ginv = np.linalg.inv(g)
    else:
        ginv = generic_inverse(g)
    K = np.asarray(stackel.evaluator(z))
    Kup = _raise_last(_raise_last(K, ginv, 1).T, ginv, 1)
    q = 0.0
    for i in range(5):
        for j in range(5):
            q = q + p[i] * Kup[i, j] * p[j]
    return q


def hamiltonian(params_or_provider, state: PhaseState):
    provider = _as_provider(params_or_provider)
    return float(_hamiltonian_generic(provider, list(state.point.coords()),
                                      list(state.momenta)))


def _as_provider(obj):
    return obj if hasattr(obj, "components") else ypq_provider(obj)


def build_invariants(provider, stackels=()):
    """Ordered (name, fn(z, p)) list: classical invariants, then quadratics."""
    inv = [
        ("H", lambda z, p: _hamiltonian_generic(provider, z, p)),
        ("P_phi", lambda z, p: p[1]),
        ("P_beta", lambda z, p: p[3]),
        ("P_psi", lambda z, p: p[4]),
        ("J2", lambda z, p: _j2_generic(z, p)),
    ]
    for st in stackels:
        inv.append((st.label,
                    lambda z, p, st=st: _quadratic_generic(provider, st, z, p)))
    return inv


def conserved_set(provider, state: PhaseState, stackels=()) -> ConservedSet:
    provider = _as_provider(provider)
    z, p = list(state.point.coords()), list(state.momenta)
    quads = tuple((st.label, float(_quadratic_generic(provider, st, z, p)))
                  for st in stackels)
    return ConservedSet(
        H=float(_hamiltonian_generic(provider, z, p)),
        P_phi=float(p[1]), P_beta=float(p[3]), P_psi=float(p[4]),
        J2=float(_j2_generic(z, p)),
        quadratics=quads,
    )


def geodesic_rhs(provider, state: PhaseState):
    """Hamilton's equations for H = ½ g^{μν} p_μ p_ν."""
    provider = _as_provider(provider)
    v = state.vector()
    return PhaseState.from_vector(np.concatenate(_rhs_raw(provider, v)))


def _rhs_raw(provider, v):
    z, p = v[:5], v[5:]
    g, dg = _metric_and_grad(provider, z)
    ginv = np.linalg.inv(g)
    u = ginv @ p
    dx = u
    dp = 0.5 * np.einsum("kij,i,j->k", dg, u, u)
    return dx, dp


def _metric_and_grad(provider, z):
    if provider.grad_components is not None:
        return provider.grad_components(z)
    out = eval_with_partials(lambda w: provider.components(w), list(z), order=1)
    return np.asarray(out[0], float), np.asarray(out[1], float)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: tuple
    exited: bool = False
    exit_time: float = np.nan


def integrate_geodesic(provider_or_params, state0: PhaseState, t_end,
                       rtol=1e-10, atol=1e-12, n_samples=101, domain=None):
    """Adaptive Dormand-Prince integration of the geodesic flow.

    Stops with a domain-exit event when the trajectory comes within the
    sampling margin of a chart boundary (reported, not an error).
    """
    provider = _as_provider(provider_or_params)
    params = provider.params
    if domain is None:
        domain = compute_domain(params)
    try:
        check_interior(domain, state0.point)
    except PointOutOfDomain as exc:
        raise BadInitialState(str(exc))

    if t_end == 0.0:
        return Trajectory(np.array([0.0]), (state0,))

    m = domain.margin
    dy = domain.y2 - domain.y1

    def rhs(t, v):
        return np.concatenate(_rhs_raw(provider, v))

    events = [
        lambda t, v: v[0] - m,
        lambda t, v: np.pi - m - v[0],
        lambda t, v: v[2] - (domain.y1 + m * dy),
        lambda t, v: (domain.y2 - m * dy) - v[2],
    ]
    for ev in events:
        ev.terminal = True

    sol = solve_ivp(rhs, (0.0, t_end), state0.vector(), method="DOP853",
                    rtol=rtol, atol=atol,
                    t_eval=np.linspace(0.0, t_end, n_samples),
                    events=events, first_step=1e-3)
    if sol.status == -1:
        raise StepFailure(sol.message)
    exited = sol.status == 1
    times = sol.t
    states = tuple(PhaseState.from_vector(sol.y[:, k]) for k in range(sol.y.shape[1]))
    exit_time = np.nan
    if exited:
        exit_time = float(min(t[0] for t in sol.t_events if len(t)))
    if len(states) == 0:
        # exited before the first sample; keep the initial state
        states = (state0,)
        times = np.array([0.0])
    return Trajectory(np.asarray(times), states, exited, exit_time)


def drift_report(provider_or_params, trajectory: Trajectory, stackels=()):
    """Per-invariant max relative drift |Q(t) − Q(0)| / max(1, |Q(0)|)."""
    provider = _as_provider(provider_or_params)
    sets = [conserved_set(provider, s, stackels) for s in trajectory.states]
    ref = sets[0].as_dict()
    out = {}
    for name, q0 in ref.items():
        drift = max(abs(s.as_dict()[name] - q0) for s in sets)
        out[name] = drift / max(1.0, abs(q0))
    return out


# ---------------------------------------------------------------------------
# Poisson brackets and functional independence

def _phase_gradient(fn, z, p):
    """(∂fn/∂z, ∂fn/∂p) via a shared 10-seed jet space."""
    zj = seed_jets(list(z), order=1, nseeds=10, offset=0)
    pj = seed_jets(list(p), order=1, nseeds=10, offset=5)
    out = fn(zj, pj)
    if isinstance(out, Jet):
        return out.g[:5].astype(float), out.g[5:].astype(float)
    return np.zeros(5), np.zeros(5)


def poisson_bracket_with_h(provider, fn, state: PhaseState):
    """{H, Q} at a phase point, by exact phase-space gradients."""
    provider = _as_provider(provider)
    z, p = state.point.coords(), np.asarray(state.momenta, float)
    hx, hp = _phase_gradient(lambda zz, pp: _hamiltonian_generic(provider, zz, pp), z, p)
    qx, qp = _phase_gradient(fn, z, p)
    return float(hp @ qx - hx @ qp)


def independence_rank(provider, state: PhaseState, invariants, cutoff=1e-8):
    """Numerical rank of the phase-space Jacobian of the given invariants.

    Rank uses a relative singular-value cutoff; if the verdict changes when
    the cutoff is scaled by 10 the state is reported as degenerate.
    Returns (rank, singular_values).
    """
    provider = _as_provider(provider)
    z, p = state.point.coords(), np.asarray(state.momenta, float)
    rows = []
    for _, fn in invariants:
        gx, gp = _phase_gradient(fn, z, p)
        rows.append(np.concatenate([gx, gp]))
    jac = np.array(rows)
    sv = np.linalg.svd(jac, compute_uv=False)
    top = sv[0] if len(sv) else 0.0
    rank = int(np.sum(sv > cutoff * top))
    rank10 = int(np.sum(sv > 10.0 * cutoff * top))
    if rank != rank10:
        raise DegenerateState(
            f"rank unstable under cutoff scaling: {rank} vs {rank10}; sv={sv}")
    return rank, sv
