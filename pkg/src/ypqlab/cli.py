"""Command-line entry point: machine-readable verification reports, geodesic
drift tables and independence-rank summaries.

Formats: one JSON document per verify/rank run (UTF-8, fixed key order), CSV
with a header row for geodesic drift.  Exit codes: 0 all checks pass, 1 any
check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import chart, forms, geometry, integrability
from .errors import YpqError

ALL_CHECK_GROUPS = ("einstein", "compat", "cky", "sky", "parallel",
                    "structure", "stackel", "poisson")


@dataclass
class RunConfig:
    a: float = 0.5
    c: float = 1.0
    seed: int = 0
    n_points: int = 100
    tol: float = 1e-8
    t_end: float = 100.0
    rtol: float = 1e-10
    margin: float = 1e-3
    out: str = ""
    checks: tuple = ALL_CHECK_GROUPS


def _sample_points(domain, rng, n):
    return [chart.sample_point(domain, rng) for _ in range(n)]


def _sample_cone_points(domain, rng, n):
    return [chart.sample_cone_point(domain, rng) for _ in range(n)]


def _record(name, identity, points, residual, tol, error=None):
    ok = error is None and residual is not None and residual < tol
    return {
        "check": name,
        "identity": identity,
        "points": points,
        "max_residual": residual,
        "tolerance": tol,
        "pass": bool(ok),
        "error": error,
    }


def _guarded(fn):
    try:
        return fn(), None
    except Exception as exc:  # a failing check must not abort the suite
        return None, f"{type(exc).__name__}: {exc}"


def run_verify(config: RunConfig):
    """Run every enabled residual gate and assemble the report."""
    t0 = time.perf_counter()
    params = chart.validate_params(config.a, config.c)
    domain = chart.compute_domain(params, margin=config.margin)
    rng = np.random.default_rng(config.seed)
    base = geometry.ypq_provider(params)
    cone = geometry.cone_provider(params)
    pts = _sample_points(domain, rng, config.n_points)
    cpts = _sample_cone_points(domain, rng, config.n_points)
    tol = config.tol
    records = []
    skipped = []
    sasaki = params.c == 1.0

    def enabled(group):
        return group in config.checks

    def sweep(points, fn):
        return max(fn(x) for x in points)

    if enabled("einstein"):
        res, err = _guarded(lambda: sweep(pts, lambda q: geometry.einstein_residual(base, q)))
        records.append(_record("einstein_base", "Ric = 4 g", len(pts), res, tol, err))
        res, err = _guarded(lambda: sweep(cpts, lambda q: geometry.einstein_residual(cone, q)))
        records.append(_record("einstein_cone", "Ric_cone = 0", len(cpts), res, tol, err))

    if enabled("compat"):
        res, err = _guarded(lambda: sweep(pts, lambda q: _compat_residual(base, q)))
        records.append(_record("metric_compatibility", "nabla g = 0",
                               len(pts), res, 1e-10, err))

    if sasaki:
        cat = forms.build_catalog(params)
        m = min(config.n_points, len(pts))
        sub = pts[:m]
        csub = cpts[:m]

        if enabled("cky"):
            for f, closed in ((cat.psi, False), (cat.xi, False), (cat.upsilon, False),
                              (cat.phi1, True), (cat.phi2, True)):
                res, err = _guarded(lambda f=f: sweep(
                    sub, lambda q: forms.cky_residual(base, f, q)))
                records.append(_record(f"cky_{f.name.lower()}",
                                       "conformal Killing-Yano equation",
                                       m, res, tol, err))
                if closed:
                    res, err = _guarded(lambda f=f: sweep(
                        sub, lambda q: float(np.max(np.abs(
                            geometry.exterior_derivative(f, q.coords()))))))
                    records.append(_record(f"closed_{f.name.lower()}", "d omega = 0",
                                           m, res, 1e-9, err))
                else:
                    res, err = _guarded(lambda f=f: sweep(
                        sub, lambda q: float(np.max(np.abs(
                            geometry.codifferential(base, f, q.coords()))))))
                    records.append(_record(f"coclosed_{f.name.lower()}", "d* omega = 0",
                                           m, res, 1e-9, err))
            res, err = _guarded(lambda: min(
                forms.cky_residual(base, forms.constant_dy_field(), q) for q in sub))
            records.append({
                "check": "cky_negative_control",
                "identity": "constant dy is not Killing (residual must exceed 1e-3)",
                "points": m,
                "max_residual": res,
                "tolerance": 1e-3,
                "pass": bool(err is None and res is not None and res > 1e-3),
                "error": err,
            })

        if enabled("sky"):
            for f, c_const in ((cat.psi, -4.0), (cat.xi, -3.0), (cat.upsilon, -3.0)):
                res, err = _guarded(lambda f=f, c=c_const: sweep(
                    sub, lambda q: forms.sky_residual(base, f, c, q)))
                records.append(_record(f"sky_{f.name.lower()}",
                                       f"special Killing with constant {c_const}",
                                       m, res, tol, err))

        if enabled("parallel"):
            lifted = [forms.cone_lift(f) for f in (cat.psi, cat.xi, cat.upsilon)]
            for f in [cat.omega_cone, cat.re_dv_cone, cat.im_dv_cone] + lifted:
                res, err = _guarded(lambda f=f: sweep(
                    csub, lambda q: forms.parallel_residual(cone, f, q)))
                records.append(_record(f"parallel_{f.name.lower()}",
                                       "parallel form on the cone",
                                       m, res, tol, err))

        if enabled("structure"):
            res, err = _guarded(lambda: sweep(csub, lambda q: _lift_eta_residual(cat, q)))
            records.append(_record("lift_eta_equals_kahler",
                                   "cone lift of eta equals the cone Kahler form",
                                   m, res, 1e-12, err))
            res, err = _guarded(lambda: sweep(sub, lambda q: _dsigma_residual(cat, q)))
            records.append(_record("dsigma_twice_kahler",
                                   "d sigma = 2 * base Kahler form",
                                   m, res, 1e-10, err))
            res, err = _guarded(lambda: sweep(sub, lambda q: _psi_eta_deta_residual(cat, q)))
            records.append(_record("psi_eta_wedge_deta", "Psi = eta ^ d eta",
                                   m, res, 1e-10, err))
            res, err = _guarded(lambda: sweep(csub, lambda q: _kahler_volume_residual(cone, cat, q)))
            records.append(_record("kahler_volume", "Omega^3 / 3! = volume form",
                                   m, res, 1e-10, err))
            res, err = _guarded(lambda: _complex_volume_spread(cone, cat, csub))
            records.append(_record("complex_volume_ratio",
                                   "dV ^ conj(dV) proportional to volume, constant ratio",
                                   m, res, 1e-9, err))

        if enabled("stackel"):
            stackels = _stackels(base, cat)
            for st in stackels:
                res, err = _guarded(lambda st=st: sweep(
                    sub, lambda q: integrability.killing_tensor_residual(
                        base, st, q.coords())))
                records.append(_record(f"stackel_{st.label}",
                                       "symmetrized covariant derivative = 0",
                                       m, res, tol, err))

        if enabled("poisson"):
            stackels = _stackels(base, cat)
            invs = integrability.build_invariants(base, stackels)
            # bracket cancellation error grows cubically with the momenta
            # and sharply toward the poles, so the bracket gate uses gentler
            # phase states sampled with a wider standoff
            pb_domain = chart.compute_domain(params, margin=max(config.margin, 0.1))
            states = [_random_state(pb_domain, rng, scale=0.2) for _ in range(m)]

            def worst_bracket():
                worst = 0.0
                for s in states:
                    for _, fn in invs:
                        worst = max(worst, abs(
                            integrability.poisson_bracket_with_h(base, fn, s)))
                return worst
            res, err = _guarded(worst_bracket)
            records.append(_record("poisson_brackets", "{H, Q} = 0 for every invariant",
                                   m, res, 1e-9, err))
    else:
        for group in ("cky", "sky", "parallel", "structure", "stackel", "poisson"):
            if enabled(group):
                skipped.append(group)

    report = {
        "params": {"a": params.a, "c": params.c},
        "seed": config.seed,
        "n_points": config.n_points,
        "checks": records,
        "skipped": skipped,
        "all_pass": all(r["pass"] for r in records),
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    return report


def _compat_residual(provider, pt):
    x = pt.coords()
    from .jets import eval_with_partials
    g, dg = (np.asarray(t, float) for t in eval_with_partials(
        lambda z: provider.components(z), list(x), order=1))
    gamma = geometry._christoffel_raw(provider, x)
    res = (dg - np.einsum("rlm,rn->lmn", gamma, g)
           - np.einsum("rln,mr->lmn", gamma, g))
    return float(np.max(np.abs(res)))


def _lift_eta_residual(cat, cpt):
    x = cpt.coords()
    lifted = forms.cone_lift(cat.eta).at(x).components
    omega = cat.omega_cone.at(x).components
    return float(np.max(np.abs(lifted - omega)))


def _dsigma_residual(cat, pt):
    """dσ restricted to base indices vs 2× the base Kähler block of the cone form."""
    x = pt.coords()
    dsigma = geometry.exterior_derivative(cat.sigma, x)
    cone_x = np.concatenate(([1.0], x))
    omega = cat.omega_cone.at(cone_x).components
    base_block = omega[1:5, 1:5]  # θ, φ, y, β rows/cols at r = 1
    return float(np.max(np.abs(dsigma[:4, :4] - 2.0 * base_block)))


def _psi_eta_deta_residual(cat, pt):
    from .tensor import wedge_dense, ext_deriv_from_partials
    from .jets import eval_with_partials
    x = list(pt.coords())
    eta = np.asarray(cat.eta.evaluator(x), float)
    _, dom = eval_with_partials(cat.eta.evaluator, x, order=1)
    deta = ext_deriv_from_partials(np.asarray(dom, float), 1, 5)
    lhs = np.asarray(wedge_dense(eta, 1, deta, 2, 5), float)
    return float(np.max(np.abs(lhs - cat.psi.at(x).components)))


def _kahler_volume_residual(cone, cat, cpt):
    from .tensor import wedge_dense
    x = cpt.coords()
    om = cat.omega_cone.at(x).components
    om2 = wedge_dense(om, 2, om, 2, 6)
    om3 = np.asarray(wedge_dense(om2, 4, om, 2, 6), float) / 6.0
    vol = geometry.volume_form(cone, x).components
    return float(np.max(np.abs(om3 - vol)))


def _complex_volume_spread(cone, cat, cpts):
    """dV ∧ conj(dV) = (Re + i Im) ∧ (Re − i Im) = −2i Re∧Im for a (3,0)-form.

    Measures the ratio of the real 6-form Re∧Im to the Riemannian volume and
    returns the relative spread across points (plus any stray real part).
    """
    from .tensor import wedge_dense
    ratios = []
    worst_real = 0.0
    for cpt in cpts:
        x = cpt.coords()
        re = cat.re_dv_cone.at(x).components
        im = cat.im_dv_cone.at(x).components
        cross = np.asarray(wedge_dense(re, 3, im, 3, 6), float)
        same = np.asarray(wedge_dense(re, 3, re, 3, 6), float)
        worst_real = max(worst_real, float(np.max(np.abs(same))))
        vol = geometry.volume_form(cone, x).components
        idx = (0, 1, 2, 3, 4, 5)
        ratios.append(cross[idx] / vol[idx])
    ratios = np.asarray(ratios)
    spread = float(np.max(np.abs(ratios - ratios.mean())) / abs(ratios.mean()))
    return max(spread, worst_real)


def _stackels(provider, cat):
    by_name = {"psi": cat.psi, "xi": cat.xi, "upsilon": cat.upsilon}
    return [integrability.stackel_from_pair(provider, by_name[u], by_name[v])
            for u, v in integrability.CATALOG_PAIRS]


def _random_state(domain, rng, scale=0.35):
    pt = chart.sample_point(domain, rng)
    momenta = rng.uniform(-1.0, 1.0, size=5)
    momenta[np.abs(momenta) < 0.1] += 0.2  # keep the state generic
    # moderate momenta keep long trajectories inside the chart and accurate
    momenta *= scale
    return integrability.PhaseState(pt, momenta)


# ---------------------------------------------------------------------------
# geodesic drift table

def run_geodesic(config: RunConfig, state_spec=None):
    params = chart.validate_params(config.a, config.c)
    domain = chart.compute_domain(params, margin=config.margin)
    provider = geometry.ypq_provider(params)
    rng = np.random.default_rng(config.seed)
    if state_spec:
        vals = [float(v) for v in state_spec.split(",")]
        if len(vals) != 10:
            raise YpqError("--state needs 10 comma-separated values "
                           "(5 coordinates then 5 momenta)")
        state0 = integrability.PhaseState.from_vector(np.asarray(vals))
    else:
        state0 = _random_state(domain, rng)

    stackels = []
    if params.c == 1.0:
        stackels = _stackels(provider, forms.build_catalog(params))

    traj = integrability.integrate_geodesic(provider, state0, config.t_end,
                                            rtol=config.rtol, domain=domain)
    ref = integrability.conserved_set(provider, traj.states[0], stackels).as_dict()
    buf = io.StringIO()
    writer = csv.writer(buf)
    names = list(ref.keys())
    writer.writerow(["t"] + names)
    for t, s in zip(traj.times, traj.states):
        vals = integrability.conserved_set(provider, s, stackels).as_dict()
        row = [f"{t:.6f}"] + [
            f"{abs(vals[n] - ref[n]) / max(1.0, abs(ref[n])):.3e}" for n in names]
        writer.writerow(row)
    if traj.exited:
        writer.writerow([f"# domain_exit t={traj.exit_time:.6f}"])
    drifts = integrability.drift_report(provider, traj, stackels)
    return buf.getvalue(), drifts, traj


# ---------------------------------------------------------------------------
# rank summary

def run_rank(config: RunConfig):
    params = chart.validate_params(config.a, config.c)
    if params.c != 1.0:
        raise YpqError("rank analysis needs the c = 1 geometry")
    domain = chart.compute_domain(params, margin=config.margin)
    provider = geometry.ypq_provider(params)
    rng = np.random.default_rng(config.seed)
    cat = forms.build_catalog(params)
    stackels = _stackels(provider, cat)
    invs = integrability.build_invariants(provider, stackels)
    classical = invs[:5]
    entries = []
    degenerate = []
    for i in range(config.n_points):
        state = _random_state(domain, rng)
        try:
            r5, sv5 = integrability.independence_rank(provider, state, classical)
            rfull, svf = integrability.independence_rank(provider, state, invs)
        except integrability.DegenerateState as exc:
            degenerate.append({"state_index": i, "detail": str(exc)})
            continue
        entries.append({
            "state_index": i,
            "classical_rank": r5,
            "full_rank": rfull,
            "classical_singular_values": [float(s) for s in sv5],
            "full_singular_values": [float(s) for s in svf],
        })
    full_ranks = [e["full_rank"] for e in entries]
    modal = int(np.bincount(full_ranks).argmax()) if full_ranks else 0
    report = {
        "params": {"a": params.a, "c": params.c},
        "seed": config.seed,
        "n_states": config.n_points,
        "classical_rank_all": sorted({e["classical_rank"] for e in entries}),
        "modal_full_rank": modal,
        "superintegrable": bool(modal >= 6),
        "states": entries,
        "degenerate": degenerate,
    }
    return report


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(p):
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--margin", type=float, default=1e-3)
    p.add_argument("--out", type=str, default="")
    p.add_argument("--checks", type=str, default=",".join(ALL_CHECK_GROUPS))


def _config_from(args):
    checks = tuple(s for s in args.checks.split(",") if s)
    bad = [s for s in checks if s not in ALL_CHECK_GROUPS]
    if bad:
        raise YpqError(f"unknown check group(s): {bad}; known: {ALL_CHECK_GROUPS}")
    return RunConfig(a=args.a, c=args.c, seed=args.seed, n_points=args.points,
                     tol=args.tol, t_end=args.t_end, rtol=args.rtol,
                     margin=args.margin, out=args.out, checks=checks)


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="ypqlab",
        description="verification engine and geodesic laboratory for the "
                    "five-dimensional Einstein-Sasaki geometries")
    sub = parser.add_subparsers(dest="command", required=True)
    pv = sub.add_parser("verify", help="run every residual gate, emit JSON report")
    _add_common(pv)
    # residual checks sample away from the coordinate degeneracies at the
    # poles and the y-turning points, where curvature assembly is ill
    # conditioned in double precision
    pv.set_defaults(margin=5e-2)
    pg = sub.add_parser("geodesic", help="integrate a geodesic, emit CSV drift table")
    _add_common(pg)
    pg.add_argument("--state", type=str, default="",
                    help="10 comma-separated values: coordinates then momenta")
    pr = sub.add_parser("rank", help="functional independence rank summary (JSON)")
    _add_common(pr)
    pr.set_defaults(margin=5e-2)

    args = parser.parse_args(argv)
    try:
        config = _config_from(args)
    except YpqError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return 2

    try:
        if args.command == "verify":
            report = run_verify(config)
            _emit(json.dumps(report, indent=2) + "\n", config.out)
            for r in report["checks"]:
                status = "PASS" if r["pass"] else "FAIL"
                sys.stderr.write(f"{status} {r['check']}\n")
            return 0 if report["all_pass"] else 1
        if args.command == "geodesic":
            csv_text, drifts, traj = run_geodesic(config, args.state)
            _emit(csv_text, config.out)
            worst = max(drifts.values()) if drifts else 0.0
            sys.stderr.write(f"max relative drift: {worst:.3e}\n")
            return 0 if worst < config.tol else 1
        if args.command == "rank":
            report = run_rank(config)
            _emit(json.dumps(report, indent=2) + "\n", config.out)
            return 0 if report["superintegrable"] and report["classical_rank_all"] == [5] else 1
    except YpqError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
