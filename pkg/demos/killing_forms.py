"""The complete set of Killing forms, machine-checked.

Three Killing forms live on the five-dimensional space: the degree-3 form
Psi built from the contact form, and a degree-2 pair (Xi, Upsilon) coming
from the real and imaginary parts of the holomorphic volume form of the
cone.  Each one:

  * solves the conformal Killing-Yano equation and is coclosed,
  * is "special": the derivative of its exterior derivative closes back
    onto the form with an integer constant,
  * lifts to a parallel form on the metric cone.

Run:  python3 demos/killing_forms.py
"""

import numpy as np

from ypqlab import build_catalog, chart, cky_residual, cone_lift, \
    cone_provider, compute_domain, parallel_residual, sky_residual, \
    validate_params, ypq_provider
from ypqlab.forms import constant_dy_field

params = validate_params(0.5, 1)
domain = compute_domain(params)
provider = ypq_provider(params)
cone = cone_provider(params)
cat = build_catalog(params)

rng = np.random.default_rng(3)
x = chart.sample_point(domain, rng).coords()
xc = chart.sample_cone_point(domain, rng).coords()

print("conformal Killing-Yano residuals at a random point:")
for name, f in (("Psi", cat.psi), ("Xi", cat.xi), ("Upsilon", cat.upsilon),
                ("Phi1", cat.phi1), ("Phi2", cat.phi2)):
    print(f"  {name:8s} {cky_residual(provider, f, x):.3e}")
print(f"  a generic form, for contrast: {cky_residual(provider, constant_dy_field(), x):.3e}")

print("\nspecial-Killing constants (residual vs candidate constant):")
for name, f in (("Psi", cat.psi), ("Xi", cat.xi), ("Upsilon", cat.upsilon)):
    row = {c: sky_residual(provider, f, float(c), x) for c in range(-5, -1)}
    best = min(row, key=row.get)
    cells = "  ".join(f"c={c}: {r:.1e}" for c, r in row.items())
    print(f"  {name:8s} {cells}   -> constant {best}")

print("\nparallelism on the cone (max |nabla omega|):")
for name, f in (("Kahler form", cat.omega_cone),
                ("Re dV", cat.re_dv_cone), ("Im dV", cat.im_dv_cone),
                ("lift of Psi", cone_lift(cat.psi, params)),
                ("lift of Xi", cone_lift(cat.xi, params)),
                ("lift of Upsilon", cone_lift(cat.upsilon, params))):
    print(f"  {name:16s} {parallel_residual(cone, f, xc):.3e}")

lift = np.asarray(cone_lift(cat.eta, params).evaluator(list(xc)), float)
kahler = np.asarray(cat.omega_cone.evaluator(list(xc)), float)
print(f"\nthe cone lift of the contact form IS the Kahler form: "
      f"max difference {np.max(np.abs(lift - kahler)):.3e}")
