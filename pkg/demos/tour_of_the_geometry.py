"""A guided tour: build the five-dimensional geometry and check that it
really is Einstein, and that its metric cone really is Ricci-flat.

Run:  python3 demos/tour_of_the_geometry.py
"""

import numpy as np

from ypqlab import (
    chart,
    compute_domain,
    cone_provider,
    einstein_residual,
    metric_ypq,
    validate_params,
    ypq_provider,
)

# The family is parameterized by a single number a (the chart constant c is
# rescaled to 1).  The y-coordinate lives between the two smallest roots of
# the cubic a - 3y^2 + 2y^3.
params = validate_params(0.5, 1)
domain = compute_domain(params)
print(f"a = {params.a}:  y ranges over [{domain.y1:+.6f}, {domain.y2:+.6f}]")

rng = np.random.default_rng(7)
pt = chart.sample_point(domain, rng)
g = metric_ypq(params, pt)
print("\nmetric at a random interior point (rows/cols: theta, phi, y, beta, psi):")
with np.printoptions(precision=4, suppress=True):
    print(g)
print(f"eigenvalues are all positive: {np.min(np.linalg.eigvalsh(g)):.4f} ... "
      f"{np.max(np.linalg.eigvalsh(g)):.4f}")

# Einstein condition Ric = 4 g, checked by automatic differentiation of the
# metric through the full curvature assembly.
provider = ypq_provider(params)
worst = max(einstein_residual(provider, chart.sample_point(domain, rng))
            for _ in range(25))
print(f"\nmax |Ric - 4g| over 25 random points:    {worst:.3e}")

# The cone over an Einstein space of this type is Ricci-flat (Calabi-Yau).
cone = cone_provider(params)
worst_cone = max(einstein_residual(cone, chart.sample_cone_point(domain, rng))
                 for _ in range(25))
print(f"max |Ric_cone| over 25 random cone points: {worst_cone:.3e}")

# The a -> homogeneous limit (c = 0) is also supported; same Einstein check.
h_params = validate_params(0.5, 0)
h_domain = compute_domain(h_params)
h_provider = ypq_provider(h_params)
worst_h = max(einstein_residual(h_provider, chart.sample_point(h_domain, rng))
              for _ in range(25))
print(f"homogeneous limit (c = 0), same check:     {worst_h:.3e}")
