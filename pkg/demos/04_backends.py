"""
Exact and finite-difference curvature
=====================================

The same Kähler potential can be fed to the exact polynomial backend or to
the finite-difference backend. Their agreement is what lets certificates run
on potentials that have no closed form.
"""

# %%
# One potential, two backends
# ---------------------------
import numpy as np

from kahler_bochner import catalog_chart, curvature_at, metric_at
from kahler_bochner.kaehler_geometry import NumericPotential, chart_potential
from kahler_bochner.tensor_core import tensor_norm

for seed in range(5):
    exact = catalog_chart("random-poly", 2, seed=seed)
    numeric = exact.with_backend(NumericPotential(chart_potential(exact)))
    p = np.array([0.1, -0.2, 0.05, 0.15])
    frame = metric_at(exact, p)
    R = curvature_at(exact, p)
    gap = tensor_norm(curvature_at(numeric, p) - R, frame) / tensor_norm(R, frame)
    print(f"seed {seed}: relative curvature gap {gap:.2e}")

# %%
# Step size
# ---------
# Smaller steps reduce truncation error until rounding takes over.
exact = catalog_chart("fubini-study", 2)
K = chart_potential(exact)
p = np.array([0.2, -0.1, 0.3, 0.25])
frame, R = metric_at(exact, p), curvature_at(exact, p)
for h_metric in (4e-2, 2e-2, 1e-2, 5e-3):
    fd = exact.with_backend(NumericPotential(K, h=1e-3, h_metric=h_metric))
    gap = tensor_norm(curvature_at(fd, p) - R, frame) / tensor_norm(R, frame)
    print(f"h_metric = {h_metric:.0e}: gap {gap:.2e}")
