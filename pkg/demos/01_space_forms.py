"""
Bochner tensors of the catalog charts
=====================================

Complex space forms have constant holomorphic sectional curvature, so their
Bochner tensor vanishes; a product of two projective lines does not. This
script prints ``|B| / |R|`` for every catalog chart at a few points.
"""

# %%
# Setup
# -----
import numpy as np

from kahler_bochner import bochner_at, catalog_chart
from kahler_bochner.tensor_core import tensor_norm

rng = np.random.Generator(np.random.PCG64(0))
points = [np.zeros(4)] + [0.2 * rng.uniform(-1, 1, 4) for _ in range(3)]

# %%
# Ratios
# ------
# The flat chart has no curvature at all, so the ratio is reported as 0.
for name in ("flat", "fubini-study", "complex-hyperbolic", "product-cp1-cp1", "random-poly"):
    chart = catalog_chart(name, 2, seed=3)
    ratios = []
    for p in points:
        bundle, B = bochner_at(chart, p)
        r = tensor_norm(bundle.R, bundle.frame)
        ratios.append(B.norm() / r if r else 0.0)
    print(f"{name:20s}", "  ".join(f"{v:.2e}" for v in ratios))

# %%
# Holomorphic sectional curvature
# -------------------------------
# On the Fubini-Study chart ``R(x, Jx, Jx, x) / g(x, x)^2`` does not depend on
# the direction ``x``. On the product it does.
for name in ("fubini-study", "product-cp1-cp1"):
    chart = catalog_chart(name, 2)
    bundle, _ = bochner_at(chart, np.zeros(4))
    g, J, R = bundle.frame.g, bundle.frame.J, bundle.R
    values = []
    for _ in range(5):
        x = rng.standard_normal(4)
        values.append(np.einsum("abcd,a,b,c,d->", R, x, J @ x, J @ x, x) / (x @ g @ x) ** 2)
    print(f"{name:20s} H(x) over 5 random directions:", np.round(values, 6))
