"""
Homothety certificates
======================

A holomorphic map of a complex surface whose differential pulls the Bochner
tensor at ``f(p)`` back to the Bochner tensor at ``p`` must scale the metric
by a constant. The certificate walks that argument numerically and records
every intermediate identity.
"""

# %%
# A point with nonvanishing Bochner tensor
# ----------------------------------------
import numpy as np

from kahler_bochner import HolomorphicLinearMap, PointData, catalog_chart, homothety_certificate
from kahler_bochner.homothety import multi_point_constancy

chart = catalog_chart("product-cp1-cp1", 2)
p = PointData.from_chart(chart, np.zeros(4))

# %%
# Three differentials
# -------------------
# ``J`` is an isometry, ``-I`` too; stretching one factor is holomorphic but
# does not preserve ``B``.
maps = {
    "J": p.frame.J,
    "-I": -np.eye(4),
    "stretch z1": np.diag([2.0, 1.0, 2.0, 1.0]),
}
for label, F in maps.items():
    report = homothety_certificate(p, p, HolomorphicLinearMap(p.frame, p.frame, F))
    print(f"{label:12s} {report.verdict.value:15s} mu = {report.mu}")

report = homothety_certificate(p, p, HolomorphicLinearMap(p.frame, p.frame, p.frame.J))
print("\nresiduals for F = J:")
for key, value in report.residuals.items():
    print(f"  {key:24s} {value:.2e}")
print("eigenvalues", report.lam)

# %%
# Constancy along the diagonal
# ----------------------------
# Swapping the two factors is an isometry; on the diagonal it fixes the point.
swap = np.array([[0, 1], [1, 0]])
tuples = []
for a, b in ((0.3, -0.2), (-0.5, 0.1), (1.2, 0.7)):
    q = PointData.from_chart(chart, np.array([a, a, b, b]))
    tuples.append((q, q, HolomorphicLinearMap.from_complex_jacobian(q.frame, q.frame, swap)))
result = multi_point_constancy(tuples)
print("\nmu at diagonal points:", result.mus, "constant:", result.constant)
