"""
Identities of the Bochner tensor
================================

For curvature drawn from seeded random polynomial potentials we check that the
Bochner tensor keeps the curvature symmetries, has zero Ricci contraction,
satisfies the trace identity ``sum_i B(e_i, J e_i) x = 0`` and is a fixed
point of the Bochner projection.
"""

# %%
# A random curvature bundle
# -------------------------
import numpy as np

from kahler_bochner import bochner_from_curvature, random_kaehler_curvature
from kahler_bochner.bochner_core import (
    bochner_idempotence_residual,
    ricci_of_bochner_residual,
    trace_identity_residual,
)
from kahler_bochner.tensor_core import curvature_symmetry_residuals, tensor_norm

bundle = random_kaehler_curvature(seed=42, n=2)
B = bochner_from_curvature(bundle)
print("|R| =", tensor_norm(bundle.R, bundle.frame), " |B| =", B.norm(), " tau =", bundle.tau)

# %%
# Residuals
# ---------
# All residuals are relative to ``|B|`` in an orthonormal frame.
for key, value in curvature_symmetry_residuals(B.B, B.frame).items():
    print(f"{key:18s} {value:.2e}")
print(f"{'ricci':18s} {ricci_of_bochner_residual(B):.2e}")
print(f"{'trace identity':18s} {trace_identity_residual(B, np.ones(4)):.2e}")
print(f"{'idempotence':18s} {bochner_idempotence_residual(B):.2e}")

# %%
# The trace identity singles out the Bochner part
# -----------------------------------------------
# Feeding the full curvature tensor where a Bochner tensor is expected breaks it.
from kahler_bochner import BochnerTensor

print("trace identity on R itself:", trace_identity_residual(BochnerTensor(bundle.frame, bundle.R), np.ones(4)))
