"""Bochner curvature of Kähler manifolds and homothety certificates for
Bochner-preserving holomorphic maps in complex dimension 2."""

from .bochner_core import (
    BochnerTensor,
    CurvatureBundle,
    bochner_at,
    bochner_from_curvature,
    bochner_idempotence_residual,
    is_bochner_flat,
    random_kaehler_curvature,
    ricci_of_bochner_residual,
    trace_identity_residual,
)
from .homothety import (
    HolomorphicLinearMap,
    HomothetyReport,
    PointData,
    Verdict,
    eigen_sum_check,
    homothety_certificate,
    multi_point_constancy,
    preservation_residual,
    select_probe_pair,
)
from .kaehler_geometry import (
    KaehlerChart,
    catalog_chart,
    curvature_at,
    metric_at,
    numeric_chart,
    polynomial_chart,
)
from .tensor_core import (
    EigenPairs,
    HermitianFrame,
    contract_ricci,
    curvature_symmetry_residuals,
    j_adapted_eigenbasis,
    jacobi_eigen,
    pullback4,
    pullback_metric,
    scalar_curvature,
    tensor_norm,
)

__version__ = "0.1.0"
