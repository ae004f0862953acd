"""Bochner curvature tensor of a Kähler curvature tensor, and its identities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDraw, InconsistentBundle, NotPositiveDefinite, UnsupportedDimension
from .kaehler_geometry import catalog_chart, curvature_at, metric_at
from .tensor_core import (
    HermitianFrame,
    _maxabs,
    contract_ricci,
    curvature_symmetry_residuals,
    raise_index,
    scalar_curvature,
    tensor_norm,
)

BUNDLE_TOL = 1e-10
CURVATURE_TOL = 1e-8
FLAT_TOL = 1e-6
PD_MARGIN = 0.5
MAX_REDRAWS = 10


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    """Curvature ``R`` with its Ricci tensor ``S`` (both types) and scalar ``tau``."""

    frame: HermitianFrame
    R: np.ndarray
    S: np.ndarray
    S_endo: np.ndarray
    tau: float

    @classmethod
    def from_curvature(cls, frame: HermitianFrame, R) -> "CurvatureBundle":
        R = np.asarray(R, dtype=float)
        S = contract_ricci(R, frame)
        return cls(frame, R, S, raise_index(S, frame), scalar_curvature(S, frame))

    @property
    def n(self) -> int:
        return self.frame.n

    def consistency_residuals(self) -> dict:
        S = contract_ricci(self.R, self.frame)
        s_scale = max(_maxabs(S), _maxabs(self.S), 1e-300)
        tau = scalar_curvature(S, self.frame)
        return {
            "ricci": _maxabs(S - self.S) / s_scale,
            "ricci_endomorphism": _maxabs(self.frame.g @ self.S_endo - self.S) / s_scale,
            "scalar": abs(tau - self.tau) / max(abs(tau), abs(self.tau), s_scale),
        }

    def validate(self) -> None:
        bad = {k: v for k, v in self.consistency_residuals().items() if v > BUNDLE_TOL}
        bad.update(
            {
                k: v
                for k, v in curvature_symmetry_residuals(self.R, self.frame).items()
                if v > CURVATURE_TOL
            }
        )
        if bad:
            raise InconsistentBundle(f"bundle invariants violated: {bad}")

    def __add__(self, other: "CurvatureBundle") -> "CurvatureBundle":
        if other.frame is not self.frame and not (
            np.array_equal(other.frame.g, self.frame.g)
            and np.array_equal(other.frame.J, self.frame.J)
        ):
            raise InconsistentBundle("bundles live on different frames")
        return CurvatureBundle(
            self.frame,
            self.R + other.R,
            self.S + other.S,
            self.S_endo + other.S_endo,
            self.tau + other.tau,
        )


@dataclass(frozen=True, eq=False)
class BochnerTensor:
    frame: HermitianFrame
    B: np.ndarray
    # max-abs norm of the curvature B came from; the scale for flatness tests
    reference_scale: float | None = None

    @property
    def n(self) -> int:
        return self.frame.n

    def norm(self) -> float:
        return tensor_norm(self.B, self.frame)

    def operator(self, x, y) -> np.ndarray:
        """Endomorphism ``z -> B(x, y) z``."""
        low = np.einsum("abcd,a,b->cd", self.B, x, y)  # low[c, d] = B(x, y, z_c, w_d)
        return self.frame.ginv @ low.T


def bochner_formula(frame: HermitianFrame, R, S, S_endo, tau) -> np.ndarray:
    """Direct evaluation of the Bochner formula, returned as a (0,4) tensor.

    ``B(x,y)z`` is assembled as a vector-valued (1,3) tensor with ``S`` of
    type (0,2) in the scalar terms ``S(y,z)``, ``S(Jy,z)``, ``S(Jx,y)`` and of
    type (1,1) in the vector terms ``Sx``, ``SJx``, ``SJz``; it is then
    lowered with ``g``.
    """
    n = frame.n
    g, J, I = frame.g, frame.J, np.eye(frame.dim)
    S = np.asarray(S, dtype=float)
    S_endo = np.asarray(S_endo, dtype=float)
    SJ = S_endo @ J
    SJ_form = J.T @ S  # SJ_form[a, b] = S(J e_a, e_b)
    gJ_form = J.T @ g  # gJ_form[a, b] = g(J e_a, e_b)

    def vec(scalar_bc, vector_da):
        # term f(y, z) * V(x): out[d, a, b, c] = f[b, c] V[d, a]
        return np.einsum("bc,da->dabc", scalar_bc, vector_da)

    def vec_y(scalar_ac, vector_db):
        # term f(x, z) * V(y)
        return np.einsum("ac,db->dabc", scalar_ac, vector_db)

    def vec_z(scalar_ab, vector_dc):
        # term f(x, y) * V(z)
        return np.einsum("ab,dc->dabc", scalar_ab, vector_dc)

    ricci_part = (
        vec(S, I)
        - vec_y(S, I)
        + vec(g, S_endo)
        - vec_y(g, S_endo)
        + vec(SJ_form, J)
        - vec_y(SJ_form, J)
        + vec(gJ_form, SJ)
        - vec_y(gJ_form, SJ)
        - 2 * vec_z(SJ_form, J)
        - 2 * vec_z(gJ_form, SJ)
    )
    scalar_part = (
        vec(g, I) - vec_y(g, I) + vec(gJ_form, J) - vec_y(gJ_form, J) - 2 * vec_z(gJ_form, J)
    )
    B_up = (
        np.einsum("de,abce->dabc", frame.ginv, R)
        - ricci_part / (2 * (n + 2))
        + tau / (4 * (n + 1) * (n + 2)) * scalar_part
    )
    return np.einsum("dabc,de->abce", B_up, g)


def bochner_from_curvature(bundle: CurvatureBundle, validate: bool = True) -> BochnerTensor:
    """Bochner tensor of a curvature bundle."""
    if validate:
        bundle.validate()
    B = bochner_formula(bundle.frame, bundle.R, bundle.S, bundle.S_endo, bundle.tau)
    return BochnerTensor(bundle.frame, B, tensor_norm(bundle.R, bundle.frame))


def trace_identity_residual(B: BochnerTensor, x, rng=0, scale: float | None = None) -> float:
    """``|| sum_i B(e_i, J e_i) x ||_g / (||B|| ||x||_g)`` for a random J-adapted basis.

    ``scale`` replaces ``||B||`` in the denominator when given (useful when B
    is numerically zero and should be measured against ``||R||``).
    """
    frame = B.frame
    x = np.asarray(x, dtype=float)
    e = frame.j_adapted_basis(rng)
    total = sum(B.operator(ei, frame.J @ ei) @ x for ei in e)
    denom = (B.norm() if scale is None else scale) * frame.norm(x)
    num = frame.norm(total)
    if denom == 0.0:
        return 0.0 if num == 0.0 else np.inf
    return num / denom


def bochner_idempotence_residual(B: BochnerTensor, scale: float | None = None) -> float:
    """Relative change when the Bochner formula is applied to ``B`` itself."""
    again = bochner_from_curvature(CurvatureBundle.from_curvature(B.frame, B.B), validate=False)
    denom = B.norm() if scale is None else scale
    diff = tensor_norm(again.B - B.B, B.frame)
    if denom == 0.0:
        return 0.0 if diff == 0.0 else np.inf
    return diff / denom


def ricci_of_bochner_residual(B: BochnerTensor, scale: float | None = None) -> float:
    """Max-abs Ricci contraction of ``B`` relative to ``||B||``."""
    denom = B.norm() if scale is None else scale
    ric = tensor_norm(contract_ricci(B.B, B.frame), B.frame)
    if denom == 0.0:
        return 0.0 if ric == 0.0 else np.inf
    return ric / denom


def random_kaehler_curvature(seed: int, n: int, degree: int = 4) -> CurvatureBundle:
    """Exact curvature bundle at the origin of a seeded random polynomial chart.

    Redraws (seed offset by ``10007 * attempt``) while the smallest
    eigenvalue of the Hermitian metric is below 0.5.
    """
    if n not in (2, 3, 4):
        raise UnsupportedDimension(f"random curvature supports n in (2, 3, 4), got {n}")
    origin = np.zeros(2 * n)
    for attempt in range(MAX_REDRAWS):
        chart = catalog_chart("random-poly", n, seed=seed + 10007 * attempt, degree=degree)
        h = chart.backend.hermitian(np.zeros(n, dtype=complex))
        if np.min(np.linalg.eigvalsh(h)) < PD_MARGIN:
            continue
        try:
            frame = metric_at(chart, origin)
            R = curvature_at(chart, origin)
        except NotPositiveDefinite:
            continue
        return CurvatureBundle.from_curvature(frame, R)
    raise DegenerateDraw(f"no admissible potential for seed {seed} after {MAX_REDRAWS} draws")


def is_bochner_flat(B: BochnerTensor, tol: float = FLAT_TOL, reference: float | None = None) -> bool:
    """``||B|| <= tol * max(reference, 1)``.

    ``reference`` defaults to the curvature scale stored on ``B`` (if any).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    ref = reference if reference is not None else (B.reference_scale or 0.0)
    return B.norm() <= tol * max(ref, 1.0)


def bochner_at(chart, p) -> tuple[CurvatureBundle, BochnerTensor]:
    """Convenience: bundle and Bochner tensor of a chart at a point."""
    bundle = CurvatureBundle.from_curvature(metric_at(chart, p), curvature_at(chart, p))
    return bundle, bochner_from_curvature(bundle, validate=False)
