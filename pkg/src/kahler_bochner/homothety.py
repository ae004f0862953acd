"""Pointwise homothety certificates for Bochner-preserving holomorphic maps.

Given the Bochner tensors at ``p`` and ``q = f(p)`` and the differential
``F = f_*`` at ``p``, :func:`homothety_certificate` checks that ``F``
preserves the Bochner tensor (``F^* B_q = B_p`` as (0,4) tensors) and then
walks the eigenvalue argument for complex dimension 2: diagonalize the
endomorphism ``B(x, Jy) J`` for a probe pair, show its eigenvalues cancel,
and deduce that ``h = F^* g_q`` is a constant multiple ``mu`` of ``g_p``.
Every intermediate identity is recorded as a named residual.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .bochner_core import FLAT_TOL, BochnerTensor, bochner_at, is_bochner_flat
from .errors import (
    BochnerFlat,
    DimensionMismatch,
    NotInvertible,
    NotJCommuting,
    NotJLinear,
    NotSymmetric,
    ProbeSearchFailed,
    UnsupportedDimension,
)
from .kaehler_geometry import realify_matrix
from .tensor_core import (
    HermitianFrame,
    _maxabs,
    g_symmetry_residual,
    j_adapted_eigenbasis,
    j_commutation_residual,
    pullback4,
    pullback_metric,
    tensor_norm,
)

J_LINEAR_TOL = 1e-10
EXACT_TOL = 1e-7
NUMERIC_TOL = 1e-3
PROBE_FLAT_TOL = 1e-8
PROBE_MIN_RATIO = 1e-6
PROBE_RANDOM = 32


class Verdict(str, enum.Enum):
    HOMOTHETY = "Homothety"
    BOCHNER_FLAT = "BochnerFlat"
    NOT_PRESERVING = "NotPreserving"
    NOT_J_LINEAR = "NotJLinear"
    PROBE_SEARCH_FAILED = "ProbeSearchFailed"
    INTERNAL_INCONSISTENCY = "InternalInconsistency"


@dataclass(frozen=True, eq=False)
class HolomorphicLinearMap:
    """Real matrix ``F`` from the source tangent model to the target one.

    J-linearity is not enforced here so that non-holomorphic input can be
    reported rather than rejected; invertibility is.
    """

    source_frame: HermitianFrame
    target_frame: HermitianFrame
    F: np.ndarray

    def __post_init__(self):
        F = np.array(self.F, dtype=float)
        shape = (self.target_frame.dim, self.source_frame.dim)
        if F.shape != shape:
            raise DimensionMismatch(f"map must be {shape}, got {F.shape}")
        if not np.all(np.isfinite(F)) or np.linalg.cond(F) > 1e14:
            raise NotInvertible("differential is singular")
        F.flags.writeable = False
        object.__setattr__(self, "F", F)

    @classmethod
    def identity(cls, frame: HermitianFrame) -> "HolomorphicLinearMap":
        return cls(frame, frame, np.eye(frame.dim))

    @classmethod
    def from_complex_jacobian(cls, source, target, jac) -> "HolomorphicLinearMap":
        """Differential of a holomorphic map from its complex Jacobian ``df^a/dz^b``."""
        return cls(source, target, realify_matrix(jac))

    def j_linearity_residual(self) -> float:
        scale = _maxabs(self.F)
        defect = self.F @ self.source_frame.J - self.target_frame.J @ self.F
        return _maxabs(defect) / scale

    def check_j_linear(self, tol: float = J_LINEAR_TOL) -> None:
        r = self.j_linearity_residual()
        if r > tol:
            raise NotJLinear(f"F J != J F (residual {r:.3e})")

    def operator_norm(self) -> float:
        C = self.target_frame.sqrt_g @ self.F @ self.source_frame.inv_sqrt_g
        return float(np.linalg.norm(C, 2))

    def inverse(self) -> "HolomorphicLinearMap":
        return HolomorphicLinearMap(self.target_frame, self.source_frame, np.linalg.inv(self.F))

    def pullback_metric(self) -> np.ndarray:
        return pullback_metric(self.target_frame.g, self.F)


@dataclass(frozen=True, eq=False)
class PointData:
    frame: HermitianFrame
    B: BochnerTensor

    @classmethod
    def from_chart(cls, chart, p) -> "PointData":
        _, B = bochner_at(chart, p)
        return cls(B.frame, B)

    def scaled(self, c: float) -> "PointData":
        return PointData(
            self.frame,
            BochnerTensor(self.frame, c * self.B.B, None if self.B.reference_scale is None else c * self.B.reference_scale),
        )


@dataclass
class HomothetyReport:
    verdict: Verdict
    mu: float | None = None
    lam: tuple[float, float] | None = None
    probe: tuple[np.ndarray, np.ndarray] | None = None
    basis: tuple[np.ndarray, np.ndarray] | None = None
    residuals: dict = field(default_factory=dict)
    tol: float = EXACT_TOL
    detail: str = ""

    @property
    def is_homothety(self) -> bool:
        return self.verdict is Verdict.HOMOTHETY

    def to_dict(self) -> dict:
        def vecs(pair):
            return None if pair is None else [np.asarray(v).tolist() for v in pair]

        return {
            "verdict": self.verdict.value,
            "mu": self.mu,
            "lambda": None if self.lam is None else [float(v) for v in self.lam],
            "probe": vecs(self.probe),
            "basis": vecs(self.basis),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "tol": self.tol,
            "detail": self.detail,
        }


def _check_dims(p: PointData, q: PointData, F: HolomorphicLinearMap):
    if F.source_frame.dim != p.frame.dim or F.target_frame.dim != q.frame.dim:
        raise DimensionMismatch("map does not connect the given points")


def preservation_residual(p: PointData, q: PointData, F: HolomorphicLinearMap) -> float:
    """``||F^* B_q - B_p|| / max(||B_p||, ||B_q|| ||F||^4)``; 0 when both vanish."""
    _check_dims(p, q, F)
    F.check_j_linear()
    diff = tensor_norm(pullback4(q.B.B, F) - p.B.B, p.frame)
    scale = max(p.B.norm(), q.B.norm() * F.operator_norm() ** 4)
    if scale == 0.0:
        return 0.0
    return diff / scale


def _operator_norms(B: BochnerTensor, X, Y):
    """g-operator norms of ``B(x, Jy)`` for all candidate pairs."""
    frame = B.frame
    JY = Y @ frame.J.T
    low = np.einsum("abcd,ia,jb->ijcd", B.B, X, JY, optimize=True)
    # B(x, Jy) in the orthonormal frame: g^{-1/2} low^T g^{-1/2}
    sym = np.einsum("ce,ijfe,fd->ijcd", frame.inv_sqrt_g, low, frame.inv_sqrt_g, optimize=True)
    return np.linalg.norm(sym, 2, axis=(-2, -1))


def select_probe_pair(p: PointData, n_random: int = PROBE_RANDOM, seed: int = 0):
    """Unit pair ``(x, y)`` maximizing the operator norm of ``B(x, Jy)``.

    Candidates are the normalized coordinate vectors plus ``n_random``
    seeded random unit vectors; ties go to the first pair in that order.
    """
    B, frame = p.B, p.frame
    if is_bochner_flat(B, PROBE_FLAT_TOL):
        raise BochnerFlat("Bochner tensor vanishes; no probe pair exists")
    rng = np.random.default_rng(seed)
    cands = [np.eye(frame.dim)[k] for k in range(frame.dim)]
    cands += list(rng.standard_normal((n_random, frame.dim)))
    cands = np.array([v / frame.norm(v) for v in cands])
    norms = _operator_norms(B, cands, cands)
    i, j = np.unravel_index(np.argmax(norms), norms.shape)
    if norms[i, j] < PROBE_MIN_RATIO * B.norm():
        raise ProbeSearchFailed(
            f"best probe gives |B(x,Jy)| = {norms[i, j]:.3e} for |B| = {B.norm():.3e}"
        )
    return cands[i], cands[j]


def probe_endomorphism(B: BochnerTensor, x, y) -> np.ndarray:
    """``A = B(x, Jy) o J``."""
    J = B.frame.J
    return B.operator(x, J @ y) @ J


def homothety_certificate(
    p: PointData,
    q: PointData,
    F: HolomorphicLinearMap,
    tol: float = EXACT_TOL,
    flat_tol: float = FLAT_TOL,
    probe_seed: int = 0,
) -> HomothetyReport:
    """Certify that a Bochner-preserving J-linear ``F`` is a homothety at ``p``.

    Only complex dimension 2 is supported. Failures of the hypotheses are
    verdicts, not exceptions; a failure after preservation has been
    established is ``InternalInconsistency`` with every residual attached.
    """
    if p.frame.n != 2 or q.frame.n != 2:
        raise UnsupportedDimension("certificates exist only for complex dimension 2")
    _check_dims(p, q, F)
    res: dict[str, float] = {}
    report = HomothetyReport(Verdict.INTERNAL_INCONSISTENCY, residuals=res, tol=tol)

    res["j_linearity"] = F.j_linearity_residual()
    if res["j_linearity"] > J_LINEAR_TOL:
        report.verdict = Verdict.NOT_J_LINEAR
        return report

    res["bochner_norm_p"] = p.B.norm()
    if is_bochner_flat(p.B, flat_tol):
        report.verdict = Verdict.BOCHNER_FLAT
        return report

    res["preservation"] = preservation_residual(p, q, F)
    if res["preservation"] > tol:
        report.verdict = Verdict.NOT_PRESERVING
        return report

    gp, J = p.frame, p.frame.J
    try:
        x, y = select_probe_pair(p, seed=probe_seed)
    except ProbeSearchFailed as exc:
        report.verdict = Verdict.PROBE_SEARCH_FAILED
        report.detail = str(exc)
        return report
    report.probe = (x, y)

    A = probe_endomorphism(p.B, x, y)
    res["probe_g_symmetry"] = g_symmetry_residual(A, gp)
    res["probe_j_commutation"] = j_commutation_residual(A, gp)
    try:
        e, lam = j_adapted_eigenbasis(A, gp)
    except (NotSymmetric, NotJCommuting) as exc:
        report.detail = f"probe endomorphism: {exc}"
        return report
    e1, e2 = e
    l1, l2 = (float(v) for v in lam)
    report.lam, report.basis = (l1, l2), (e1, e2)
    a_norm = max(abs(l1), abs(l2))
    res["lambda_sum"] = abs(l1 + l2) / a_norm

    # transported data: bar-B = F^* B_q, bar-g = h = F^* g_q
    Bbar = pullback4(q.B.B, F)
    h = F.pullback_metric()
    h_norm = tensor_norm(h, gp)
    hv = lambda u, v: float(u @ h @ v)  # noqa: E731

    # target-side eigen relation: bar-B(x, Jy) J e_i is proportional to e_i w.r.t. h
    Abar = np.linalg.solve(h, np.einsum("abcd,a,b,ck->dk", Bbar, x, J @ y, J))
    rho, eig_defect = [], 0.0
    for ei in e:
        image = Abar @ ei
        r_i = hv(ei, image) / hv(ei, ei)
        rho.append(r_i)
        defect = image - r_i * ei
        eig_defect = max(eig_defect, np.sqrt(max(hv(defect, defect), 0.0) / hv(image, image)))
    res["target_eigenvector"] = eig_defect
    lhs_sum = sum(np.einsum("abcd,a,b,c,d->", Bbar, x, J @ y, J @ ei, ei) for ei in e)
    rhs_sum = sum(r_i * hv(ei, ei) for r_i, ei in zip(rho, e))
    res["target_eigen_sum"] = abs(lhs_sum - rhs_sum) / a_norm
    lhs_trace = sum(np.einsum("abcd,a,b,c,d->", Bbar, ei, J @ ei, J @ y, x) for ei in e)
    res["target_trace_identity"] = abs(lhs_trace) / p.B.norm()

    res["h_diagonal"] = abs(hv(e1, e1) - hv(e2, e2)) / h_norm
    h12 = hv(e1, e2)
    res["h_off_diagonal"] = abs(h12) / h_norm
    res["h_off_diagonal_j"] = abs(hv(e1, J @ e2)) / h_norm
    res["off_diagonal_argument"] = abs(l1 * h12 + l1 * h12) / (a_norm * h_norm)

    mu = float(np.trace(gp.ginv @ h)) / gp.dim
    res["conformality"] = tensor_norm(h - mu * gp.g, gp) / h_norm
    report.mu = mu

    gated = (
        "lambda_sum",
        "target_eigenvector",
        "target_eigen_sum",
        "target_trace_identity",
        "h_diagonal",
        "h_off_diagonal",
        "h_off_diagonal_j",
        "off_diagonal_argument",
        "conformality",
    )
    failed = [k for k in gated if not res[k] <= tol]
    if failed or mu <= 0:
        report.detail = "preservation held but failed: " + ", ".join(failed or ["mu > 0"])
        return report
    report.verdict = Verdict.HOMOTHETY
    return report


def eigen_sum_check(B: BochnerTensor, trials: int = 100, seed: int = 0) -> float:
    """Max of ``|lam_1 + lam_2| / ||A||`` over random probes ``A = B(x, Jy) J``."""
    frame = B.frame
    if frame.n != 2:
        raise UnsupportedDimension("eigen-sum check needs complex dimension 2")
    if is_bochner_flat(B, PROBE_FLAT_TOL):
        raise BochnerFlat("Bochner tensor vanishes")
    rng = np.random.default_rng(seed)
    worst, done, attempts = 0.0, 0, 0
    b_norm = B.norm()
    while done < trials:
        attempts += 1
        if attempts > 100 * trials:
            raise ProbeSearchFailed("too few random probes with nonzero B(x, Jy)")
        x, y = rng.standard_normal((2, frame.dim))
        x, y = x / frame.norm(x), y / frame.norm(y)
        A = probe_endomorphism(B, x, y)
        _, lam = j_adapted_eigenbasis(A, frame)
        a_norm = float(np.max(np.abs(lam)))
        if a_norm < PROBE_MIN_RATIO * b_norm:
            continue
        worst = max(worst, abs(lam[0] + lam[1]) / a_norm)
        done += 1
    return worst


@dataclass
class ConstancyResult:
    mus: list
    constant: bool
    reports: list
    failed_index: int | None = None
    spread: float | None = None


def multi_point_constancy(points, tol: float = EXACT_TOL) -> ConstancyResult:
    """Certify every ``(p, q, F)`` tuple and test that the factors ``mu`` agree.

    ``constant`` is ``(max mu - min mu) <= tol * mean mu`` and requires every
    verdict to be Homothety; the first failing index is reported.
    """
    reports = [homothety_certificate(p, q, F, tol) for p, q, F in points]
    mus = [r.mu if r.is_homothety else None for r in reports]
    failed = next((i for i, r in enumerate(reports) if not r.is_homothety), None)
    if failed is not None or not reports:
        return ConstancyResult(mus, False, reports, failed)
    spread = max(mus) - min(mus)
    return ConstancyResult(mus, spread <= tol * float(np.mean(mus)), reports, None, spread)
