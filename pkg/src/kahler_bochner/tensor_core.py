"""Pointwise real tensor algebra on a 2n-dimensional Hermitian vector space.

Tensors are plain ``numpy`` arrays of components in a working basis of the
tangent space; the :class:`HermitianFrame` carrying the metric ``g`` and the
complex structure ``J`` in that same basis travels alongside them.

Index conventions
-----------------
* A vector ``v`` has components ``v[a]``.
* An endomorphism ``A`` acts as ``A @ v``; ``A[a, b]`` is the ``a`` component
  of the image of basis vector ``b``.
* A (0,2) tensor ``S`` evaluates as ``S(u, v) = u @ S @ v``.
* A (0,4) tensor ``T`` evaluates as ``T(x, y, z, w) = T[a, b, c, d] x^a y^b z^c w^d``.

A curvature tensor of type (0,4) is ``R(x, y, z, w) = g(R(x, y) z, w)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, FrameInvalid, NotJCommuting, NotSymmetric

FRAME_TOL = 1e-12
JACOBI_TOL = 1e-13
# metric square roots feed every other computation; converge to rounding level
FRAME_JACOBI_TOL = 1e-15
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-8
CLUSTER_GAP = 1e-7


def standard_complex_structure(n: int) -> np.ndarray:
    """``J = [[0, -I], [I, 0]]`` in the basis (x-parts, y-parts)."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


# ---------------------------------------------------------------------------
# Jacobi eigensolver


def jacobi_symmetric(C, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns ``(values, Q)`` with ``C = Q @ diag(values) @ Q.T`` and ``Q``
    orthogonal. Values are in the order the rotations leave them (unsorted).
    Sweeps stop once the off-diagonal Frobenius mass drops below
    ``tol * ||C||_F``.
    """
    a = np.array(C, dtype=float)
    m = a.shape[0]
    if a.shape != (m, m):
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    q = np.eye(m)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(m), q
    threshold = tol * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            break
        for p in range(m - 1):
            for r in range(p + 1, m):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                theta = (a[r, r] - a[p, p]) / (2.0 * apr)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, r]
                rot_r = s * a[:, p] + c * a[:, r]
                a[:, p], a[:, r] = rot_p, rot_r
                rot_p = c * a[p, :] - s * a[r, :]
                rot_r = s * a[p, :] + c * a[r, :]
                a[p, :], a[r, :] = rot_p, rot_r
                a[p, r] = a[r, p] = 0.0
                qp = c * q[:, p] - s * q[:, r]
                qr = s * q[:, p] + c * q[:, r]
                q[:, p], q[:, r] = qp, qr
    return np.diag(a).copy(), q


def _fix_sign(v, rel=1e-12):
    """Flip ``v`` so its first non-negligible component is positive."""
    big = _maxabs(v)
    for comp in v:
        if abs(comp) > rel * big:
            return -v if comp < 0 else v
    return v


# ---------------------------------------------------------------------------
# Frames


@dataclass(frozen=True, eq=False)
class HermitianFrame:
    """Metric ``g`` and complex structure ``J`` on a real ``2n``-space.

    Construction validates ``J^2 = -1``, ``J^T g J = g`` and positive
    definiteness; :class:`FrameInvalid` is raised otherwise.
    """

    n: int
    g: np.ndarray
    J: np.ndarray

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise FrameInvalid(f"complex dimension must be a positive integer, got {self.n!r}")
        dim = 2 * int(self.n)
        g = _readonly(self.g)
        J = _readonly(self.J)
        if g.shape != (dim, dim) or J.shape != (dim, dim):
            raise FrameInvalid(f"g and J must be {dim}x{dim}, got {g.shape} and {J.shape}")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(J))):
            raise FrameInvalid("non-finite frame entries")
        gscale = max(_maxabs(g), 1.0)
        if _maxabs(g - g.T) > FRAME_TOL * gscale:
            raise FrameInvalid("metric is not symmetric")
        if _maxabs(J @ J + np.eye(dim)) > FRAME_TOL * max(_maxabs(J) ** 2, 1.0):
            raise FrameInvalid("J^2 != -1")
        if _maxabs(J.T @ g @ J - g) > FRAME_TOL * gscale * max(_maxabs(J) ** 2, 1.0):
            raise FrameInvalid("metric is not J-invariant")
        values, q = jacobi_symmetric(0.5 * (g + g.T), tol=FRAME_JACOBI_TOL)
        if np.min(values) <= 0.0:
            raise FrameInvalid("metric is not positive definite")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "_sqrt_g", _readonly(q @ np.diag(np.sqrt(values)) @ q.T))
        object.__setattr__(self, "_inv_sqrt_g", _readonly(q @ np.diag(1.0 / np.sqrt(values)) @ q.T))
        object.__setattr__(self, "_ginv", _readonly(q @ np.diag(1.0 / values) @ q.T))

    @classmethod
    def standard(cls, n: int, scale: float = 1.0) -> "HermitianFrame":
        """Orthonormal frame ``g = scale * I`` with the standard ``J``."""
        return cls(n, scale * np.eye(2 * n), standard_complex_structure(n))

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def ginv(self) -> np.ndarray:
        return self._ginv

    @property
    def sqrt_g(self) -> np.ndarray:
        return self._sqrt_g

    @property
    def inv_sqrt_g(self) -> np.ndarray:
        """Columns form a g-orthonormal basis (the working orthonormal frame)."""
        return self._inv_sqrt_g

    def inner(self, u, v) -> float:
        return float(np.asarray(u) @ self.g @ np.asarray(v))

    def norm(self, v) -> float:
        return float(np.sqrt(max(self.inner(v, v), 0.0)))

    def j_adapted_basis(self, rng=None) -> np.ndarray:
        """Random g-orthonormal basis ``e_1..e_n`` with ``{e_i, J e_i}`` orthonormal.

        Gram-Schmidt with J-pairing: orthonormalize a random vector, take its
        J-image as partner, project both out, repeat. Returns shape ``(n, 2n)``.
        """
        rng = np.random.default_rng(rng)
        chosen: list[np.ndarray] = []
        while len(chosen) < 2 * self.n:
            v = rng.standard_normal(self.dim)
            for u in chosen:
                v = v - self.inner(u, v) * u
            nv = self.norm(v)
            if nv < 1e-6:
                continue
            e = v / nv
            je = self.J @ e
            for u in chosen:
                je = je - self.inner(u, je) * u
            je = je / self.norm(je)
            chosen.extend([e, je])
        return np.array(chosen[0::2])


def orthonormal_components4(T, frame: HermitianFrame) -> np.ndarray:
    """Components of a (0,4) tensor in the working orthonormal frame."""
    return pullback4(T, frame.inv_sqrt_g)


def tensor_norm(T, frame: HermitianFrame | None = None) -> float:
    """Max-abs entry norm, taken in the orthonormal frame when one is given."""
    T = np.asarray(T, dtype=float)
    if frame is None:
        return _maxabs(T)
    if T.ndim == 4:
        return _maxabs(orthonormal_components4(T, frame))
    if T.ndim == 2:
        e = frame.inv_sqrt_g
        return _maxabs(e.T @ T @ e)
    raise DimensionMismatch(f"unsupported tensor rank {T.ndim}")


# ---------------------------------------------------------------------------
# Contractions


def contract_ricci(R, frame: HermitianFrame) -> np.ndarray:
    """Ricci tensor ``S(y, z) = sum_a R(E_a, y, z, E_a)`` over an orthonormal basis.

    Equivalently ``S_bc = g^{ad} R_abcd``; the result is symmetrized.
    """
    R = _check4(R, frame)
    S = np.einsum("ad,abcd->bc", frame.ginv, R)
    return 0.5 * (S + S.T)


def scalar_curvature(S, frame: HermitianFrame) -> float:
    """Trace of ``S`` against ``g^{-1}``."""
    S = np.asarray(S, dtype=float)
    if S.shape != (frame.dim, frame.dim):
        raise DimensionMismatch(f"expected {frame.dim}x{frame.dim}, got {S.shape}")
    return float(np.einsum("bc,bc->", frame.ginv, S))


def raise_index(S, frame: HermitianFrame) -> np.ndarray:
    """Type (1,1) form of a (0,2) tensor: ``g(S_endo x, y) = S(x, y)``."""
    return frame.ginv @ np.asarray(S, dtype=float)


def _check4(T, frame):
    T = np.asarray(T, dtype=float)
    if T.shape != (frame.dim,) * 4:
        raise DimensionMismatch(f"expected a rank-4 tensor of side {frame.dim}, got {T.shape}")
    return T


# ---------------------------------------------------------------------------
# Symmetry residuals


def curvature_symmetry_residuals(T, frame: HermitianFrame, scale: float | None = None) -> dict:
    """Max-norm residuals of the algebraic Kähler curvature identities.

    Residuals are computed in the orthonormal frame and divided by ``scale``
    (default: the max-abs norm of ``T`` there). A zero tensor reports zeros.
    """
    T = orthonormal_components4(_check4(T, frame), frame)
    Jo = frame.sqrt_g @ frame.J @ frame.inv_sqrt_g
    defects = {
        "skew_12": T + np.einsum("bacd->abcd", T),
        "skew_34": T + np.einsum("abdc->abcd", T),
        "pair": T - np.einsum("cdab->abcd", T),
        "bianchi": T + np.einsum("bcad->abcd", T) + np.einsum("cabd->abcd", T),
        "j_invariance_34": np.einsum("abkl,kc,ld->abcd", T, Jo, Jo) - T,
        "j_invariance_12": np.einsum("klcd,ka,lb->abcd", T, Jo, Jo) - T,
    }
    if scale is None:
        scale = _maxabs(T)
    if scale == 0.0:
        return {name: 0.0 for name in defects}
    return {name: _maxabs(d) / scale for name, d in defects.items()}


def g_symmetry_residual(A, frame: HermitianFrame) -> float:
    """``max|g(Av, w) - g(v, Aw)|`` over orthonormal pairs, relative to ``||A||``."""
    C = frame.sqrt_g @ np.asarray(A, dtype=float) @ frame.inv_sqrt_g
    scale = _maxabs(C)
    return _maxabs(C - C.T) / scale if scale else 0.0


def j_commutation_residual(A, frame: HermitianFrame) -> float:
    A = np.asarray(A, dtype=float)
    C = frame.sqrt_g @ A @ frame.inv_sqrt_g
    scale = _maxabs(C)
    if not scale:
        return 0.0
    Jo = frame.sqrt_g @ frame.J @ frame.inv_sqrt_g
    return _maxabs(C @ Jo - Jo @ C) / scale


def operator_norm(A, frame: HermitianFrame) -> float:
    """g-operator (spectral) norm of an endomorphism."""
    C = frame.sqrt_g @ np.asarray(A, dtype=float) @ frame.inv_sqrt_g
    return float(np.linalg.norm(C, 2))


# ---------------------------------------------------------------------------
# Eigen-decomposition


class EigenPairs(NamedTuple):
    """Eigenvalues (descending) and g-orthonormal eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray
    orthonormal: bool = True


def jacobi_eigen(A, frame: HermitianFrame) -> EigenPairs:
    """Eigen-decomposition of a g-symmetric endomorphism.

    Runs cyclic Jacobi on ``g^{1/2} A g^{-1/2}`` and maps eigenvectors back.
    Raises :class:`NotSymmetric` if ``A`` is not g-symmetric within
    ``1e-8 * ||A||``.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (frame.dim, frame.dim):
        raise DimensionMismatch(f"expected {frame.dim}x{frame.dim}, got {A.shape}")
    if g_symmetry_residual(A, frame) > SYMMETRY_TOL:
        raise NotSymmetric("endomorphism is not g-symmetric")
    C = frame.sqrt_g @ A @ frame.inv_sqrt_g
    values, q = jacobi_symmetric(0.5 * (C + C.T))
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = frame.inv_sqrt_g @ q[:, order]
    vectors = np.column_stack([_fix_sign(v) for v in vectors.T])
    return EigenPairs(values, vectors)


def j_adapted_eigenbasis(A, frame: HermitianFrame):
    """Diagonalize a g-symmetric, J-commuting endomorphism in a J-adapted basis.

    Returns ``(e, lam)`` with ``e`` of shape ``(n, 2n)``: ``A e[i] = lam[i] e[i]``,
    ``{e[i], J e[i]}`` g-orthonormal, and ``lam`` descending. Eigenvalues come
    in J-pairs, so each eigenspace is split into ``(e, Je)`` planes.
    """
    A = np.asarray(A, dtype=float)
    pairs = jacobi_eigen(A, frame)
    if j_commutation_residual(A, frame) > SYMMETRY_TOL:
        raise NotJCommuting("endomorphism does not commute with J")
    lam_all, vecs = pairs.values, pairs.vectors
    scale = _maxabs(lam_all)
    breaks = [0]
    for k in range(len(lam_all) - 1):
        if lam_all[k] - lam_all[k + 1] > CLUSTER_GAP * scale:
            breaks.append(k + 1)
    breaks.append(len(lam_all))

    es, lams = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if (hi - lo) % 2:
            raise NotJCommuting(f"eigenvalue cluster of odd dimension {hi - lo}")
        cluster = [vecs[:, k] for k in range(lo, hi)]
        lam = float(np.mean(lam_all[lo:hi]))
        while cluster:
            e = _fix_sign(cluster[0] / frame.norm(cluster[0]))
            je = frame.J @ e
            inside = sum(frame.inner(u, je) * u for u in cluster)
            if frame.norm(je - inside) > 1e-6:
                raise NotJCommuting("J does not preserve an eigenspace")
            survivors = []
            for u in cluster[1:]:
                u = u - frame.inner(e, u) * e - frame.inner(je, u) * je
                for w in survivors:
                    u = u - frame.inner(w, u) * w
                nu = frame.norm(u)
                if nu > 1e-6:
                    survivors.append(u / nu)
            if len(survivors) != len(cluster) - 2:
                raise NotJCommuting("could not split eigenspace into J-pairs")
            es.append(e)
            lams.append(lam)
            cluster = survivors
    return np.array(es), np.array(lams)


# ---------------------------------------------------------------------------
# Pullbacks


def _map_matrix(F) -> np.ndarray:
    return np.asarray(getattr(F, "F", F), dtype=float)


def pullback4(T, F) -> np.ndarray:
    """``(F^* T)(x, y, z, w) = T(Fx, Fy, Fz, Fw)``."""
    T = np.asarray(T, dtype=float)
    F = _map_matrix(F)
    if T.ndim != 4 or len(set(T.shape)) != 1 or F.ndim != 2 or F.shape[0] != T.shape[0]:
        raise DimensionMismatch(f"cannot pull back tensor {T.shape} by map {F.shape}")
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", T, F, F, F, F, optimize=True)


def pullback_metric(g, F) -> np.ndarray:
    """``(F^* g)(u, v) = g(Fu, Fv)``."""
    g = np.asarray(g, dtype=float)
    F = _map_matrix(F)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or F.ndim != 2 or F.shape[0] != g.shape[0]:
        raise DimensionMismatch(f"cannot pull back metric {g.shape} by map {F.shape}")
    h = F.T @ g @ F
    return 0.5 * (h + h.T)
