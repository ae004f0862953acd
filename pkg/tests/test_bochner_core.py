import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_algebraic_curvature, random_bochner, random_bundle, random_frame, random_unitary
from kahler_bochner.bochner_core import (
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
from kahler_bochner.errors import InconsistentBundle, UnsupportedDimension
from kahler_bochner.kaehler_geometry import catalog_chart, curvature_at, metric_at
from kahler_bochner.tensor_core import curvature_symmetry_residuals, pullback4, tensor_norm

seeds = st.integers(min_value=0, max_value=2**20)


def bochner_by_vectors(frame, R, S, tau):
    """Oracle: the defining formula evaluated term by term on basis vectors.

    Every term is a vector in ``R^{2n}``; ``Sx`` means the endomorphism
    ``g^{-1} S`` applied to ``x``.
    """
    n, m = frame.n, frame.dim
    g, J, ginv = frame.g, frame.J, frame.ginv
    E = np.eye(m)

    def G(u, v):
        return u @ g @ v

    def Sf(u, v):
        return u @ S @ v

    def Sv(u):
        return ginv @ S @ u

    def Rv(x, y, z):
        return ginv @ np.einsum("abcd,a,b,c->d", R, x, y, z)

    B = np.zeros((m,) * 4)
    c1 = 1.0 / (2 * (n + 2))
    c2 = tau / (4 * (n + 1) * (n + 2))
    for a in range(m):
        for b in range(m):
            for c in range(m):
                x, y, z = E[a], E[b], E[c]
                ricci = (
                    Sf(y, z) * x - Sf(x, z) * y + G(y, z) * Sv(x) - G(x, z) * Sv(y)
                    + Sf(J @ y, z) * (J @ x) - Sf(J @ x, z) * (J @ y)
                    + G(J @ y, z) * Sv(J @ x) - G(J @ x, z) * Sv(J @ y)
                    - 2 * Sf(J @ x, y) * (J @ z) - 2 * G(J @ x, y) * Sv(J @ z)
                )
                scalar = (
                    G(y, z) * x - G(x, z) * y + G(J @ y, z) * (J @ x)
                    - G(J @ x, z) * (J @ y) - 2 * G(J @ x, y) * (J @ z)
                )
                vec = Rv(x, y, z) - c1 * ricci + c2 * scalar
                B[a, b, c] = g @ vec
    return B


def zero_bundle(n=2):
    frame = random_frame(np.random.default_rng(0), n)
    return CurvatureBundle.from_curvature(frame, np.zeros((2 * n,) * 4))


# ---------------------------------------------------------------------------
# the formula itself


def test_zero_curvature_gives_zero():
    B = bochner_from_curvature(zero_bundle())
    assert np.array_equal(B.B, np.zeros((4,) * 4))
    assert trace_identity_residual(B, np.ones(4)) == 0.0
    assert bochner_idempotence_residual(B) == 0.0


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_formula_matches_vector_oracle(seed):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 2
    frame = random_frame(rng, n)
    bundle = CurvatureBundle.from_curvature(frame, random_algebraic_curvature(rng, n))
    B = bochner_from_curvature(bundle).B
    oracle = bochner_by_vectors(frame, bundle.R, bundle.S, bundle.tau)
    assert tensor_norm(B - oracle, frame) <= 1e-12 * tensor_norm(bundle.R, frame)


def test_fubini_study_is_bochner_flat():
    chart = catalog_chart("fubini-study", 2)
    bundle, B = bochner_at(chart, np.zeros(4))
    assert B.norm() <= 1e-6 * tensor_norm(bundle.R, bundle.frame)
    assert is_bochner_flat(B)


def test_product_is_not_bochner_flat():
    bundle, B = bochner_at(catalog_chart("product-cp1-cp1", 2), np.zeros(4))
    assert B.norm() > 0.01 * tensor_norm(bundle.R, bundle.frame)
    assert not is_bochner_flat(B, tol=1e-6)


def test_flat_chart_is_bochner_flat():
    _, B = bochner_at(catalog_chart("flat", 2), np.array([0.5, 0.1, 0.0, -3.0]))
    assert B.norm() == 0.0
    assert is_bochner_flat(B)


def test_is_bochner_flat_scales():
    B = random_bochner(3)
    big = BochnerTensor(B.frame, 1e9 * B.B)
    assert not is_bochner_flat(big)
    assert is_bochner_flat(big, reference=1e20)
    with pytest.raises(ValueError):
        is_bochner_flat(B, tol=0.0)


# ---------------------------------------------------------------------------
# identities


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_bochner_identities_on_generated_bundles(seed):
    n = 2 + seed % 2
    B = random_bochner(seed, n)
    frame = B.frame
    res = curvature_symmetry_residuals(B.B, frame)
    assert max(res.values()) <= 1e-8
    assert ricci_of_bochner_residual(B) <= 1e-8
    rng = np.random.default_rng(seed)
    assert trace_identity_residual(B, rng.standard_normal(2 * n)) <= 1e-8
    assert bochner_idempotence_residual(B) <= 1e-9


def test_trace_identity_by_brute_force_summation():
    B = random_bochner(4)
    frame = B.frame
    x = np.array([1.0, -2.0, 0.5, 0.25])
    # orthonormal J-adapted basis from numpy's eigh
    w, v = np.linalg.eigh(frame.g)
    e1 = v[:, 0] / np.sqrt(w[0])
    rest = [u - frame.inner(u, e1) * e1 - frame.inner(u, frame.J @ e1) * (frame.J @ e1) for u in np.eye(4)]
    e2 = max(rest, key=frame.norm)
    e2 = e2 / frame.norm(e2)
    total = np.zeros(4)
    for e in (e1, e2):
        total += frame.ginv @ np.einsum("abcd,a,b,c->d", B.B, e, frame.J @ e, x)
    assert frame.norm(total) <= 1e-10 * B.norm() * frame.norm(x)


def test_trace_identity_is_basis_independent():
    B = random_bochner(5)
    x = np.array([0.3, 0.1, -0.7, 0.2])
    r1 = trace_identity_residual(B, x, rng=1)
    r2 = trace_identity_residual(B, x, rng=2)
    assert abs(r1 - r2) <= 1e-10


def test_trace_identity_detects_full_curvature():
    bundle, _ = bochner_at(catalog_chart("fubini-study", 2), np.zeros(4))
    R_as_B = BochnerTensor(bundle.frame, bundle.R)
    assert trace_identity_residual(R_as_B, np.array([1.0, 0, 0, 0])) > 0.01


@pytest.mark.parametrize("n", [2, 3])
def test_idempotence(n):
    assert bochner_idempotence_residual(random_bochner(0, n)) <= 1e-9


# ---------------------------------------------------------------------------
# linearity and naturality


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_linearity(seed):
    rng = np.random.default_rng(seed)
    frame = random_frame(rng, 2)
    b1 = CurvatureBundle.from_curvature(frame, random_algebraic_curvature(rng, 2))
    b2 = CurvatureBundle.from_curvature(frame, random_algebraic_curvature(rng, 2))
    lhs = bochner_from_curvature(b1 + b2).B
    rhs = bochner_from_curvature(b1).B + bochner_from_curvature(b2).B
    assert tensor_norm(lhs - rhs, frame) <= 1e-10 * max(tensor_norm(lhs, frame), 1.0)


def test_adding_bundles_on_different_frames_fails():
    rng = np.random.default_rng(0)
    a = CurvatureBundle.from_curvature(random_frame(rng, 2), np.zeros((4,) * 4))
    b = CurvatureBundle.from_curvature(random_frame(rng, 2), np.zeros((4,) * 4))
    with pytest.raises(InconsistentBundle):
        a + b


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_naturality_under_unitary_change_of_basis(seed):
    rng = np.random.default_rng(seed)
    frame = random_frame(rng, 2)
    bundle = CurvatureBundle.from_curvature(frame, random_algebraic_curvature(rng, 2))
    U = random_unitary(rng, frame)
    conj = CurvatureBundle.from_curvature(frame, pullback4(bundle.R, U))
    lhs = bochner_from_curvature(conj).B
    rhs = pullback4(bochner_from_curvature(bundle).B, U)
    assert tensor_norm(lhs - rhs, frame) <= 1e-9 * tensor_norm(bundle.R, frame)


# ---------------------------------------------------------------------------
# bundles


def test_inconsistent_bundle_is_rejected():
    good = random_bundle(0, 2)
    bad = CurvatureBundle(good.frame, good.R, 2 * good.S, good.S_endo, good.tau)
    with pytest.raises(InconsistentBundle):
        bochner_from_curvature(bad)
    not_curvature = CurvatureBundle.from_curvature(good.frame, np.random.default_rng(0).standard_normal((4,) * 4))
    with pytest.raises(InconsistentBundle):
        bochner_from_curvature(not_curvature)


def test_random_curvature_is_deterministic():
    a, b = random_kaehler_curvature(0, 2), random_kaehler_curvature(0, 2)
    assert np.array_equal(a.R, b.R) and np.array_equal(a.frame.g, b.frame.g)
    res = curvature_symmetry_residuals(a.R, a.frame)
    assert max(res.values()) <= 1e-10
    a.validate()


def test_random_curvature_is_not_bochner_flat():
    bundle = random_kaehler_curvature(1, 2)
    B = bochner_from_curvature(bundle)
    assert B.norm() > 1e-6 * tensor_norm(bundle.R, bundle.frame)


def test_random_curvature_dimensions():
    assert random_kaehler_curvature(0, 4).R.shape == (8,) * 4
    with pytest.raises(UnsupportedDimension):
        random_kaehler_curvature(0, 5)


def test_bochner_at_matches_manual_pipeline():
    chart = catalog_chart("random-poly", 2, seed=2)
    p = np.array([0.1, 0.0, -0.1, 0.2])
    bundle, B = bochner_at(chart, p)
    manual = bochner_from_curvature(CurvatureBundle.from_curvature(metric_at(chart, p), curvature_at(chart, p)))
    assert np.array_equal(B.B, manual.B)
