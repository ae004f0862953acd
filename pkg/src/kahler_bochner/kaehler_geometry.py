"""Pointwise metric and curvature data from Kähler charts.

Coordinates ``z^k = x^k + i y^k`` are stored as real vectors
``(x^1..x^n, y^1..y^n)`` and the tangent basis is ordered the same way, so
the complex structure is ``J = [[0, -I], [I, 0]]``. From the Hermitian
matrix ``h_{ab} = d^2 K / dz^a dconj(z)^b`` the real metric is

    g = 2 * [[Re h, Im h], [-Im h, Re h]]

which makes the flat potential ``|z|^2`` give ``g = 2 I``.

Three backends produce ``(g, R)``:

* :class:`ClosedForm` -- hand-coded ``h`` with its first and mixed second
  holomorphic derivatives.
* :class:`PolynomialPotential` -- exact Wirtinger differentiation of a
  sparse polynomial potential.
* :class:`NumericPotential` -- finite differences of a real potential,
  followed by the real Levi-Civita curvature of the resulting metric. This
  path shares no code with the complex curvature formula used by the other
  two and serves as their cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DimensionMismatch,
    FrameInvalid,
    NotPositiveDefinite,
    OutsideDomain,
    UnknownName,
    UnsupportedDimension,
)
from .polynomial import ZPolynomial, monomials, squared_norm
from .tensor_core import HermitianFrame, standard_complex_structure

CATALOG = ("flat", "fubini-study", "complex-hyperbolic", "product-cp1-cp1", "random-poly")
RANDOM_POLY_RADIUS = 0.5
RANDOM_POLY_COEF_BOUND = 0.1


# ---------------------------------------------------------------------------
# Realification


def split_point(p, n):
    p = np.asarray(p, dtype=float)
    if p.shape != (2 * n,):
        raise DimensionMismatch(f"expected {2 * n} real coordinates, got {p.shape}")
    return p[:n] + 1j * p[n:]


def realify_metric(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    re, im = h.real, h.imag
    g = 2.0 * np.block([[re, im], [-im, re]])
    return 0.5 * (g + g.T)


def realify_matrix(A) -> np.ndarray:
    """Real ``2n x 2n`` matrix of the complex-linear map ``z -> A z``.

    Every such matrix commutes with the standard ``J``.
    """
    A = np.asarray(A, dtype=complex)
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


def _complex_to_real_basis(n):
    """``P[k, a]``: component of real basis vector ``a`` along complex vector ``k``.

    Complex basis: ``d/dz^1..d/dz^n`` then ``d/dconj(z)^1..``.
    """
    P = np.zeros((2 * n, 2 * n), dtype=complex)
    for k in range(n):
        P[k, k] = P[n + k, k] = 1.0
        P[k, n + k] = 1j
        P[n + k, n + k] = -1j
    return P


def realify_curvature(Q) -> np.ndarray:
    """Real (0,4) curvature from ``Q[a, b, c, d] = R(d_a, dbar_b, d_c, dbar_d)``."""
    Q = np.asarray(Q, dtype=complex)
    n = Q.shape[0]
    Rc = np.zeros((2 * n,) * 4, dtype=complex)
    u, b = slice(0, n), slice(n, 2 * n)
    Rc[u, b, u, b] = Q
    Rc[b, u, u, b] = -np.einsum("abcd->bacd", Q)
    Rc[u, b, b, u] = -np.einsum("abcd->abdc", Q)
    Rc[b, u, b, u] = np.einsum("abcd->badc", Q)
    P = _complex_to_real_basis(n)
    R = np.einsum("klmo,ka,lb,mc,od->abcd", Rc, P, P, P, P, optimize=True)
    return R.real


def kaehler_curvature_components(h, dh, ddh) -> np.ndarray:
    """``R(d_a, dbar_b, d_c, dbar_d)`` from the Hermitian metric and its derivatives.

    ``dh[c, a, b] = d_c h_{ab}`` and ``ddh[c, d, a, b] = d_c dbar_d h_{ab}``.
    The value is ``-d_c dbar_d h_{ab} + h^{mu nu} d_c h_{a nu} dbar_d h_{mu b}``,
    the sign under which complex projective space is positively curved and
    which matches :func:`riemann_from_metric_derivatives`.
    """
    h = np.asarray(h, dtype=complex)
    dh = np.asarray(dh, dtype=complex)
    ddh = np.asarray(ddh, dtype=complex)
    hinv = np.linalg.inv(h.T)  # hinv[mu, nu] = h^{mu nu-bar}
    dbh = np.conj(np.einsum("dbm->dmb", dh))  # dbh[d, mu, b] = dbar_d h_{mu b}
    second = np.einsum("can,mn,dmb->abcd", dh, hinv, dbh)
    return second - np.einsum("cdab->abcd", ddh)


def riemann_from_metric_derivatives(g, dg, ddg) -> np.ndarray:
    """Real (0,4) curvature ``R(a, b, c, d) = g(R(d_a, d_b) d_c, d_d)``.

    ``dg[k, i, j] = d_k g_ij`` and ``ddg[k, l, i, j] = d_k d_l g_ij``.
    Uses ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``.
    """
    ginv = np.linalg.inv(g)
    gam_low = 0.5 * (
        np.einsum("mln->lmn", dg) + np.einsum("nlm->lmn", dg) - dg
    )  # gam_low[l, m, n] = Gamma_{l mn}
    gam = np.einsum("rl,lmn->rmn", ginv, gam_low)
    dgam_low = 0.5 * (
        np.einsum("kmln->klmn", ddg) + np.einsum("knlm->klmn", ddg) - ddg
    )
    dginv = -np.einsum("ri,kij,jl->krl", ginv, dg, ginv)
    dgam = np.einsum("krl,lmn->krmn", dginv, gam_low) + np.einsum(
        "rl,klmn->krmn", ginv, dgam_low
    )
    # Rup[r, s, m, v]: component r of R(d_m, d_v) d_s
    Rup = (
        np.einsum("mrvs->rsmv", dgam)
        - np.einsum("vrms->rsmv", dgam)
        + np.einsum("rml,lvs->rsmv", gam, gam)
        - np.einsum("rvl,lms->rsmv", gam, gam)
    )
    return np.einsum("dr,rcab->abcd", g, Rup)


# ---------------------------------------------------------------------------
# Backends


class ClosedForm:
    """Hermitian metric given by formulas for ``h``, ``d h`` and ``d dbar h``."""

    tolerance = 1e-8

    def __init__(self, hermitian, d_hermitian, dd_hermitian):
        self.hermitian = hermitian
        self.d_hermitian = d_hermitian
        self.dd_hermitian = dd_hermitian

    def hermitian_data(self, z):
        return self.hermitian(z), self.d_hermitian(z), self.dd_hermitian(z)

    def metric(self, p, n):
        return realify_metric(self.hermitian(split_point(p, n)))

    def curvature(self, p, n):
        h, dh, ddh = self.hermitian_data(split_point(p, n))
        _require_pd(h)
        return realify_curvature(kaehler_curvature_components(h, dh, ddh))


class PolynomialPotential(ClosedForm):
    """Exact backend: ``K`` is a real :class:`ZPolynomial`."""

    def __init__(self, potential: ZPolynomial):
        if not potential.is_real(tol=1e-14):
            raise ValueError("polynomial potential is not real-valued")
        self.potential = potential
        n = potential.n
        r = range(n)
        self._h = [[potential.dz(a).dzbar(b) for b in r] for a in r]
        self._dh = [[[self._h[a][b].dz(c) for b in r] for a in r] for c in r]
        self._ddh = [
            [[[self._dh[c][a][b].dzbar(d) for b in r] for a in r] for d in r] for c in r
        ]
        super().__init__(self._eval_h, self._eval_dh, self._eval_ddh)

    def _eval_h(self, z):
        return np.array([[p(z) for p in row] for row in self._h])

    def _eval_dh(self, z):
        return np.array([[[p(z) for p in row] for row in mat] for mat in self._dh])

    def _eval_ddh(self, z):
        return np.array(
            [[[[p(z) for p in row] for row in mat] for mat in cube] for cube in self._ddh]
        )

    def __call__(self, p):
        """Real value of the potential at real coordinates ``p``."""
        return self.potential(split_point(p, self.potential.n)).real


class NumericPotential:
    """Finite-difference backend for a real potential on ``R^{2n}``.

    The metric is the J-invariant part of the central-difference Hessian of
    ``K`` (step ``h``); curvature comes from central differences of that
    metric (step ``h_metric``) fed to the real Levi-Civita formula.
    """

    tolerance = 1e-4

    def __init__(self, potential: Callable[[np.ndarray], float], h=1e-3, h_metric=1e-2):
        self.potential = potential
        self.h = h
        self.h_metric = h_metric

    def hessian(self, p):
        p = np.asarray(p, dtype=float)
        m, h = p.size, self.h
        f = self.potential
        f0 = f(p)
        H = np.empty((m, m))
        eye = np.eye(m) * h
        for i in range(m):
            H[i, i] = (f(p + eye[i]) - 2.0 * f0 + f(p - eye[i])) / h**2
            for j in range(i + 1, m):
                H[i, j] = H[j, i] = (
                    f(p + eye[i] + eye[j])
                    - f(p + eye[i] - eye[j])
                    - f(p - eye[i] + eye[j])
                    + f(p - eye[i] - eye[j])
                ) / (4.0 * h**2)
        return H

    def metric(self, p, n):
        J = standard_complex_structure(n)
        H = self.hessian(p)
        g = 0.5 * (H + J.T @ H @ J)
        return 0.5 * (g + g.T)

    def metric_derivatives(self, p, n):
        p = np.asarray(p, dtype=float)
        m, h = p.size, self.h_metric
        eye = np.eye(m) * h
        g0 = self.metric(p, n)
        gp = [self.metric(p + eye[k], n) for k in range(m)]
        gm = [self.metric(p - eye[k], n) for k in range(m)]
        dg = np.array([(gp[k] - gm[k]) / (2 * h) for k in range(m)])
        ddg = np.empty((m, m, m, m))
        for k in range(m):
            ddg[k, k] = (gp[k] - 2 * g0 + gm[k]) / h**2
            for l in range(k + 1, m):
                ddg[k, l] = ddg[l, k] = (
                    self.metric(p + eye[k] + eye[l], n)
                    - self.metric(p + eye[k] - eye[l], n)
                    - self.metric(p - eye[k] + eye[l], n)
                    + self.metric(p - eye[k] - eye[l], n)
                ) / (4 * h**2)
        return g0, dg, ddg

    def curvature(self, p, n):
        g, dg, ddg = self.metric_derivatives(p, n)
        if np.min(np.linalg.eigvalsh(g)) <= 0:
            raise NotPositiveDefinite("finite-difference metric is not positive definite")
        R = riemann_from_metric_derivatives(g, dg, ddg)
        # average over the exact symmetries of a Riemann tensor
        R = 0.5 * (R - np.einsum("bacd->abcd", R))
        R = 0.5 * (R - np.einsum("abdc->abcd", R))
        return 0.5 * (R + np.einsum("cdab->abcd", R))


def _require_pd(h):
    if np.min(np.linalg.eigvalsh(0.5 * (h + h.conj().T))) <= 0:
        raise NotPositiveDefinite("potential is not strictly plurisubharmonic here")


# ---------------------------------------------------------------------------
# Charts


@dataclass(frozen=True)
class KaehlerChart:
    name: str
    n: int
    backend: object
    domain: Callable[[np.ndarray], bool] = field(default=lambda p: True, repr=False)
    params: dict = field(default_factory=dict)

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (2 * self.n,):
            raise DimensionMismatch(
                f"chart {self.name!r} needs {2 * self.n} coordinates, got {p.size}"
            )
        if not np.all(np.isfinite(p)) or not self.domain(p):
            raise OutsideDomain(f"point {p.tolist()} is outside chart {self.name!r}")
        return p

    def with_backend(self, backend) -> "KaehlerChart":
        return KaehlerChart(self.name, self.n, backend, self.domain, dict(self.params))


def metric_at(chart: KaehlerChart, p) -> HermitianFrame:
    """Metric and standard complex structure at ``p`` as a frame."""
    p = chart.check_point(p)
    g = chart.backend.metric(p, chart.n)
    try:
        return HermitianFrame(chart.n, g, standard_complex_structure(chart.n))
    except FrameInvalid as exc:
        if np.all(np.isfinite(g)) and np.min(np.linalg.eigvalsh(0.5 * (g + g.T))) <= 0:
            raise NotPositiveDefinite(str(exc)) from exc
        raise


def curvature_at(chart: KaehlerChart, p) -> np.ndarray:
    """(0,4) curvature tensor at ``p`` in the coordinate basis."""
    p = chart.check_point(p)
    return chart.backend.curvature(p, chart.n)


# ---------------------------------------------------------------------------
# Catalog


def _space_form(eps):
    """Closed form for ``K = log(1 + eps |z|^2) / eps``; eps=1 FS, eps=-1 hyperbolic."""

    def parts(z):
        n = z.size
        zb = np.conj(z)
        s = 1.0 + eps * np.real(np.vdot(z, z))
        return n, zb, s, np.eye(n)

    def h(z):
        n, zb, s, d = parts(z)
        return d / s - eps * np.outer(zb, z) / s**2

    def dh(z):
        n, zb, s, d = parts(z)
        # [c, a, b]
        return (
            -eps * np.einsum("ab,c->cab", d, zb) / s**2
            - eps * np.einsum("bc,a->cab", d, zb) / s**2
            + 2 * eps**2 * np.einsum("a,b,c->cab", zb, z, zb) / s**3
        )

    def ddh(z):
        n, zb, s, d = parts(z)
        # [c, e, a, b] with e the conjugate index
        t1 = -eps * (
            np.einsum("ab,ce->ceab", d, d) / s**2
            - 2 * eps * np.einsum("ab,c,e->ceab", d, zb, z) / s**3
        )
        t2 = -eps * (
            np.einsum("bc,ae->ceab", d, d) / s**2
            - 2 * eps * np.einsum("bc,a,e->ceab", d, zb, z) / s**3
        )
        t3 = 2 * eps**2 * (
            (np.einsum("ae,c,b->ceab", d, zb, z) + np.einsum("ce,a,b->ceab", d, zb, z)) / s**3
            - 3 * eps * np.einsum("a,b,c,e->ceab", zb, z, zb, z) / s**4
        )
        return t1 + t2 + t3

    return h, dh, ddh


def _product_cp1(n):
    h1, dh1, ddh1 = _space_form(1.0)

    def h(z):
        return np.diag([h1(z[k : k + 1])[0, 0] for k in range(n)])

    def dh(z):
        out = np.zeros((n, n, n), dtype=complex)
        for k in range(n):
            out[k, k, k] = dh1(z[k : k + 1])[0, 0, 0]
        return out

    def ddh(z):
        out = np.zeros((n,) * 4, dtype=complex)
        for k in range(n):
            out[k, k, k, k] = ddh1(z[k : k + 1])[0, 0, 0, 0]
        return out

    return h, dh, ddh


def _flat(n):
    return (
        lambda z: np.eye(n, dtype=complex),
        lambda z: np.zeros((n,) * 3, dtype=complex),
        lambda z: np.zeros((n,) * 4, dtype=complex),
    )


def random_potential(seed: int, n: int, degree: int = 4, bound=RANDOM_POLY_COEF_BOUND):
    """``|z|^2 + Re P`` with ``P`` a random polynomial of degree 2..``degree``.

    Every monomial in ``z`` and ``conj(z)`` gets a complex coefficient drawn
    uniformly from the disc of radius ``bound``, using numpy's PCG64
    generator seeded with ``seed``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    terms = monomials(n, 2, degree)
    radius = bound * np.sqrt(rng.uniform(size=len(terms)))
    phase = rng.uniform(0.0, 2 * np.pi, size=len(terms))
    P = ZPolynomial(n, dict(zip(terms, radius * np.exp(1j * phase))))
    return squared_norm(n) + P.real_part()


def polynomial_chart(potential: ZPolynomial, name="polynomial", radius=None, params=None):
    domain = (lambda p: True) if radius is None else (lambda p: float(np.dot(p, p)) < radius**2)
    return KaehlerChart(name, potential.n, PolynomialPotential(potential), domain, params or {})


def numeric_chart(potential, n, name="numeric", domain=None, h=1e-3, h_metric=1e-2):
    return KaehlerChart(name, n, NumericPotential(potential, h, h_metric), domain or (lambda p: True))


def catalog_chart(name: str, n: int = 2, seed: int = 0, degree: int = 4) -> KaehlerChart:
    """Build one of the named charts in :data:`CATALOG`."""
    if name not in CATALOG:
        raise UnknownName(f"unknown chart {name!r}; choose from {', '.join(CATALOG)}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise UnsupportedDimension(f"complex dimension must be a positive integer, got {n!r}")
    if name == "flat":
        return KaehlerChart(name, n, ClosedForm(*_flat(n)))
    if name == "fubini-study":
        return KaehlerChart(name, n, ClosedForm(*_space_form(1.0)))
    if name == "complex-hyperbolic":
        return KaehlerChart(
            name, n, ClosedForm(*_space_form(-1.0)), lambda p: float(np.dot(p, p)) < 1.0
        )
    if name == "product-cp1-cp1":
        if n != 2:
            raise UnsupportedDimension("product-cp1-cp1 exists only for n = 2")
        return KaehlerChart(name, n, ClosedForm(*_product_cp1(n)))
    return polynomial_chart(
        random_potential(seed, n, degree),
        name=name,
        radius=RANDOM_POLY_RADIUS,
        params={"seed": int(seed), "degree": int(degree)},
    )


def chart_potential(chart: KaehlerChart):
    """Real potential ``K(p)`` of a catalog or polynomial chart, for the numeric backend."""
    if isinstance(chart.backend, PolynomialPotential):
        return chart.backend
    if isinstance(chart.backend, NumericPotential):
        return chart.backend.potential
    n = chart.n

    def sq(p):
        return float(np.dot(p, p))

    if chart.name == "flat":
        return sq
    if chart.name == "fubini-study":
        return lambda p: float(np.log1p(sq(p)))
    if chart.name == "complex-hyperbolic":
        return lambda p: float(-np.log1p(-sq(p)))
    if chart.name == "product-cp1-cp1":
        return lambda p: float(sum(np.log1p(p[k] ** 2 + p[n + k] ** 2) for k in range(n)))
    raise UnknownName(f"no potential known for chart {chart.name!r}")
