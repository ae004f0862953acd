"""Sparse polynomials in ``z^1..z^n`` and their conjugates.

A polynomial is a map ``(a, b) -> c`` meaning ``c * z^a * conj(z)^b`` with
``a`` and ``b`` exponent tuples. Wirtinger derivatives are exact exponent
bookkeeping, so potentials built from these give machine-precision metrics
and curvatures.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Mapping

import numpy as np

Monomial = tuple[tuple[int, ...], tuple[int, ...]]


class ZPolynomial:
    def __init__(self, n: int, terms: Mapping[Monomial, complex] | None = None):
        self.n = n
        self.terms: dict[Monomial, complex] = {}
        for (a, b), c in (terms or {}).items():
            a, b = tuple(int(k) for k in a), tuple(int(k) for k in b)
            if len(a) != n or len(b) != n or min(a + b) < 0:
                raise ValueError(f"bad monomial exponents {(a, b)} for n={n}")
            c = complex(c)
            if c != 0:
                self.terms[(a, b)] = self.terms.get((a, b), 0j) + c
        self._compile()

    def _compile(self):
        keys = list(self.terms)
        self._za = np.array([k[0] for k in keys], dtype=int).reshape(len(keys), self.n)
        self._zb = np.array([k[1] for k in keys], dtype=int).reshape(len(keys), self.n)
        self._coef = np.array([self.terms[k] for k in keys], dtype=complex)

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Monomial, complex]]:
        return iter(sorted(self.terms.items()))

    def __add__(self, other: "ZPolynomial") -> "ZPolynomial":
        merged = dict(self.terms)
        for k, c in other.terms.items():
            merged[k] = merged.get(k, 0j) + c
        return ZPolynomial(self.n, merged)

    def __eq__(self, other):
        return isinstance(other, ZPolynomial) and self.n == other.n and self.terms == other.terms

    def __repr__(self):
        return f"ZPolynomial(n={self.n}, terms={len(self)})"

    def conj(self) -> "ZPolynomial":
        """Complex conjugate polynomial: ``(a, b, c) -> (b, a, conj c)``."""
        return ZPolynomial(self.n, {(b, a): np.conj(c) for (a, b), c in self.terms.items()})

    def real_part(self) -> "ZPolynomial":
        half = ZPolynomial(self.n, {k: 0.5 * c for k, c in self.terms.items()})
        return half + half.conj()

    def is_real(self, tol: float = 0.0) -> bool:
        for (a, b), c in self.terms.items():
            if abs(c - np.conj(self.terms.get((b, a), 0j))) > tol:
                return False
        return True

    def dz(self, k: int) -> "ZPolynomial":
        """Holomorphic derivative with respect to ``z^k``."""
        out = {}
        for (a, b), c in self.terms.items():
            if a[k]:
                a2 = a[:k] + (a[k] - 1,) + a[k + 1 :]
                out[(a2, b)] = c * a[k]
        return ZPolynomial(self.n, out)

    def dzbar(self, k: int) -> "ZPolynomial":
        """Antiholomorphic derivative with respect to ``conj(z^k)``."""
        out = {}
        for (a, b), c in self.terms.items():
            if b[k]:
                b2 = b[:k] + (b[k] - 1,) + b[k + 1 :]
                out[(a, b2)] = c * b[k]
        return ZPolynomial(self.n, out)

    def __call__(self, z) -> complex:
        if not self.terms:
            return 0j
        z = np.asarray(z, dtype=complex)
        mono = np.prod(z**self._za * np.conj(z) ** self._zb, axis=1)
        return complex(self._coef @ mono)

    def degree(self) -> int:
        return max((sum(a) + sum(b) for a, b in self.terms), default=0)


def monomials(n: int, min_degree: int, max_degree: int) -> list[Monomial]:
    """All ``(a, b)`` with total degree in ``[min_degree, max_degree]``, sorted."""
    out = []
    for expo in itertools.product(range(max_degree + 1), repeat=2 * n):
        if min_degree <= sum(expo) <= max_degree:
            out.append((tuple(expo[:n]), tuple(expo[n:])))
    return sorted(out)


def squared_norm(n: int) -> ZPolynomial:
    """``sum |z^k|^2``."""
    return ZPolynomial(
        n, {(tuple(int(i == k) for i in range(n)),) * 2: 1.0 for k in range(n)}
    )
