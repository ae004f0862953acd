import functools
from pathlib import Path

import numpy as np
import pytest

from kahler_bochner import PointData, catalog_chart
from kahler_bochner.bochner_core import bochner_from_curvature, random_kaehler_curvature
from kahler_bochner.kaehler_geometry import realify_curvature, realify_metric
from kahler_bochner.tensor_core import HermitianFrame, standard_complex_structure

DATA = Path(__file__).parent / "data"

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number, name, passed, detail):
    _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} -- {detail}")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def data_dir():
    return DATA


# ---------------------------------------------------------------------------
# generators shared by property tests


def random_frame(rng, n):
    """Random J-invariant positive definite metric with the standard J."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = a @ a.conj().T + n * np.eye(n)
    return HermitianFrame(n, realify_metric(h), standard_complex_structure(n))


def random_algebraic_curvature(rng, n):
    """Random tensor with all algebraic Kähler curvature symmetries."""
    X = rng.standard_normal((n,) * 4) + 1j * rng.standard_normal((n,) * 4)
    Y = X + np.einsum("abcd->cbad", X)
    Y = Y + np.einsum("abcd->adcb", Y)
    Q = 0.5 * (Y + np.conj(np.einsum("abcd->badc", Y)))
    return realify_curvature(Q)


def random_unitary(rng, frame):
    """g-orthogonal J-commuting map (a unitary in the orthonormal frame)."""
    n = frame.n
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, _ = np.linalg.qr(a)
    u0 = np.block([[q.real, -q.imag], [q.imag, q.real]])
    return frame.inv_sqrt_g @ u0 @ frame.sqrt_g


def random_j_linear(rng, frame):
    n = frame.n
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    f0 = np.block([[a.real, -a.imag], [a.imag, a.real]])
    return frame.inv_sqrt_g @ f0 @ frame.sqrt_g, f0


@functools.lru_cache(maxsize=None)
def random_bundle(seed, n):
    return random_kaehler_curvature(seed, n)


@functools.lru_cache(maxsize=None)
def random_bochner(seed, n=2):
    return bochner_from_curvature(random_bundle(seed, n))


@functools.lru_cache(maxsize=None)
def _product_point():
    return PointData.from_chart(catalog_chart("product-cp1-cp1", 2), np.zeros(4))


@pytest.fixture
def product_point():
    return _product_point()
