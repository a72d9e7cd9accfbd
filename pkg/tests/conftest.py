"""Shared fixtures and independent oracles for the test suite.

The dense-matrix oracle builds the one-step operator explicitly on a
finite window, so evolution tests never reuse the vectorized kernel
they are checking.
"""

from __future__ import annotations

import numpy as np
import pytest

from qwscatter import CoinField, CoinMatrix, LatticeState, hadamard_coin


def haar_unitary(rng: np.random.Generator) -> np.ndarray:
    """Draw a 2x2 unitary from the Haar measure (QR with phase fix)."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_coin(rng: np.random.Generator, a_range: tuple[float, float] = (0.05, 0.95)) -> CoinMatrix:
    """Random coin with the modulus of the upper-left entry in ``a_range``."""
    a = rng.uniform(*a_range)
    alpha, beta = rng.uniform(-np.pi, np.pi, size=2)
    delta = rng.uniform(-np.pi, np.pi)
    return CoinMatrix(a=a, b=np.sqrt(1.0 - a * a), alpha=alpha, beta=beta, delta=delta)


def random_state(rng: np.random.Generator, lo: int = -8, hi: int = 9) -> LatticeState:
    amp = rng.standard_normal((hi - lo, 2)) + 1j * rng.standard_normal((hi - lo, 2))
    state = LatticeState(offset=lo, amp=amp)
    return state.normalized()


def dense_step_matrix(field: CoinField, lo: int, hi: int) -> np.ndarray:
    """One walk step as an explicit matrix on the window [lo, hi).

    Open boundary: amplitude shifted in from outside the window is
    dropped, so the matrix is exact only while the evolved support
    stays at least one site away from the edges.
    """
    width = hi - lo
    mat = np.zeros((2 * width, 2 * width), dtype=np.complex128)
    coins = field.block(lo, hi)
    for i in range(width):
        # component 0 at site x picks up row 0 of C(x+1), component 1 row 1 of C(x-1)
        if i + 1 < width:
            mat[2 * i + 0, 2 * (i + 1) + 0] = coins[i + 1, 0, 0]
            mat[2 * i + 0, 2 * (i + 1) + 1] = coins[i + 1, 0, 1]
        if i - 1 >= 0:
            mat[2 * i + 1, 2 * (i - 1) + 0] = coins[i - 1, 1, 0]
            mat[2 * i + 1, 2 * (i - 1) + 1] = coins[i - 1, 1, 1]
    return mat


def state_to_dense(state: LatticeState, lo: int, hi: int) -> np.ndarray:
    return state.values_on(lo, hi).reshape(-1)


def dense_to_state(vec: np.ndarray, lo: int) -> LatticeState:
    return LatticeState(offset=lo, amp=vec.reshape(-1, 2).copy())


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260815)


@pytest.fixture
def hadamard_field() -> CoinField:
    coin = hadamard_coin()
    return CoinField(left=coin, right=coin)


def endo_side_coin(sigma: float) -> CoinMatrix:
    """Two-phase side coin (1/sqrt2) [[1, e^{i sigma}], [e^{-i sigma}, -1]]."""
    s = 1.0 / np.sqrt(2.0)
    return CoinMatrix(a=s, b=s, alpha=0.0, beta=sigma, delta=np.pi)


@pytest.fixture
def one_defect_field() -> CoinField:
    """Two Hadamard-class phases with a reflecting diagonal defect at the origin."""
    defect = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
    return CoinField(
        left=endo_side_coin(-np.pi / 2),
        right=endo_side_coin(np.pi / 2),
        overrides={0: defect},
    )


def two_phase_field(a_left: float, a_right: float) -> CoinField:
    left = CoinMatrix(a=a_left, b=np.sqrt(1.0 - a_left**2), alpha=0.0, beta=0.0, delta=np.pi)
    right = CoinMatrix(a=a_right, b=np.sqrt(1.0 - a_right**2), alpha=0.0, beta=0.0, delta=np.pi)
    return CoinField(left=left, right=right)
