import numpy as np
import pytest
from scipy.sparse import csc_matrix

from congestfv import NonConvergence
from congestfv.nonlinear import UPPER, effective_tol, newton, picard, stencil_matrix


def _linear(A, b):
    def fun(x):
        return A @ x - b, float(np.max(np.abs(A) @ np.abs(x)) + np.max(np.abs(b))), None
    return fun


def test_newton_linear_one_step():
    A = np.array([[4.0, -1, 0], [-1, 4, -1], [0, -1, 4]])
    b = np.array([0.5, 1.0, 0.7])
    sol = newton(_linear(A, b), lambda x: csc_matrix(A), np.zeros(3), 1e-12, 20)
    assert sol.iterations == 1
    np.testing.assert_allclose(sol.x, np.linalg.solve(A, b), rtol=1e-14)


def test_newton_rejects_bound():
    A = np.eye(2)
    b = np.array([2.0, 0.5])  # root outside the box
    with pytest.raises(NonConvergence) as info:
        newton(_linear(A, b), lambda x: csc_matrix(A), np.zeros(2), 1e-12, 30)
    assert info.value.iterate is not None
    assert np.max(info.value.iterate) <= UPPER


def test_picard_contraction():
    # x = 0.5 x + 0.2  <=>  R = (x - 0.5 x - 0.2) / dt with dt = 1
    fun = lambda x: (0.5 * x - 0.2, 1.0, None)  # noqa: E731
    sol = picard(fun, np.array([0.9]), 1.0, 1e-12, 200)
    assert sol.x[0] == pytest.approx(0.4, abs=1e-11)


def test_picard_damps_oscillation():
    # undamped map x <- x - 2.5 (x - 0.3) diverges; damping must rescue it
    fun = lambda x: (2.5 * (x - 0.3), 1.0, None)  # noqa: E731
    sol = picard(fun, np.array([0.35]), 1.0, 1e-12, 500)
    assert sol.x[0] == pytest.approx(0.3, abs=1e-11)


def test_effective_tol_floor():
    assert effective_tol(1e-10, 1.0) == 1e-10
    assert effective_tol(1e-10, 1e12) > 1e-10


def test_stencil_matrix_1d():
    d, up, lo = np.arange(4.0) + 10, np.arange(4.0) + 20, np.arange(4.0) + 30
    A = stencil_matrix(d, up, lo).toarray()
    for i in range(4):
        assert A[i, i] == d[i]
        assert A[i, (i + 1) % 4] == up[i]
        assert A[i, (i - 1) % 4] == lo[i]


def test_stencil_matrix_2d():
    shape = (3, 4)
    rng = np.random.default_rng(0)
    c, e, w, n, s = (rng.normal(size=shape) for _ in range(5))
    A = stencil_matrix(c, e, w, n, s).toarray()
    idx = np.arange(12).reshape(shape)
    for i in range(3):
        for j in range(4):
            r = idx[i, j]
            assert A[r, r] == c[i, j]
            assert A[r, idx[(i + 1) % 3, j]] == e[i, j]
            assert A[r, idx[(i - 1) % 3, j]] == w[i, j]
            assert A[r, idx[i, (j + 1) % 4]] == n[i, j]
            assert A[r, idx[i, (j - 1) % 4]] == s[i, j]
