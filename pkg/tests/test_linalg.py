import numpy as np
import pytest

from opfam.errors import (
    DegenerateSpectrumError,
    DimensionMismatchError,
    InputError,
    SingularMatrixError,
)
from opfam.linalg import (
    eigenvalues,
    op_norm,
    sigma_min,
    solve,
    spectral_decomp,
)

SEED = 20240601


def test_op_norm_examples():
    assert op_norm(np.eye(3)) == 1.0
    assert op_norm(np.diag([0.0, -2.0])) == 2.0
    # Shift matrix: N*N = diag(0, 1), so the singular values are {0, 1}.
    assert op_norm([[0.0, 1.0], [0.0, 0.0]]) == pytest.approx(1.0, rel=1e-10)


def test_op_norm_rejects_bad_input():
    with pytest.raises(InputError):
        op_norm(np.ones((2, 3)))
    with pytest.raises(InputError):
        op_norm(np.array([[np.nan, 0], [0, 1]]))


def test_solve_examples():
    assert np.allclose(solve(np.eye(2), [1, 2]), [1, 2])
    assert np.allclose(solve(np.diag([2.0, 4.0]), [2, 4]), [1, 1])
    # Back-substitution by hand: y2 = 1, y1 = 2 - y2 = 1.
    assert np.allclose(solve([[1, 1], [0, 1]], [2, 1]), [1, 1])


def test_solve_residual_bound(rng):
    for _ in range(100):
        d = int(rng.integers(2, 9))
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        b = rng.normal(size=d) + 1j * rng.normal(size=d)
        y = solve(a, b)
        resid = np.linalg.norm(a @ y - b)
        assert resid <= 1e-12 * (op_norm(a) * np.linalg.norm(y) + np.linalg.norm(b))


def test_solve_singular_carries_pivot():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrixError) as err:
        solve(a, [1.0, 1.0])
    assert err.value.pivot >= 0.0
    with pytest.raises(DimensionMismatchError):
        solve(np.eye(2), [1.0, 2.0, 3.0])


def test_sigma_min_examples():
    assert sigma_min(np.eye(2)) == 1.0
    assert sigma_min(np.diag([3.0, 1e-9])) == pytest.approx(1e-9, rel=1e-8)
    assert sigma_min([[0.0, 1.0], [0.25, 0.0]]) == pytest.approx(0.25, rel=1e-10)
    assert sigma_min([[1.0, 2.0], [2.0, 4.0]]) == pytest.approx(0.0, abs=1e-14)


def test_eigenvalues_examples():
    assert np.allclose(eigenvalues(np.diag([1.0, 2.0, 3.0])), [1, 2, 3])
    assert np.allclose(eigenvalues([[0.0, 1.0], [0.0, 0.0]]), [0, 0])
    # Characteristic polynomial x^2 - 0.25.
    assert np.allclose(eigenvalues([[0.0, 1.0], [0.25, 0.0]]), [-0.5, 0.5])


def test_norm_inequalities_bulk():
    rng = np.random.default_rng(SEED)
    for _ in range(1000):
        d = int(rng.integers(2, 7))
        a = rng.uniform(-1, 1, (d, d)) + 1j * rng.uniform(-1, 1, (d, d))
        b = rng.uniform(-1, 1, (d, d)) + 1j * rng.uniform(-1, 1, (d, d))
        na, nb = op_norm(a), op_norm(b)
        assert op_norm(a @ b) <= na * nb * (1 + 1e-9)
        assert op_norm(a + b) <= (na + nb) * (1 + 1e-9)


def test_neumann_series_converges_to_solve():
    rng = np.random.default_rng(SEED + 1)
    for _ in range(25):
        d = int(rng.integers(2, 7))
        a = rng.uniform(-1, 1, (d, d)) + 1j * rng.uniform(-1, 1, (d, d))
        lam = 1.7 * op_norm(a)
        b = rng.normal(size=d) + 1j * rng.normal(size=d)
        assert sigma_min(lam * np.eye(d) - a) > 0
        y = solve(lam * np.eye(d) - a, b)
        partial = np.zeros(d, dtype=complex)
        term = b.astype(complex)
        for j in range(300):
            partial += term / lam ** (j + 1)
            term = a @ term
        assert np.linalg.norm(partial - y) <= 1e-6


def test_spectral_decomp_diag():
    dec = spectral_decomp(np.diag([1.0, 2.0]))
    assert len(dec.clusters) == 2
    p1, p2 = (c.projection for c in dec.clusters)
    assert np.allclose(p1, np.diag([1.0, 0.0]), atol=1e-10)
    assert np.allclose(p2, np.diag([0.0, 1.0]), atol=1e-10)
    for c in dec.clusters:
        assert op_norm(c.nilpotent) < 1e-10


def test_spectral_decomp_jordan_block():
    j = np.array([[0.0, 1.0], [0.0, 0.0]])
    dec = spectral_decomp(j)
    assert len(dec.clusters) == 1
    c = dec.clusters[0]
    assert abs(c.center) < 1e-7
    assert c.multiplicity == 2
    assert np.allclose(c.projection, np.eye(2), atol=1e-8)
    assert np.allclose(c.nilpotent, j, atol=1e-8)


def test_spectral_decomp_nonnormal_example():
    a = np.array([[1.0, 1.0], [0.0, 2.0]])
    dec = spectral_decomp(a)
    p1, p2 = (c.projection for c in dec.clusters)
    assert np.allclose(p1, [[1.0, -1.0], [0.0, 0.0]], atol=1e-9)
    assert np.allclose(p2, [[0.0, 1.0], [0.0, 1.0]], atol=1e-9)
    assert np.allclose(p1 + p2, np.eye(2), atol=1e-10)
    assert np.allclose(p1 @ p1, p1, atol=1e-10)


def test_spectral_decomp_invariants_random():
    rng = np.random.default_rng(SEED + 2)
    for _ in range(20):
        d = int(rng.integers(2, 9))
        while True:
            w = rng.uniform(-2, 2, d) + 1j * rng.uniform(-2, 2, d)
            gaps = [abs(w[i] - w[j]) for i in range(d) for j in range(i + 1, d)]
            if not gaps or min(gaps) >= 0.5:
                break
        v = np.eye(d) + 0.2 * (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
        a = v @ np.diag(w) @ np.linalg.inv(v)
        dec = spectral_decomp(a, cluster_tol=1e-4)
        assert dec.defect <= 1e-7
        assert sum(c.multiplicity for c in dec.clusters) == d
        eigs = eigenvalues(a)
        for c in dec.clusters:
            assert min(abs(eigs - c.center)) <= 1e-4


def test_spectral_decomp_degenerate_raises():
    with pytest.raises(DegenerateSpectrumError):
        spectral_decomp(np.diag([0.0, 2e-4]), cluster_tol=1e-4)
