import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linear_sum_assignment

from asymspec import spectral
from asymspec.errors import ConvergenceError, DimensionError, OracleFailure, PreconditionError
from asymspec.matcore import RngStream, gen_rank1_symmetric, rank1_from_vector
from asymspec.noise import NoiseModel, sample_noise


def matched_gap(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def companion(roots):
    coeffs = np.poly(roots)  # highest degree first, monic
    n = len(roots)
    C = np.zeros((n, n))
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -coeffs[:0:-1]
    return C


def test_leading_diag():
    est = spectral.leading_eigenpair(np.diag([2.0, 1.0]))
    assert est.value_re == pytest.approx(2.0)
    assert np.allclose(np.abs(est.vector), [1, 0], atol=1e-9)


def test_leading_upper_triangular():
    est = spectral.leading_eigenpair(np.array([[2.0, 1.0], [0.0, 1.0]]))
    assert est.value_re == pytest.approx(2.0)
    assert np.allclose(est.vector, [1, 0], atol=1e-8)


def test_leading_planted_matches_oracle():
    g = RngStream(3).generator()
    M = 0.2 * g.standard_normal((5, 5)) + 3.0 * np.outer(np.ones(5), np.ones(5)) / 5
    est = spectral.leading_eigenpair(M, rng=RngStream(3))
    roots = spectral.char_poly_oracle(M)
    assert abs(est.value - roots[0]) <= 1e-8
    assert est.residual <= spectral.DEFAULT_TOL * np.linalg.norm(M)
    assert np.linalg.norm(est.vector) == pytest.approx(1.0, abs=1e-12)


def test_leading_sign_convention():
    est = spectral.leading_eigenpair(np.diag([-3.0, 1.0, 0.5]))
    assert est.value_re == pytest.approx(-3.0)
    assert est.vector[0] > 0


def test_leading_complex_pair_flagged():
    # rotation-scaled block dominates: leading eigenvalue is complex
    M = np.zeros((3, 3))
    M[:2, :2] = [[0.0, -2.0], [2.0, 0.0]]
    M[2, 2] = 1.0
    est = spectral.leading_eigenpair(M)
    assert est.complex_discarded
    assert abs(est.value_im) == pytest.approx(2.0)
    assert est.value_re == pytest.approx(0.0, abs=1e-9)


def test_roots_of_unity():
    C = companion([1, -1, 1j, -1j])
    spec = spectral.top_k_eigenpairs(C, 0)
    assert matched_gap(spec.values, [1, -1, 1j, -1j]) <= 1e-10
    im = sorted(abs(z.imag) for z in spec.values if abs(z.imag) > 0.5)
    assert im[0] == pytest.approx(im[1], abs=1e-12)


def test_random_8x8_matches_oracle():
    M = RngStream(11).generator().standard_normal((8, 8))
    assert matched_gap(spectral.eigenvalues(M), spectral.char_poly_oracle(M)) <= 1e-7


def test_top_k_vectors_residuals():
    M = RngStream(2).generator().standard_normal((12, 12))
    spec = spectral.top_k_eigenpairs(M, 4, rng=RngStream(2))
    for j in range(4):
        v = spec.vectors[:, j]
        assert np.linalg.norm(M @ v - spec.values[j] * v) <= 1e-8 * np.linalg.norm(M)


def test_top_k_bad_k():
    with pytest.raises(DimensionError):
        spectral.top_k_eigenpairs(np.eye(3), 4)
    with pytest.raises(DimensionError):
        spectral.eigenvalues(np.ones((2, 3)))


@given(st.integers(1, 30), st.integers(0, 10_000))
def test_trace_and_conjugates(n, seed):
    M = RngStream(seed).generator().standard_normal((n, n))
    vals = spectral.eigenvalues(M)
    assert abs(vals.sum().real - np.trace(M)) <= 1e-8 * max(np.linalg.norm(M), 1.0)
    assert abs(vals.sum().imag) <= 1e-8 * max(np.linalg.norm(M), 1.0)
    assert matched_gap(vals, np.conj(vals)) <= 1e-8 * max(np.linalg.norm(M), 1.0)
    mods = np.abs(vals)
    assert np.all(np.diff(mods) <= 1e-9 * max(np.linalg.norm(M), 1.0))


def test_ordering_ties():
    vals = spectral.sort_by_modulus([-1.0, 1.0, 1j, -1j])
    assert list(vals) == [1.0, 1j, -1j, -1.0]


def test_hessenberg_similarity():
    M = RngStream(4).generator().standard_normal((9, 9))
    H = spectral.hessenberg(M)
    assert np.allclose(np.tril(H, -2), 0.0)
    assert matched_gap(spectral.eigenvalues(H), spectral.eigenvalues(M)) <= 1e-9


def test_qr_agrees_with_numpy_large():
    M = RngStream(5).generator().standard_normal((60, 60))
    assert matched_gap(spectral.eigenvalues(M), np.linalg.eigvals(M)) <= 1e-8


def test_singular_diag():
    s, left, right = spectral.leading_singular_triple(np.diag([3.0, 1.0]))
    assert s == pytest.approx(3.0)
    assert np.allclose(np.abs(left), [1, 0]) and np.allclose(np.abs(right), [1, 0])


def test_singular_rank1():
    t = gen_rank1_symmetric(20, -2.5, rng=RngStream(1))
    s, _, _ = spectral.leading_singular_triple(t.matrix)
    assert s == pytest.approx(2.5)


def test_singular_matches_oracle():
    M = RngStream(5).generator().standard_normal((6, 4))
    s, left, right = spectral.leading_singular_triple(M)
    top = spectral.char_poly_oracle(M.T @ M)[0].real
    assert s * s == pytest.approx(top, abs=1e-8)
    assert np.allclose(M @ right, s * left, atol=1e-8)


def test_spectral_norm_cases():
    assert spectral.spectral_norm(np.zeros((4, 4))) == 0.0
    t = gen_rank1_symmetric(10, -3.0, rng=RngStream(2))
    assert spectral.spectral_norm(t.matrix) == pytest.approx(3.0)


def test_spectral_norm_self_consistent():
    n, sigma = 500, 0.01
    vals = [spectral.spectral_norm(sigma * RngStream(6, (k,)).generator().standard_normal((n, n)))
            for k in range(10)]
    med = float(np.median(vals))
    assert all(0.9 * med <= v <= 1.1 * med for v in vals)


def test_symmetric_small_cases():
    spec = spectral.symmetric_eigensolver(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(spec.values.real, [1.0, -1.0])
    spec = spectral.symmetric_eigensolver(np.eye(3))
    assert np.allclose(spec.values.real, 1.0)
    assert np.allclose(spec.vectors.T @ spec.vectors, np.eye(3))


def test_symmetric_matches_qr():
    t = gen_rank1_symmetric(50, 1.0, rng=RngStream(3))
    M = sample_noise(NoiseModel.symmetric_gaussian(0.02), t, RngStream(4))
    sym = spectral.symmetric_eigensolver(M)
    gen = spectral.top_k_eigenpairs(M, 1, rng=RngStream(5))
    assert matched_gap(sym.values, gen.values) <= 1e-9
    assert abs(sym.vectors[:, 0] @ gen.vectors[:, 0].real) == pytest.approx(1.0, abs=1e-9)


def test_symmetric_subspace_path():
    n = 300
    t = gen_rank1_symmetric(n, 1.0, rng=RngStream(3))
    M = sample_noise(NoiseModel.symmetric_gaussian(0.01), t, RngStream(4))
    spec = spectral.symmetric_eigensolver(M, k=2, rng=RngStream(1))
    ref = np.linalg.eigvalsh(M)
    ref = ref[np.argsort(-np.abs(ref))]
    assert np.allclose(spec.values.real, ref[:2], atol=1e-9)
    assert spec.values.size == 2


def test_symmetric_rejects_asymmetric():
    with pytest.raises(PreconditionError):
        spectral.symmetric_eigensolver(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_jacobi_reconstructs():
    A = RngStream(8).generator().standard_normal((40, 40))
    A = A + A.T
    vals, V = spectral.jacobi_eigh(A)
    assert np.allclose(V @ np.diag(vals) @ V.T, A, atol=1e-10)
    assert np.allclose(V.T @ V, np.eye(40), atol=1e-12)


def test_jacobi_sweep_limit():
    A = RngStream(8).generator().standard_normal((20, 20))
    with pytest.raises(ConvergenceError):
        spectral.jacobi_eigh(A + A.T, max_sweeps=1)


def test_oracle_examples():
    assert np.allclose(spectral.char_poly_oracle(np.diag([2.0, 1.0])), [2, 1])
    rot = spectral.char_poly_oracle(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert matched_gap(rot, [1j, -1j]) <= 1e-12
    cubic = spectral.char_poly_oracle(companion([1, 2, 3]))
    assert np.allclose(cubic, [3, 2, 1], atol=1e-10)


def test_oracle_limits():
    with pytest.raises(DimensionError):
        spectral.char_poly_oracle(np.eye(9))
    with pytest.raises(OracleFailure):
        spectral.durand_kerner(np.array([1.0, -3.0, 2.0]), max_iter=1)


def test_faddeev_leverrier_coefficients():
    c = spectral.faddeev_leverrier(np.diag([1.0, 2.0, 3.0]))
    # (z-1)(z-2)(z-3) = z^3 - 6 z^2 + 11 z - 6, lowest degree first
    assert np.allclose(c, [-6, 11, -6, 1])


def test_bauer_fike():
    hits = 0
    for k in range(30):
        t = gen_rank1_symmetric(30, 1.0, rng=RngStream(20, (k,)))
        M = sample_noise(NoiseModel.gaussian(0.02), t, RngStream(21, (k,)))
        lam = spectral.leading_eigenpair(M, rng=RngStream(22, (k,))).value
        hnorm = spectral.spectral_norm(M - t.matrix)
        hits += min(abs(lam - 1.0), abs(lam)) <= hnorm + 1e-9
    assert hits == 30


def test_reality_of_leading_eigenvalue():
    for k in range(20):
        t = gen_rank1_symmetric(100, 1.0, rng=RngStream(30, (k,)))
        M = sample_noise(NoiseModel.gaussian(0.02), t, RngStream(31, (k,)))
        assert spectral.spectral_norm(M - t.matrix) < 0.5
        est = spectral.leading_eigenpair(M, rng=RngStream(32, (k,)))
        assert abs(est.value_im) <= 10 * spectral.DEFAULT_TOL


def test_inverse_iteration_real():
    M = np.diag([5.0, 2.0, -1.0]) + 0.01 * RngStream(1).generator().standard_normal((3, 3))
    vals = spectral.eigenvalues(M)
    x, res, _ = spectral.inverse_iteration(M, vals[1], rng=RngStream(2))
    assert res <= 1e-9
    assert math.isclose(np.linalg.norm(x), 1.0)
