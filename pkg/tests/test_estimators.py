import math

import numpy as np
import pytest

from asymspec import estimators as est
from asymspec import spectral
from asymspec.errors import DegenerateCorrectionError, DimensionError, ParameterError
from asymspec.matcore import RngStream, gen_rank1_asymmetric, gen_rank1_symmetric, unit_vector
from asymspec.noise import NoiseModel, sample_noise


@pytest.fixture
def truth():
    return gen_rank1_symmetric(60, 1.0, rng=RngStream(1))


def min_sign_gap(u, v):
    return min(np.linalg.norm(u - v), np.linalg.norm(u + v))


def test_eig_noiseless(truth):
    e = est.estimate_eig(truth.matrix)
    assert e.lambda_hat == pytest.approx(1.0, abs=1e-10)
    assert min_sign_gap(e.u_hat, truth.u_star) <= 1e-9


def test_svd_noiseless(truth):
    e = est.estimate_svd(truth.matrix)
    assert e.lambda_hat == pytest.approx(1.0, abs=1e-12)
    assert min_sign_gap(e.u_hat, truth.u_star) <= 1e-9


def test_eig_svd_agree_on_psd(truth):
    M = truth.matrix + 0.05 * np.eye(60)
    a = est.estimate_eig(M)
    b = est.estimate_svd(M)
    assert a.lambda_hat == pytest.approx(b.lambda_hat, abs=1e-9)
    assert min_sign_gap(a.u_hat, b.u_hat) <= 1e-6


def test_unit_norm_outputs(truth):
    M = sample_noise(NoiseModel.gaussian(0.02), truth, RngStream(2))
    for e in (est.estimate_eig(M), est.estimate_svd(M), est.estimate_sym_corrected(M, 0.02),
              est.estimate_aggregated(M, 0.02, 3, RngStream(3))):
        assert np.linalg.norm(e.u_hat) == pytest.approx(1.0, abs=1e-12)


def test_shrinkage_arithmetic():
    # lambda_sym = 1.5 and n sigma^2 = 1
    assert est.shrinkage_correction(1.5, 100, 0.1) == pytest.approx(1.0)
    assert est.shrinkage_correction(1.5, 100, 0.0) == 1.5
    assert est.shrinkage_correction(-1.5, 100, 0.1) == pytest.approx(-1.0)
    with pytest.raises(DegenerateCorrectionError):
        est.shrinkage_correction(0.1, 100, 0.1)


def test_sym_corrected_zero_sigma(truth):
    M = sample_noise(NoiseModel.gaussian(0.02), truth, RngStream(5))
    e = est.estimate_sym_corrected(M, 0.0)
    assert e.lambda_hat == e.meta["lambda_sym"]


def test_sym_corrected_removes_bias():
    n, sigma = 200, 0.03
    raw, corrected = [], []
    for k in range(10):
        t = gen_rank1_symmetric(n, 1.0, rng=RngStream(6, (k,)))
        M = sample_noise(NoiseModel.gaussian(sigma), t, RngStream(7, (k,)))
        e = est.estimate_sym_corrected(M, sigma)
        raw.append(e.meta["lambda_sym"] - 1.0)
        corrected.append(e.lambda_hat - 1.0)
    assert np.mean(raw) > 0.05
    assert abs(np.mean(corrected)) < np.mean(raw) / 3


def test_dilation_unit_example():
    E = np.outer(unit_vector(2, 0), unit_vector(2, 0))
    D = est.dilation_matrix(E, E)
    vals = spectral.eigenvalues(D)
    assert np.allclose(sorted(vals.real), [-1, 0, 0, 1])
    e = est.estimate_dilation(E, E)
    assert e.lambda_hat == pytest.approx(1.0)
    assert e.meta["lambda2"] == pytest.approx(-1.0)
    assert np.allclose(np.abs(e.u_hat), [1, 0]) and np.allclose(np.abs(e.v_hat), [1, 0])


def test_dilation_noiseless_rectangular():
    t = gen_rank1_asymmetric(30, 15, 2.0, RngStream(3))
    e = est.estimate_dilation(t.matrix, t.matrix, rng=RngStream(4))
    assert e.lambda_hat == pytest.approx(2.0, abs=1e-9)
    assert e.meta["lambda2"] == pytest.approx(-2.0, abs=1e-9)
    assert min_sign_gap(e.u_hat, t.u_star) <= 1e-8
    assert min_sign_gap(e.v_hat, t.v_star) <= 1e-8


def test_dilation_symmetric_input_matches_eig(truth):
    M = truth.matrix + 0.3 * np.eye(60)
    d = est.estimate_dilation(M, M)
    assert d.lambda_hat == pytest.approx(est.estimate_eig(M).lambda_hat, abs=1e-8)


def test_dilation_operator_matches_dense():
    g = RngStream(8).generator()
    M1, M2 = g.standard_normal((5, 3)), g.standard_normal((5, 3))
    op = est._DilationOperator(M1, M2)
    x = g.standard_normal(8)
    assert np.allclose(op(x), est.dilation_matrix(M1, M2) @ x)
    with pytest.raises(DimensionError):
        est.dilation_matrix(M1, M2.T)


def test_asymmetrize_gaussian():
    M = RngStream(1).generator().standard_normal((6, 6))
    assert np.array_equal(est.asymmetrize_gaussian(M, 0.0, RngStream(2)), M)
    out = est.asymmetrize_gaussian(M, 0.5, RngStream(2))
    delta = out - M
    assert np.allclose(delta, -delta.T)
    assert np.all(np.diag(delta) == 0)


def test_asymmetrized_noise_decouples():
    # M + Delta with symmetric noise: H_ij and H_ji become uncorrelated
    n, sigma = 80, 1.0
    H = sample_noise(NoiseModel.symmetric_gaussian(sigma), gen_rank1_symmetric(n, 1e-9), RngStream(3))
    out = est.asymmetrize_gaussian(H, sigma, RngStream(4))
    iu = np.triu_indices(n, 1)
    corr = np.corrcoef(out[iu], out.T[iu])[0, 1]
    assert abs(corr) < 0.05
    assert np.var(out[iu]) == pytest.approx(2 * sigma ** 2, rel=0.05)


def test_asymmetric_rate():
    assert est.asymmetric_rate(0.75) == pytest.approx(0.5)
    assert est.asymmetric_rate(1.0) == 1.0
    with pytest.raises(ParameterError):
        est.asymmetric_rate(0.0)


def test_asymmetrize_completion_full():
    M = RngStream(1).generator().standard_normal((5, 5))
    M = M + M.T
    assert np.array_equal(est.asymmetrize_completion(M, 1.0, RngStream(2)), M)


def test_asymmetrize_completion_no_invented_entries():
    t = gen_rank1_symmetric(100, 1.0, rng=RngStream(1))
    p = 0.3
    M = sample_noise(NoiseModel.completion(p, symmetric=True), t, RngStream(2))
    out = est.asymmetrize_completion(M, p, RngStream(3))
    assert np.all(out[M == 0] == 0)


def test_asymmetrize_completion_rates():
    n, p = 400, 0.4
    q = est.asymmetric_rate(p)
    t = gen_rank1_symmetric(n, 1.0, "uniform", RngStream(1))
    M = sample_noise(NoiseModel.completion(p, symmetric=True), t, RngStream(2))
    out = est.asymmetrize_completion(M, p, RngStream(3))
    obs = out != 0
    iu = np.triu_indices(n, 1)
    upper, lower = obs[iu], obs.T[iu]
    assert upper.mean() == pytest.approx(q, abs=0.01)
    assert lower.mean() == pytest.approx(q, abs=0.01)
    assert (upper & lower).mean() == pytest.approx(q * q, abs=0.01)
    assert np.diag(obs).mean() == pytest.approx(q, abs=0.08)
    # entries are unbiased for M*
    kept = out[obs]
    assert np.allclose(np.abs(kept), n ** -1 / q)


def test_split_completion_independent_copies():
    n, p = 300, 0.5
    q = est.asymmetric_rate(p)
    t = gen_rank1_asymmetric(n, n, 1.0, RngStream(1))
    pooled = sample_noise(NoiseModel.completion(p), t, RngStream(2))
    M1, M2 = est.split_completion(pooled, p, RngStream(3))
    o1, o2 = M1 != 0, M2 != 0
    assert o1.mean() == pytest.approx(q, abs=0.01)
    assert (o1 & o2).mean() == pytest.approx(q * q, abs=0.01)
    assert np.all((o1 | o2) == (pooled != 0))


def test_aggregation_k1_matches_single_copy(truth):
    M = sample_noise(NoiseModel.symmetric_gaussian(0.02), truth, RngStream(2))
    agg = est.aggregate_eigenvectors(M, 0.02, 1, RngStream(3))
    gen = RngStream(3).generator()
    single = est.estimate_eig(est.asymmetrize_gaussian(M, 0.02, gen), rng=gen).u_hat
    assert min_sign_gap(agg, single) <= 1e-10


def test_aggregation_noiseless(truth):
    for K in (1, 4):
        u = est.aggregate_eigenvectors(truth.matrix, 0.0, K, RngStream(K))
        assert min_sign_gap(u, truth.u_star) <= 1e-9


def test_aggregation_bad_k(truth):
    with pytest.raises(ParameterError):
        est.estimate_aggregated(truth.matrix, 0.1, 0)


def test_covariance_single_direction():
    X = np.tile(unit_vector(4, 0), (6, 1))
    S = est.covariance_asym(X, 4)
    assert np.allclose(S, np.outer(unit_vector(4, 0), unit_vector(4, 0)))


def test_covariance_asym_unbiased():
    d, n, reps = 3, 8, 4000
    L = np.array([[1.0, 0.0, 0.0], [0.5, 1.0, 0.0], [0.0, -0.3, 0.8]])
    Sigma = L @ L.T
    g = RngStream(5).generator()
    draws = np.array([est.covariance_asym(g.standard_normal((n, d)) @ L.T) for _ in range(reps)])
    mean = draws.mean(axis=0)
    se = draws.std(axis=0, ddof=1) / math.sqrt(reps)
    assert np.all(np.abs(mean - Sigma) <= 5 * se)


def test_covariance_errors():
    with pytest.raises(ParameterError):
        est.covariance_asym(np.ones((3, 2)))
    with pytest.raises(DimensionError):
        est.covariance_asym(np.ones((4, 2)), 3)
    assert np.allclose(est.covariance_sample(np.eye(2)), np.eye(2) / 2)
