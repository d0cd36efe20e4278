"""Dense carriers, seeded random streams and ground-truth generators.

Matrices and vectors are plain row-major ``numpy.float64`` arrays. Every
generator is a pure function of its arguments and an :class:`RngStream`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DimensionError, InvalidSpectrumError, ParameterError
from .metrics import incoherence

StreamKey = Union[int, tuple]


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by ``(master_seed, stream_id)``.

    ``stream_id`` is an int or a tuple of non-negative ints. Streams with
    different keys are statistically independent (SeedSequence spawn keys),
    and :meth:`generator` always restarts the same sequence.
    """

    master_seed: int
    stream_id: StreamKey = 0

    def _key(self) -> tuple:
        sid = self.stream_id
        return tuple(sid) if isinstance(sid, tuple) else (sid,)

    def child(self, *ids: int) -> "RngStream":
        return RngStream(self.master_seed, self._key() + tuple(ids))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed & (2**64 - 1), spawn_key=self._key())
        return np.random.Generator(np.random.PCG64(seq))

    def seed64(self) -> int:
        """A 64-bit integer summarising this stream (for logging only)."""
        seq = np.random.SeedSequence(entropy=self.master_seed & (2**64 - 1), spawn_key=self._key())
        return int(seq.generate_state(1, np.uint64)[0])


def as_generator(rng) -> np.random.Generator:
    if rng is None:
        return RngStream(0).generator()
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def check_finite(x: np.ndarray, what: str = "matrix") -> np.ndarray:
    if not np.all(np.isfinite(x)):
        raise ParameterError(f"{what} contains NaN or Inf")
    return x


def unit_vector(n: int, index: int) -> np.ndarray:
    e = np.zeros(n)
    e[index] = 1.0
    return e


def orthonormalize(A: np.ndarray) -> np.ndarray:
    """Orthonormal basis for the columns of ``A`` (modified Gram-Schmidt, two passes).

    Columns that become numerically dependent are replaced by zeros.
    """
    Q = np.array(A, dtype=float, copy=True)
    if Q.ndim == 1:
        Q = Q[:, None]
    k = Q.shape[1]
    for j in range(k):
        q = Q[:, j]
        scale = np.linalg.norm(q)
        for _ in range(2):
            if j:
                q -= Q[:, :j] @ (Q[:, :j].T @ q)
        nrm = np.linalg.norm(q)
        if nrm <= 1e-13 * max(scale, 1e-300):
            Q[:, j] = 0.0
        else:
            Q[:, j] = q / nrm
    return Q


@dataclass(frozen=True)
class GroundTruth:
    """Low-rank truth ``M*`` with its spectral data.

    For ``kind == "symmetric"`` the columns of ``eigenvectors`` are the
    ``u_j*`` and ``eigenvalues`` are sorted by decreasing magnitude. For
    ``kind == "asymmetric"`` (rank 1 only) ``eigenvectors`` holds ``u*``,
    ``right_vectors`` holds ``v*`` and ``eigenvalues[0]`` is the singular
    value.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    incoherence: float
    kind: str = "symmetric"
    right_vectors: np.ndarray | None = field(default=None)

    @property
    def rank(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def lambda_max(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    @property
    def lambda_min(self) -> float:
        return float(np.min(np.abs(self.eigenvalues)))

    @property
    def kappa(self) -> float:
        return self.lambda_max / self.lambda_min

    @property
    def u_star(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    @property
    def v_star(self) -> np.ndarray | None:
        return None if self.right_vectors is None else self.right_vectors[:, 0]


def _rank1_truth(u: np.ndarray, lambda_star: float) -> GroundTruth:
    M = lambda_star * np.outer(u, u)
    return GroundTruth(matrix=M, eigenvalues=np.array([float(lambda_star)]),
                       eigenvectors=u[:, None].copy(), incoherence=incoherence(u))


def rank1_from_vector(u, lambda_star: float = 1.0) -> GroundTruth:
    """Wrap a given unit vector as a symmetric rank-1 truth."""
    u = np.asarray(u, dtype=float)
    nrm = np.linalg.norm(u)
    if u.ndim != 1 or u.size < 2 or nrm == 0:
        raise DimensionError("need a nonzero vector of length >= 2")
    return _rank1_truth(u / nrm, lambda_star)


def random_unit_vector(n: int, rng) -> np.ndarray:
    g = as_generator(rng).standard_normal(n)
    return g / np.linalg.norm(g)


def gen_rank1_symmetric(n: int, lambda_star: float = 1.0, style: str = "random", rng=None,
                        mu_target: float | None = None, peak_index: int = 0) -> GroundTruth:
    """Symmetric rank-1 truth ``lambda* u* u*'``.

    style:
        ``uniform``   entries +-1/sqrt(n) with random signs (mu = 1)
        ``random``    uniform on the sphere, realised mu recorded
        ``localized`` one coordinate of size sqrt(mu_target/n) at ``peak_index``,
                      the remaining mass spread evenly (mu = mu_target exactly)
    """
    if n < 2:
        raise DimensionError(f"n must be >= 2, got {n}")
    if lambda_star == 0:
        raise InvalidSpectrumError("lambda_star must be nonzero")
    gen = as_generator(rng)
    if style == "uniform":
        signs = np.where(gen.random(n) < 0.5, -1.0, 1.0)
        u = signs / math.sqrt(n)
    elif style == "random":
        u = random_unit_vector(n, gen)
    elif style == "localized":
        mu = float(n if mu_target is None else mu_target)
        if not 1.0 <= mu <= n:
            raise ParameterError(f"mu_target must lie in [1, n], got {mu}")
        signs = np.where(gen.random(n) < 0.5, -1.0, 1.0)
        rest = math.sqrt(max(1.0 - mu / n, 0.0) / (n - 1))
        u = signs * rest
        u[peak_index] = math.sqrt(mu / n)
        u /= np.linalg.norm(u)
    else:
        raise ParameterError(f"unknown style {style!r}")
    return _rank1_truth(u, lambda_star)


def gen_rankr_symmetric(n: int, eigenvalues, rng=None) -> GroundTruth:
    """Symmetric rank-r truth ``U* diag(eigenvalues) U*'`` with a random orthonormal frame."""
    lam = np.asarray(eigenvalues, dtype=float).ravel()
    r = lam.size
    if not 1 <= r <= n:
        raise DimensionError(f"need 1 <= r <= n, got r={r}, n={n}")
    if np.any(lam == 0) or not np.all(np.isfinite(lam)):
        raise InvalidSpectrumError("eigenvalues must be finite and nonzero")
    gen = as_generator(rng)
    if r == 1:
        u = random_unit_vector(n, gen)
        return _rank1_truth(u, float(lam[0]))
    order = sorted(range(r), key=lambda i: (-abs(lam[i]), -lam[i]))
    lam = lam[order]
    U = orthonormalize(gen.standard_normal((n, r)))
    M = (U * lam) @ U.T
    M = 0.5 * (M + M.T)
    return GroundTruth(matrix=M, eigenvalues=lam, eigenvectors=U, incoherence=incoherence(U))


def dilation_incoherence(u: np.ndarray, v: np.ndarray) -> float:
    """Incoherence of the dilation eigenvectors ``(u; +-v)/sqrt(2)``."""
    stacked = np.concatenate([u, v]) / math.sqrt(2.0)
    return incoherence(stacked)


def gen_rank1_asymmetric(n1: int, n2: int, lambda_star: float = 1.0, rng=None,
                         u=None, v=None) -> GroundTruth:
    """Rectangular rank-1 truth ``lambda* u* v*'``; ``u``/``v`` may be pinned."""
    if n1 < 2 or n2 < 2:
        raise DimensionError(f"need n1, n2 >= 2, got {n1}, {n2}")
    if lambda_star == 0:
        raise InvalidSpectrumError("lambda_star must be nonzero")
    gen = as_generator(rng)
    u = random_unit_vector(n1, gen) if u is None else np.asarray(u, float) / np.linalg.norm(u)
    v = random_unit_vector(n2, gen) if v is None else np.asarray(v, float) / np.linalg.norm(v)
    if u.shape != (n1,) or v.shape != (n2,):
        raise DimensionError("pinned vectors do not match (n1, n2)")
    M = lambda_star * np.outer(u, v)
    return GroundTruth(matrix=M, eigenvalues=np.array([float(lambda_star)]),
                       eigenvectors=u[:, None].copy(), incoherence=dilation_incoherence(u, v),
                       kind="asymmetric", right_vectors=v[:, None].copy())
