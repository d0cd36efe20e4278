"""Dense eigen- and singular-value solvers written against plain numpy arrays.

Nothing here calls LAPACK eigen-routines. The nonsymmetric path is
Householder reduction to Hessenberg form followed by Francis double-shift QR,
with eigenvectors recovered by inverse iteration. The symmetric path is cyclic
Jacobi (round-robin ordering, so each round rotates n/2 disjoint pairs at
once). ``char_poly_oracle`` is deliberately unrelated to all of the above and
exists only to check it.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DimensionError, OracleFailure, PreconditionError
from .matcore import as_generator, orthonormalize

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
EPS = np.finfo(float).eps

# above this size the symmetric solver switches from full Jacobi to
# subspace iteration with a Jacobi Rayleigh-Ritz step
JACOBI_FULL_MAX = 256


@dataclass
class EigenEstimate:
    value_re: float
    value_im: float
    vector: np.ndarray
    iterations: int
    residual: float
    # set when the solver found a complex leading eigenvalue and kept its real part
    complex_discarded: bool = False
    method: str = "power"

    @property
    def value(self) -> complex:
        return complex(self.value_re, self.value_im)


@dataclass
class Spectrum:
    """Eigenvalues sorted by decreasing modulus, plus optional top-k eigenvectors.

    ``vectors`` columns are unit norm; they are complex only when the
    corresponding eigenvalue is.
    """

    values: np.ndarray
    vectors: np.ndarray | None = None
    residuals: list = field(default_factory=list)

    @property
    def pairs(self) -> list[tuple[float, float]]:
        return [(float(z.real), float(z.imag)) for z in self.values]


def _require_square(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M


def canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip (or rotate, for complex vectors) so the first largest-magnitude entry is positive real."""
    if v.size == 0:
        return v
    k = int(np.argmax(np.abs(v)))
    pivot = v[k]
    if pivot == 0:
        return v
    if np.iscomplexobj(v):
        return v * (abs(pivot) / pivot)
    return v if pivot > 0 else -v


def _modulus_key_cmp(tol: float):
    def cmp(a: complex, b: complex) -> int:
        ma, mb = abs(a), abs(b)
        if abs(ma - mb) > tol:
            return -1 if ma > mb else 1
        if abs(a.real - b.real) > tol:
            return -1 if a.real > b.real else 1
        if a.imag != b.imag:
            return -1 if a.imag > b.imag else 1
        return 0
    return cmp


def sort_by_modulus(values, scale: float = 1.0) -> np.ndarray:
    """Descending modulus; ties broken by descending real part, then imaginary part."""
    vals = [complex(z) for z in values]
    tol = 1e-9 * max(scale, 1e-300)
    vals.sort(key=functools.cmp_to_key(_modulus_key_cmp(tol)))
    return np.array(vals, dtype=complex)


# --------------------------------------------------------------------------
# power iteration
# --------------------------------------------------------------------------

def power_iteration(matvec: Callable[[np.ndarray], np.ndarray], n: int, scale: float,
                    tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER, rng=None,
                    x0: np.ndarray | None = None, shift: float = 0.0):
    """Dominant eigenpair of the operator ``x -> matvec(x) + shift * x``.

    Returns ``(lam, x, iterations, residual, stalled)`` where ``lam`` is the
    Rayleigh quotient of the *unshifted* operator and the residual
    ``||A x - lam x||`` is measured on the unshifted operator too. ``stalled``
    reports that the residual stopped decreasing, the usual signature of a
    dominant complex pair or a modulus tie.
    """
    gen = as_generator(rng)
    x = gen.standard_normal(n) if x0 is None else np.array(x0, dtype=float)
    x /= np.linalg.norm(x)
    target = tol * scale
    window = 50
    best = math.inf
    best_at = 0
    lam = 0.0
    res = math.inf
    for it in range(1, max_iter + 1):
        y = matvec(x)
        lam = float(x @ y)
        res = float(np.linalg.norm(y - lam * x))
        if res <= target:
            return lam, x, it, res, False
        if res < 0.999 * best:
            best, best_at = res, it
        elif it - best_at > window and it > 4 * window:
            return lam, x, it, res, True
        z = y + shift * x if shift else y
        nz = np.linalg.norm(z)
        if nz == 0:
            # x lies in the null space of the shifted operator; the eigenvalue is -shift
            return -shift, x, it, float(np.linalg.norm(y + shift * x)), False
        x = z / nz
    return lam, x, max_iter, res, True


def leading_eigenpair(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                      rng=None) -> EigenEstimate:
    """Eigenvalue of largest modulus of a square matrix and its unit eigenvector.

    Power iteration first; if it stalls (dominant complex pair, modulus tie)
    the full Hessenberg-QR spectrum is used instead and the top-modulus
    eigenvalue is returned with its imaginary part populated.
    """
    M = _require_square(M)
    n = M.shape[0]
    scale = float(np.linalg.norm(M))
    if scale == 0.0:
        e = np.zeros(n)
        e[0] = 1.0
        return EigenEstimate(0.0, 0.0, e, 0, 0.0)
    lam, x, its, res, stalled = power_iteration(lambda v: M @ v, n, scale, tol, max_iter, rng)
    if not stalled:
        return EigenEstimate(lam, 0.0, canonical_sign(x), its, res)
    log.debug("power iteration stalled after %d iterations (residual %.3e); using QR", its, res)
    try:
        spec = top_k_eigenpairs(M, 1, tol)
    except ConvergenceError as exc:
        raise ConvergenceError(f"power iteration stalled and QR fallback failed: {exc}",
                               residual=res, iterations=its) from exc
    z = complex(spec.values[0])
    v = spec.vectors[:, 0]
    discarded = abs(z.imag) > 0
    if discarded:
        vr = v.real
        v = vr / np.linalg.norm(vr) if np.linalg.norm(vr) > 0 else np.abs(v) / np.linalg.norm(v)
    else:
        v = np.real(v)
    return EigenEstimate(z.real, z.imag, canonical_sign(v), its, spec.residuals[0],
                         complex_discarded=discarded, method="qr")


# --------------------------------------------------------------------------
# Hessenberg + Francis QR
# --------------------------------------------------------------------------

def _house(x: np.ndarray):
    """Householder vector ``v`` and ``beta`` with ``(I - beta v v') x = -+||x|| e1``."""
    alpha = np.linalg.norm(x)
    if alpha == 0.0:
        return np.zeros_like(x), 0.0
    v = np.array(x, dtype=float, copy=True)
    v[0] += math.copysign(alpha, x[0])
    vv = float(v @ v)
    if vv == 0.0:
        return v, 0.0
    return v, 2.0 / vv


def hessenberg(M) -> np.ndarray:
    """Upper Hessenberg matrix similar to ``M`` (Householder reflections)."""
    H = np.array(_require_square(M), dtype=float, copy=True)
    n = H.shape[0]
    for k in range(n - 2):
        v, beta = _house(H[k + 1:, k])
        if beta == 0.0:
            continue
        H[k + 1:, k:] -= beta * np.outer(v, v @ H[k + 1:, k:])
        H[:, k + 1:] -= beta * np.outer(H[:, k + 1:] @ v, v)
        H[k + 2:, k] = 0.0
    return H


def _eig2x2(a: float, b: float, c: float, d: float) -> tuple[complex, complex]:
    half_tr = 0.5 * (a + d)
    p = 0.5 * (a - d)
    disc = p * p + b * c
    if disc >= 0:
        root = math.sqrt(disc)
        big = half_tr + math.copysign(root, half_tr) if half_tr != 0 else root
        det = a * d - b * c
        small = det / big if big != 0 else half_tr - root
        return complex(big), complex(small)
    im = math.sqrt(-disc)
    return complex(half_tr, im), complex(half_tr, -im)


def hessenberg_qr_eigenvalues(H: np.ndarray, max_sweeps_per_eig: int = 60) -> np.ndarray:
    """All eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    Only the active unreduced window is updated, which is enough when no Schur
    vectors are wanted. Exceptional shifts are used after 10 and 20 stagnant
    sweeps on the same window.
    """
    H = np.array(H, dtype=float, copy=True)
    n = H.shape[0]
    out: list[complex] = []
    if n == 0:
        return np.array([], dtype=complex)
    norm = float(np.max(np.abs(H))) if H.size else 0.0
    hi = n - 1
    its = 0
    while hi >= 0:
        # locate the start of the trailing unreduced block
        lo = hi
        while lo > 0:
            s = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            if s == 0.0:
                s = norm
            if abs(H[lo, lo - 1]) <= EPS * s:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            out.append(complex(H[hi, hi]))
            hi -= 1
            its = 0
            continue
        if lo == hi - 1:
            out.extend(_eig2x2(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi]))
            hi -= 2
            its = 0
            continue
        if its >= max_sweeps_per_eig:
            raise ConvergenceError(
                f"Francis QR did not deflate the trailing block at index {hi} "
                f"after {its} sweeps", residual=abs(H[hi, hi - 1]), iterations=its)
        if its in (10, 20):
            s = abs(H[hi, hi - 1]) + abs(H[hi - 1, hi - 2])
            h11 = 0.75 * s + H[hi, hi]
            trace = 2.0 * h11
            det = h11 * h11 + 0.4375 * s * s
        else:
            trace = H[hi - 1, hi - 1] + H[hi, hi]
            det = H[hi - 1, hi - 1] * H[hi, hi] - H[hi - 1, hi] * H[hi, hi - 1]
        x = H[lo, lo] * H[lo, lo] + H[lo, lo + 1] * H[lo + 1, lo] - trace * H[lo, lo] + det
        y = H[lo + 1, lo] * (H[lo, lo] + H[lo + 1, lo + 1] - trace)
        z = H[lo + 1, lo] * H[lo + 2, lo + 1]
        for k in range(lo, hi - 1):
            v, beta = _house(np.array([x, y, z]))
            if beta != 0.0:
                c0 = max(lo, k - 1)
                blk = H[k:k + 3, c0:hi + 1]
                blk -= beta * np.outer(v, v @ blk)
                r1 = min(k + 3, hi)
                blk = H[lo:r1 + 1, k:k + 3]
                blk -= beta * np.outer(blk @ v, v)
            x = H[k + 1, k]
            y = H[k + 2, k]
            if k < hi - 2:
                z = H[k + 3, k]
        v, beta = _house(np.array([x, y]))
        if beta != 0.0:
            blk = H[hi - 1:hi + 1, hi - 2:hi + 1]
            blk -= beta * np.outer(v, v @ blk)
            blk = H[lo:hi + 1, hi - 1:hi + 1]
            blk -= beta * np.outer(blk @ v, v)
        its += 1
    return np.array(out, dtype=complex)


def eigenvalues(M) -> np.ndarray:
    """All eigenvalues of a square matrix, sorted by decreasing modulus."""
    M = _require_square(M)
    vals = hessenberg_qr_eigenvalues(hessenberg(M))
    return sort_by_modulus(vals, scale=max(float(np.max(np.abs(M))) if M.size else 0.0, 1.0))


def _lu_factor(A: np.ndarray):
    """In-place LU with partial pivoting; returns ``(LU, perm)``. Works for complex input."""
    LU = np.array(A, copy=True)
    n = LU.shape[0]
    perm = np.arange(n)
    tiny = EPS * max(float(np.max(np.abs(LU))) if LU.size else 0.0, 1e-300)
    for k in range(n):
        p = k + int(np.argmax(np.abs(LU[k:, k])))
        if p != k:
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        if abs(LU[k, k]) < tiny:
            LU[k, k] = tiny
        if k + 1 < n:
            LU[k + 1:, k] /= LU[k, k]
            LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, perm


def _lu_solve(LU: np.ndarray, perm: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = LU.shape[0]
    y = np.array(b[perm], dtype=LU.dtype, copy=True)
    for i in range(1, n):
        y[i] -= LU[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - LU[i, i + 1:] @ y[i + 1:]) / LU[i, i]
    return y


def inverse_iteration(M: np.ndarray, value: complex, tol: float = DEFAULT_TOL, rng=None,
                      deflate: np.ndarray | None = None, max_iter: int = 20):
    """Eigenvector for a known eigenvalue via shifted inverse iteration.

    The shift is jittered by ``1e-8 ||M||_F`` so that ``M - shift I`` is never
    exactly singular. ``deflate`` holds previously found vectors of the same
    eigenvalue; iterates are kept orthogonal to them.
    """
    n = M.shape[0]
    scale = float(np.linalg.norm(M))
    complex_case = abs(complex(value).imag) > 0
    dtype = complex if complex_case else float
    lam = complex(value) if complex_case else complex(value).real
    shift = lam + 1e-8 * max(scale, 1e-300)
    A = M.astype(dtype) - shift * np.eye(n, dtype=dtype)
    LU, perm = _lu_factor(A)
    gen = as_generator(rng)
    x = gen.standard_normal(n).astype(dtype)
    if complex_case:
        x = x + 1j * gen.standard_normal(n)
    x /= np.linalg.norm(x)
    res = math.inf
    for it in range(1, max_iter + 1):
        y = _lu_solve(LU, perm, x)
        if deflate is not None and deflate.shape[1]:
            y = y - deflate @ (deflate.conj().T @ y)
        ny = np.linalg.norm(y)
        if ny == 0 or not np.isfinite(ny):
            break
        x = y / ny
        res = float(np.linalg.norm(M @ x - lam * x))
        if res <= tol * max(scale, 1e-300):
            return x, res, it
    return x, res, max_iter


def top_k_eigenpairs(M, k: int, tol: float = DEFAULT_TOL, rng=None) -> Spectrum:
    """Full spectrum by Hessenberg + Francis QR; eigenvectors of the top ``k`` by inverse iteration."""
    M = _require_square(M)
    n = M.shape[0]
    if not 0 <= k <= n:
        raise DimensionError(f"need 0 <= k <= n, got k={k}, n={n}")
    vals = eigenvalues(M)
    if k == 0:
        return Spectrum(values=vals)
    gen = as_generator(rng)
    vecs = []
    residuals = []
    scale = max(float(np.linalg.norm(M)), 1e-300)
    for j in range(k):
        z = complex(vals[j])
        same = [vecs[i] for i in range(len(vecs)) if abs(complex(vals[i]) - z) <= 1e-8 * scale]
        defl = np.column_stack(same) if same else None
        if defl is not None and np.iscomplexobj(defl) and abs(z.imag) == 0:
            defl = None
        x, res, _ = inverse_iteration(M, z, tol, gen, deflate=defl)
        if abs(z.imag) == 0:
            x = np.real(x)
            x /= np.linalg.norm(x)
            res = float(np.linalg.norm(M @ x - z.real * x))
        vecs.append(canonical_sign(x))
        residuals.append(res)
    dtype = complex if any(np.iscomplexobj(v) for v in vecs) else float
    V = np.column_stack([v.astype(dtype) for v in vecs])
    return Spectrum(values=vals, vectors=V, residuals=residuals)


# --------------------------------------------------------------------------
# singular values
# --------------------------------------------------------------------------

def leading_singular_triple(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                            rng=None):
    """Largest singular value with left/right singular vectors.

    Power iteration on ``v -> M'(M v)``; the Gram matrix is never formed.
    Convergence is declared when ``||M' u - s v|| <= tol ||M||_F``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError("expected a matrix")
    m, n = M.shape
    scale = float(np.linalg.norm(M))
    if scale == 0.0:
        u = np.zeros(m)
        v = np.zeros(n)
        u[0] = v[0] = 1.0
        return 0.0, u, v
    gen = as_generator(rng)
    v = gen.standard_normal(n)
    v /= np.linalg.norm(v)
    target = tol * scale
    res = math.inf
    for it in range(1, max_iter + 1):
        w = M @ v
        s = float(np.linalg.norm(w))
        if s == 0.0:
            v = gen.standard_normal(n)
            v /= np.linalg.norm(v)
            continue
        u = w / s
        z = M.T @ u
        res = float(np.linalg.norm(z - s * v))
        if res <= target:
            u, v = _sign_pair(u, v)
            return s, u, v
        v = z / np.linalg.norm(z)
    raise ConvergenceError(f"singular power iteration did not converge in {max_iter} steps",
                           residual=res, iterations=max_iter)


def _sign_pair(u: np.ndarray, v: np.ndarray):
    k = int(np.argmax(np.abs(u)))
    if u[k] < 0:
        return -u, -v
    return u, v


def spectral_norm(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER, rng=None) -> float:
    return leading_singular_triple(M, tol, max_iter, rng)[0]


# --------------------------------------------------------------------------
# symmetric solvers
# --------------------------------------------------------------------------

def _round_robin(n: int):
    """Pairings of a round-robin tournament; each round covers disjoint index pairs."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        rounds.append([(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n])
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(A, tol: float = 1e-14, max_sweeps: int = 60):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` unsorted, with orthonormal eigenvector columns.
    """
    A = np.array(A, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    if n < 2:
        return np.diag(A).copy(), V
    rounds = [(np.array([p for p, _ in r]), np.array([q for _, q in r])) for r in _round_robin(n)]
    total = float(np.linalg.norm(A))
    if total == 0.0:
        return np.zeros(n), V
    for sweep in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= tol * total:
            return np.diag(A).copy(), V
        for P, Q in rounds:
            if P.size == 0:
                continue
            apq = A[P, Q]
            app = A[P, P]
            aqq = A[Q, Q]
            active = np.abs(apq) > EPS * EPS * total
            if not np.any(active):
                continue
            P, Q, apq, app, aqq = P[active], Q[active], apq[active], app[active], aqq[active]
            theta = (aqq - app) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # columns then rows: A <- J' A J with J acting on (p, q)
            Ap = A[:, P].copy()
            Aq = A[:, Q].copy()
            A[:, P] = c * Ap - s * Aq
            A[:, Q] = s * Ap + c * Aq
            Ap = A[P, :].copy()
            Aq = A[Q, :].copy()
            A[P, :] = c[:, None] * Ap - s[:, None] * Aq
            A[Q, :] = s[:, None] * Ap + c[:, None] * Aq
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            Vp = V[:, P].copy()
            Vq = V[:, Q].copy()
            V[:, P] = c * Vp - s * Vq
            V[:, Q] = s * Vp + c * Vq
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps", residual=off,
                           iterations=max_sweeps)


def _check_symmetric(M: np.ndarray) -> None:
    scale = float(np.linalg.norm(M))
    if float(np.linalg.norm(M - M.T)) > 1e-10 * max(scale, 1e-300):
        raise PreconditionError("symmetric_eigensolver needs a symmetric matrix")


def _order_symmetric(vals: np.ndarray, vecs: np.ndarray, scale: float):
    keyed = sort_by_modulus(vals, scale)
    # map back to indices; equal values are interchangeable
    used = np.zeros(vals.size, dtype=bool)
    idx = []
    for z in keyed:
        cand = np.where(~used & (vals == z.real))[0]
        j = int(cand[0]) if cand.size else int(np.argmin(np.where(used, np.inf, np.abs(vals - z.real))))
        used[j] = True
        idx.append(j)
    idx = np.array(idx)
    return vals[idx], vecs[:, idx]


def symmetric_eigensolver(M, k: int | None = None, tol: float = DEFAULT_TOL, rng=None) -> Spectrum:
    """Eigenpairs of a symmetric matrix, sorted by decreasing modulus.

    For ``n <= JACOBI_FULL_MAX`` (or ``k is None``) the whole matrix is
    diagonalised by Jacobi. Otherwise the top ``k`` eigenpairs come from block
    subspace iteration whose Rayleigh-Ritz step is itself solved by Jacobi;
    ``values`` then holds only those ``k`` eigenvalues.
    """
    M = _require_square(M)
    _check_symmetric(M)
    n = M.shape[0]
    k = n if k is None else k
    if not 0 <= k <= n:
        raise DimensionError(f"need 0 <= k <= n, got k={k}, n={n}")
    scale = max(float(np.linalg.norm(M)), 1e-300)
    if n <= JACOBI_FULL_MAX or k == n:
        vals, vecs = jacobi_eigh(M)
        vals, vecs = _order_symmetric(vals, vecs, scale)
        vecs = np.column_stack([canonical_sign(vecs[:, j]) for j in range(n)])
        residuals = [float(np.linalg.norm(M @ vecs[:, j] - vals[j] * vecs[:, j])) for j in range(k)]
        return Spectrum(values=vals.astype(complex), vectors=vecs[:, :k], residuals=residuals)
    vals, vecs, residuals = _subspace_iteration(M, k, tol, rng, scale)
    return Spectrum(values=vals.astype(complex), vectors=vecs, residuals=residuals)


def _subspace_iteration(M, k, tol, rng, scale, max_iter=DEFAULT_MAX_ITER):
    n = M.shape[0]
    b = min(n, k + max(4, k))
    gen = as_generator(rng)
    Q = orthonormalize(gen.standard_normal((n, b)))
    res = [math.inf] * k
    for it in range(1, max_iter + 1):
        Z = M @ Q
        T = Q.T @ Z
        T = 0.5 * (T + T.T)
        theta, W = jacobi_eigh(T)
        theta, W = _order_symmetric(theta, W, scale)
        X = Q @ W
        MX = Z @ W
        res = [float(np.linalg.norm(MX[:, j] - theta[j] * X[:, j])) for j in range(k)]
        if max(res) <= tol * scale:
            vecs = np.column_stack([canonical_sign(X[:, j] / np.linalg.norm(X[:, j])) for j in range(k)])
            return theta[:k], vecs, res
        Q = orthonormalize(MX)
        dead = np.linalg.norm(Q, axis=0) == 0
        if np.any(dead):
            Q[:, dead] = gen.standard_normal((n, int(dead.sum())))
            Q = orthonormalize(Q)
    raise ConvergenceError(f"subspace iteration did not converge in {max_iter} steps",
                           residual=max(res), iterations=max_iter)


# --------------------------------------------------------------------------
# independent oracle
# --------------------------------------------------------------------------

def faddeev_leverrier(M) -> np.ndarray:
    """Coefficients ``c[0..n]`` of ``det(zI - M) = sum_k c[k] z^k`` (``c[n] = 1``)."""
    A = _require_square(M)
    n = A.shape[0]
    c = np.zeros(n + 1)
    c[n] = 1.0
    Mk = np.zeros_like(A)
    ident = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + c[n - k + 1] * ident
        c[n - k] = -np.trace(A @ Mk) / k
    return c


def durand_kerner(coeffs, tol: float = 1e-15, max_iter: int = 5000) -> np.ndarray:
    """All roots of the monic polynomial ``sum_k coeffs[k] z^k`` (Weierstrass iteration)."""
    c = np.asarray(coeffs, dtype=complex)
    n = c.size - 1
    if n < 1:
        return np.array([], dtype=complex)
    if c[n] != 1:
        c = c / c[n]
    radius = 1.0 + float(np.max(np.abs(c[:n])))
    z = radius * (0.4 + 0.9j) ** np.arange(n)
    hi_first = c[::-1]
    for it in range(max_iter):
        pz = np.polyval(hi_first, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        denom = np.prod(diff, axis=1)
        if np.any(denom == 0):
            raise OracleFailure("Durand-Kerner iterates collided")
        step = pz / denom
        z = z - step
        if float(np.max(np.abs(step))) <= tol * radius:
            return z
    raise OracleFailure(f"Durand-Kerner stagnated after {max_iter} iterations "
                        f"(last step {float(np.max(np.abs(step))):.3e})")


def char_poly_oracle(M, max_n: int = 8) -> np.ndarray:
    """Eigenvalues via Faddeev-LeVerrier coefficients and Durand-Kerner roots (n <= 8 only)."""
    M = _require_square(M)
    n = M.shape[0]
    if n > max_n:
        raise DimensionError(f"char_poly_oracle is limited to n <= {max_n}, got {n}")
    coeffs = faddeev_leverrier(M)
    roots = durand_kerner(coeffs)
    # one Newton polish per root, kept only if it lowers |p|
    hi_first = coeffs[::-1].astype(complex)
    deriv = np.polyder(hi_first)
    for i, r in enumerate(roots):
        d = np.polyval(deriv, r)
        if d != 0:
            cand = r - np.polyval(hi_first, r) / d
            if abs(np.polyval(hi_first, cand)) < abs(np.polyval(hi_first, r)):
                roots[i] = cand
    scale = 1.0 + float(np.max(np.abs(roots))) if roots.size else 1.0
    roots = np.where(np.abs(roots.imag) <= 1e-13 * scale, roots.real + 0j, roots)
    return sort_by_modulus(roots, scale)
