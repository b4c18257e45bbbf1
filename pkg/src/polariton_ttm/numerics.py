"""Dense complex linear-algebra kernels.

Everything here is a pure function of its inputs.  Matrices are plain
``numpy.ndarray`` objects of complex dtype; no wrapper type is imposed on
callers.

Vectorization convention used throughout the package: column stacking,

    vec(A @ X @ B) = kron(B.T, A) @ vec(X),

i.e. ``vec(X) = X.reshape(-1, order="F")``.
"""

import numpy as np
import scipy.linalg

#: relative singular-value cutoff used for pseudoinverses and null spaces
DEFAULT_RANK_TOL = 1e-10


class NumericsError(ValueError):
    """Raised on malformed numerical input (shape, finiteness, symmetry)."""


def _as_matrix(A, name="A"):
    A = np.asarray(A)
    if A.ndim != 2:
        raise NumericsError(f"{name} must be two-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericsError(f"{name} has non-finite entries")
    return A.astype(complex, copy=False)


def vec(X):
    """Column-stack a matrix into a vector."""
    return np.asarray(X).reshape(-1, order="F")


def unvec(v, d=None):
    """Inverse of :func:`vec` for a square ``d x d`` matrix."""
    v = np.asarray(v)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise NumericsError(f"vector of length {v.size} is not a vec'd square matrix")
    return v.reshape(d, d, order="F")


def max_abs(A):
    """Max-absolute-entry norm (0 for empty input)."""
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0


def matrix_exponential(A, t=1.0):
    """Return ``exp(A t)``.

    The time argument is kept separate from ``A`` so that a generator can be
    reused over a grid of time steps.  Backed by scipy's Pade
    scaling-and-squaring implementation.
    """
    A = _as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise NumericsError(f"matrix exponential needs a square matrix, got {A.shape}")
    if not np.isfinite(t):
        raise NumericsError("time argument must be finite")
    return scipy.linalg.expm(A * t)


def _svd(A):
    try:
        return np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge; gesvd is slower but robust
        return scipy.linalg.svd(A, full_matrices=True, lapack_driver="gesvd")


def pseudoinverse(A, tol=DEFAULT_RANK_TOL):
    """Moore-Penrose pseudoinverse via the SVD.

    Singular values ``<= tol * sigma_max`` are treated as zero.
    """
    A = _as_matrix(A)
    if tol < 0:
        raise NumericsError("tol must be non-negative")
    m, n = A.shape
    if A.size == 0:
        return np.zeros((n, m), dtype=complex)
    U, s, Vh = _svd(A)
    smax = s[0] if s.size else 0.0
    keep = s > tol * smax if smax > 0 else np.zeros_like(s, dtype=bool)
    r = int(np.count_nonzero(keep))
    return (Vh[:r].conj().T / s[:r]) @ U[:, :r].conj().T


def null_space(A, tol=DEFAULT_RANK_TOL):
    """Orthonormal basis of the numerical null space of ``A``.

    Returns a list of column vectors (1-d arrays).  A vector ``v`` belongs to
    the space when ``|A v| <= tol * sigma_max * |v|``; the list is empty when
    ``A`` has full column rank.
    """
    A = _as_matrix(A)
    n = A.shape[1]
    if A.size == 0:
        return [np.eye(n, dtype=complex)[:, i] for i in range(n)]
    _, s, Vh = _svd(A)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > tol * smax)) if smax > 0 else 0
    return [Vh[i].conj() for i in range(rank, n)]


def hermitian_eig(A, tol=1e-10):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(w, V)`` with ``w`` real and ascending and ``V`` unitary, so that
    ``A = V diag(w) V^dagger``.
    """
    A = _as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise NumericsError(f"hermitian_eig needs a square matrix, got {A.shape}")
    scale = max(max_abs(A), 1e-300)
    if max_abs(A - A.conj().T) > tol * scale:
        raise NumericsError("matrix is not Hermitian within tolerance")
    w, V = np.linalg.eigh(0.5 * (A + A.conj().T))
    return w, V


def hermitize(A):
    """Return the Hermitian part of a square matrix."""
    A = np.asarray(A)
    return 0.5 * (A + A.conj().T)
