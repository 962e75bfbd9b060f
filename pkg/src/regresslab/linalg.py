"""Dense linear algebra used by every estimator.

Matrices and vectors are plain float64 numpy arrays. Constructors reject
NaN/Inf so that numerical failures surface at the solver, not downstream.
"""

import numpy as np

from .exceptions import NotPositiveDefiniteError, ShapeError, SingularMatrixError

#: Symmetry tolerance for Cholesky inputs, relative to ``max|a|``.
SYMMETRY_RTOL = 1e-10
#: LU pivots below ``SINGULAR_PIVOT_RTOL * max|a|`` are treated as zero.
SINGULAR_PIVOT_RTOL = 1e-12
#: Cholesky pivots below ``CHOLESKY_PIVOT_RTOL * max(diag a)`` are treated as
#: non-positive; catches exactly rank-deficient Gram matrices whose rounding
#: leaves a tiny positive residue.
CHOLESKY_PIVOT_RTOL = 1e-13


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float64 array."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def as_vector(v, name="vector"):
    """Return ``v`` as a finite 1-D float64 array."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def _check_square(a):
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")


def matmul(a, b):
    """Matrix product with an explicit conformance check."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def cholesky(a):
    """Lower-triangular ``L`` with ``L @ L.T == a``.

    Raises
    ------
    NotPositiveDefiniteError
        If a pivot is non-positive (relative to the largest diagonal entry).
    """
    a = as_matrix(a)
    _check_square(a)
    scale = np.max(np.abs(a)) if a.size else 0.0
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_RTOL * scale:
        raise ShapeError("matrix is not symmetric within tolerance")
    n = a.shape[0]
    floor = CHOLESKY_PIVOT_RTOL * max(np.max(np.diag(a), initial=0.0), 0.0)
    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        d = a[j, j] - row @ row
        if not d > floor:
            raise NotPositiveDefiniteError(
                f"non-positive pivot {d:.3e} at column {j}; matrix is not positive definite"
            )
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ row) / L[j, j]
    return L


def _forward_sub(L, b):
    x = np.empty_like(b)
    for i in range(L.shape[0]):
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def _back_sub(U, b):
    n = U.shape[0]
    x = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - U[i, i + 1:] @ x[i + 1:]) / U[i, i]
    return x


def cholesky_solve(a, b):
    """Solve ``a x = b`` for symmetric positive definite ``a``."""
    b = as_vector(b, "b")
    L = cholesky(a)
    if L.shape[0] != b.shape[0]:
        raise ShapeError(f"system of size {L.shape[0]} with rhs of length {b.shape[0]}")
    return _back_sub(L.T, _forward_sub(L, b))


def lu_factor(a):
    """Partial-pivot LU: returns ``(lu, perm)`` with ``a[perm] == L @ U``."""
    a = as_matrix(a)
    _check_square(a)
    n = a.shape[0]
    lu = a.copy()
    perm = np.arange(n)
    threshold = SINGULAR_PIVOT_RTOL * (np.max(np.abs(a)) if a.size else 0.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if not abs(lu[p, k]) > threshold:
            raise SingularMatrixError(f"pivot {lu[p, k]:.3e} at column {k}; matrix is singular")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm


def lu_solve(a, b):
    """Solve a general square system by partial-pivot elimination."""
    b = as_vector(b, "b")
    lu, perm = lu_factor(a)
    if lu.shape[0] != b.shape[0]:
        raise ShapeError(f"system of size {lu.shape[0]} with rhs of length {b.shape[0]}")
    n = lu.shape[0]
    unit_lower = np.tril(lu, -1) + np.eye(n)
    return _back_sub(np.triu(lu), _forward_sub(unit_lower, b[perm]))


def is_positive_definite(a):
    """True iff the Cholesky factorization of ``a`` succeeds."""
    a = as_matrix(a)
    _check_square(a)
    try:
        cholesky(a)
    except NotPositiveDefiniteError:
        return False
    return True


def solve_normal_equations(x, y, ridge=0.0, penalize_bias=True, refine_steps=3):
    """Least-squares coefficients from ``(X'X + ridge*I) theta = X'y``.

    Cholesky is tried first; on a non-positive pivot the same system is
    handed to LU. A few steps of iterative refinement with residuals formed
    against ``X`` itself recover most of the accuracy lost by squaring the
    condition number (needed for interpolating polynomial designs).

    When ``penalize_bias`` is False the ridge term skips coordinate 0.
    """
    x = as_matrix(x, "x")
    y = as_vector(y, "y")
    if x.shape[0] != y.shape[0]:
        raise ShapeError(f"x has {x.shape[0]} rows but y has {y.shape[0]}")
    gram = x.T @ x
    diag = np.full(x.shape[1], float(ridge))
    if not penalize_bias:
        diag[0] = 0.0
    gram[np.diag_indices_from(gram)] += diag

    try:
        L = cholesky(gram)

        def solve(rhs):
            return _back_sub(L.T, _forward_sub(L, rhs))
    except NotPositiveDefiniteError:
        lu, perm = lu_factor(gram)
        n = lu.shape[0]
        lower = np.tril(lu, -1) + np.eye(n)
        upper = np.triu(lu)

        def solve(rhs):
            return _back_sub(upper, _forward_sub(lower, rhs[perm]))

    theta = solve(x.T @ y)
    best = np.max(np.abs(x.T @ (y - x @ theta) - diag * theta))
    for _ in range(refine_steps):
        resid = x.T @ (y - x @ theta) - diag * theta
        candidate = theta + solve(resid)
        score = np.max(np.abs(x.T @ (y - x @ candidate) - diag * candidate))
        if not score < best:
            break
        theta, best = candidate, score
    return theta
