"""
Small dense linear algebra used throughout the library.

Everything here works on ``numpy`` arrays of dimension d (d is small, the
reference setup uses d=5). Positive definite systems are always handled
through a Cholesky factorization from ``scipy.linalg``; no function forms
an explicit inverse.

All functions are pure: they never mutate their arguments.
"""
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import LinAlgError, cho_factor, cho_solve, cholesky

from bandits.exceptions import DomainError, UsageError


SYMMETRY_TOL = 1e-12
ORTHONORMAL_TOL = 1e-12
SOLVE_TOL = 1e-10

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]


def as_vector(x: ArrayLike, name: str = 'x') -> Vector:
    """
    Convert input to a finite 1-D float vector.

    Args:
        x: Array-like of d real numbers
        name: Argument name used in error messages

    Returns:
        Vector: A float64 copy of ``x``

    Raises:
        UsageError: If ``x`` is not 1-D, is empty or has non-finite entries
    """
    arr = np.array(x, dtype=float)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise UsageError(f'{name} must be a non-empty vector, got shape {arr.shape}.')
    if not np.all(np.isfinite(arr)):
        raise UsageError(f'{name} must have finite components.')
    return arr


def as_symmetric(A: ArrayLike, name: str = 'A') -> Matrix:
    """
    Convert input to a square symmetric float matrix.

    Symmetry is checked entrywise: ``|A_ij - A_ji| <= 1e-12 * max(1, |A_ij|)``.

    Args:
        A: Array-like d x d matrix
        name: Argument name used in error messages

    Returns:
        Matrix: A float64 copy of ``A``

    Raises:
        UsageError: If ``A`` is not square or has non-finite entries
        DomainError: If ``A`` is not symmetric within tolerance
    """
    arr = np.array(A, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise UsageError(f'{name} must be a square matrix, got shape {arr.shape}.')
    if not np.all(np.isfinite(arr)):
        raise UsageError(f'{name} must have finite entries.')
    gap = np.abs(arr - arr.T)
    if np.any(gap > SYMMETRY_TOL * np.maximum(1.0, np.abs(arr))):
        raise DomainError(f'{name} is not symmetric.')
    return arr


def _check_dims(x: Vector, A: Matrix, x_name: str = 'x', a_name: str = 'A') -> None:
    if x.shape[0] != A.shape[0]:
        raise UsageError(
            f'Dimension mismatch: {x_name} has dimension {x.shape[0]}, '
            f'{a_name} is {A.shape[0]}x{A.shape[1]}.'
        )


def pd_factor(A: ArrayLike, name: str = 'A') -> Tuple[Matrix, bool]:
    """
    Cholesky-factorize a symmetric positive definite matrix.

    Args:
        A: Symmetric positive definite matrix
        name: Argument name used in error messages

    Returns:
        Tuple[Matrix, bool]: ``scipy.linalg.cho_factor`` output

    Raises:
        DomainError: If ``A`` is not positive definite
    """
    arr = as_symmetric(A, name)
    try:
        return cho_factor(arr, lower=True)
    except LinAlgError as exc:
        raise DomainError(f'{name} is not positive definite: {exc}') from exc


def is_positive_definite(A: ArrayLike) -> bool:
    """Return True when ``A`` is symmetric and admits a Cholesky factorization."""
    try:
        pd_factor(A)
    except (DomainError, UsageError):
        return False
    return True


def log_det_pd(A: ArrayLike, name: str = 'A') -> float:
    """
    Log-determinant of a positive definite matrix from its Cholesky factor.

    Args:
        A: Symmetric positive definite matrix
        name: Argument name used in error messages

    Returns:
        float: ``log det(A)``

    Raises:
        DomainError: If ``A`` is not positive definite
    """
    c, _ = pd_factor(A, name)
    return float(2.0 * np.sum(np.log(np.diag(c))))


def weighted_norm(x: ArrayLike, A: ArrayLike) -> float:
    """
    Weighted norm ``sqrt(x^T A x)`` for positive definite ``A``.

    Computed as ``||L^T x||_2`` with ``A = L L^T``, which is exactly zero
    only for the zero vector.

    Args:
        x: Vector of dimension d
        A: d x d symmetric positive definite weight

    Returns:
        float: The weighted norm

    Raises:
        UsageError: If dimensions do not match
        DomainError: If ``A`` is not positive definite
    """
    vec = as_vector(x, 'x')
    mat = as_symmetric(A, 'A')
    _check_dims(vec, mat)
    try:
        lower = cholesky(mat, lower=True)
    except LinAlgError as exc:
        raise DomainError(f'A is not positive definite: {exc}') from exc
    return float(np.linalg.norm(lower.T @ vec))


def rank_one_update(W: ArrayLike, x: ArrayLike) -> Matrix:
    """
    Return ``W + x x^T``.

    Args:
        W: d x d symmetric positive definite matrix
        x: Vector of dimension d

    Returns:
        Matrix: A new matrix; ``W`` is not modified

    Raises:
        UsageError: If dimensions do not match
    """
    vec = as_vector(x, 'x')
    mat = as_symmetric(W, 'W')
    _check_dims(vec, mat, 'x', 'W')
    return mat + np.outer(vec, vec)


def solve_pd(W: ArrayLike, b: ArrayLike, *, check: bool = True) -> Vector:
    """
    Solve ``W z = b`` for symmetric positive definite ``W``.

    Args:
        W: d x d symmetric positive definite matrix
        b: Right-hand side of dimension d
        check: Validate shape, finiteness and symmetry first. Hot loops that
            maintain ``W`` themselves pass ``False``.

    Returns:
        Vector: The solution ``z``

    Raises:
        UsageError: If dimensions do not match
        DomainError: If the factorization fails
    """
    if check:
        rhs = as_vector(b, 'b')
        mat = as_symmetric(W, 'W')
        _check_dims(rhs, mat, 'b', 'W')
    else:
        rhs = np.asarray(b, dtype=float)
        mat = np.asarray(W, dtype=float)
    try:
        factor = cho_factor(mat, lower=True, check_finite=check)
    except LinAlgError as exc:
        raise DomainError(f'W is not positive definite: {exc}') from exc
    return cho_solve(factor, rhs, check_finite=check)


def complete_orthonormal_basis(v: ArrayLike) -> Matrix:
    """
    Complete ``v`` to an orthonormal basis of R^d.

    Uses the Householder reflector ``H`` that maps ``e_1`` to ``v / ||v||``.
    ``H`` is symmetric and orthogonal, so its rows are the basis and the first
    row is ``v / ||v||``. The result is deterministic for a fixed ``v``.

    Args:
        v: Nonzero vector of dimension d

    Returns:
        Matrix: d x d matrix whose rows ``b_1..b_d`` are orthonormal,
            with ``b_1 = v / ||v||``

    Raises:
        DomainError: If ``v`` is the zero vector
    """
    vec = as_vector(v, 'v')
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise DomainError('Cannot complete a basis from the zero vector.')
    u = vec / norm
    d = u.shape[0]

    # w = u - e1, with the first component computed without cancellation
    w = u.copy()
    if u[0] > 0.0:
        w[0] = -np.dot(u[1:], u[1:]) / (1.0 + u[0])
    else:
        w[0] = u[0] - 1.0
    ww = np.dot(w, w)
    if ww == 0.0:
        return np.eye(d)
    basis = np.eye(d) - (2.0 / ww) * np.outer(w, w)
    # exact first row; the reflector reproduces it only to rounding
    basis[0] = u
    return basis
