"""Moore-Penrose pseudo-inverse and minimum-norm least-squares solutions.

For an inconsistent or rank-deficient system ``a @ x = b`` the useful notion
of "solution" is the residual minimizer, and among all residual minimizers
the one closest to a caller-supplied anchor (the anchor defaults to the
origin, which gives the classical minimum-norm solution).
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import svd
from .validation import as_matrix, as_start_vector, as_vector, check_system


@dataclass(frozen=True)
class PseudoSolveResult:
    """Least-squares solution together with its basic diagnostics.

    Attributes
    ----------
    x : ndarray, shape (N,)
        The computed solution.
    residual_norm : float
        ``||a @ x - b||``.
    solution_norm : float
        ``||x||``.
    rank_used : int
        Number of singular values kept by the truncation.
    """

    x: np.ndarray
    residual_norm: float
    solution_norm: float
    rank_used: int


@dataclass(frozen=True)
class CombinationReport:
    """Which combinations of unknowns the data actually determines.

    Each singular direction with a positive singular value pins down one
    linear combination of the unknowns, ``(v.T @ x)[j] = (u.T @ b)[j] / s[j]``.
    Directions whose singular value sits below the caller's noise floor are
    determined only nominally: their values are dominated by noise.

    Attributes
    ----------
    n_identifiable : int
        Count of singular values above the default rank threshold.
    n_stable : int
        Count of those also strictly above ``noise_floor``.
    singular_values : ndarray
        All singular values, non-increasing.
    values : ndarray, shape (n_identifiable,)
        The determined combination values, in singular-value order.
    """

    n_identifiable: int
    n_stable: int
    singular_values: np.ndarray
    values: np.ndarray = field(repr=False)


def pinv(a, rtol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via singular value truncation.

    Parameters
    ----------
    a : array_like, shape (K, N)
    rtol : float, optional
        Relative cutoff: singular values at or below ``rtol * s[0]`` are
        treated as zero. Defaults to ``max(K, N) * eps``, matching the
        numerical-rank threshold.

    Returns
    -------
    ndarray, shape (N, K)
    """
    a = as_matrix(a)
    if rtol is None:
        rtol = max(a.shape) * np.finfo(float).eps
    elif rtol < 0:
        raise ValueError("rtol must be non-negative")
    u, s, v = svd(a)
    cutoff = rtol * (s[0] if s.size else 0.0)
    keep = s > cutoff
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    r = s.shape[0]
    return (v[:, :r] * inv) @ u[:, :r].T


def pseudo_solution(a, b, x0=None, rtol: float | None = None) -> PseudoSolveResult:
    """Residual minimizer of ``a @ x = b`` closest to ``x0``.

    With the default ``x0 = 0`` this is the minimum-norm least-squares
    solution ``pinv(a) @ b``. A non-zero anchor adds the component of ``x0``
    lying in the null space of ``a``, which changes neither the residual nor
    the fit, only which minimizer is returned:

        ``x = pinv(a) @ b + (I - pinv(a) @ a) @ x0``

    Parameters
    ----------
    a : array_like, shape (K, N)
    b : array_like, shape (K,)
    x0 : array_like, shape (N,), optional
        Anchor vector the solution should stay close to.
    rtol : float, optional
        Truncation cutoff forwarded to :func:`pinv`.
    """
    a = as_matrix(a)
    b = as_vector(b)
    check_system(a, b)
    x0 = as_start_vector(x0, a.shape[1])
    if rtol is None:
        rtol = max(a.shape) * np.finfo(float).eps
    elif rtol < 0:
        raise ValueError("rtol must be non-negative")
    u, s, v = svd(a)
    cutoff = rtol * (s[0] if s.size else 0.0)
    keep = s > cutoff
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    r = s.shape[0]
    ai = (v[:, :r] * inv) @ u[:, :r].T
    x = ai @ b
    if np.any(x0):
        x = x + x0 - ai @ (a @ x0)
    rank_used = int(np.count_nonzero(keep))
    return PseudoSolveResult(
        x=x,
        residual_norm=float(np.linalg.norm(a @ x - b)),
        solution_norm=float(np.linalg.norm(x)),
        rank_used=rank_used,
    )


def normal_equations(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the square system ``(a.T @ a) x = a.T @ b``.

    Shares its solution set with the least-squares problem for ``a @ x = b``;
    mostly useful for cross-checking solvers against each other.
    """
    a = as_matrix(a)
    b = as_vector(b)
    check_system(a, b)
    return a.T @ a, a.T @ b


def identifiable_combinations(a, b, noise_floor: float = 0.0) -> CombinationReport:
    """Report which singular directions of ``a`` the data determines.

    Parameters
    ----------
    a : array_like, shape (K, N)
    b : array_like, shape (K,)
    noise_floor : float
        Non-negative level below which a singular value is considered
        drowned by measurement noise.
    """
    a = as_matrix(a)
    b = as_vector(b)
    check_system(a, b)
    if noise_floor < 0:
        raise ValueError("noise_floor must be non-negative")
    u, s, v = svd(a)
    tol = max(a.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    n_ident = int(np.count_nonzero(s > tol))
    n_stable = int(np.count_nonzero(s[:n_ident] > noise_floor))
    coeffs = u.T[:n_ident] @ b
    values = coeffs / s[:n_ident]
    return CombinationReport(
        n_identifiable=n_ident,
        n_stable=n_stable,
        singular_values=s,
        values=values,
    )
