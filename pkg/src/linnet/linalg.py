"""Singular value decomposition and the rank/conditioning quantities built on it.

Everything downstream (pseudo-inverses, spectral filtering, stopping rules)
is phrased in terms of the full decomposition a = u @ diag(s) @ v.T, so this
module pins down one set of conventions:

* ``u`` is square K x K and ``v`` is square N x N, both orthogonal;
* ``s`` has length min(K, N), is non-negative and non-increasing;
* rank decisions use the absolute threshold ``max(K, N) * eps * s[0]``
  unless the caller supplies one.
"""

from typing import NamedTuple

import numpy as np

from .exceptions import ZeroMatrix
from .validation import as_matrix


class Svd(NamedTuple):
    """Full singular value decomposition ``a = u @ diag(s) @ v.T``.

    Attributes
    ----------
    u : ndarray, shape (K, K)
        Orthogonal matrix of left singular vectors (columns).
    s : ndarray, shape (min(K, N),)
        Singular values, non-negative and sorted non-increasing.
    v : ndarray, shape (N, N)
        Orthogonal matrix of right singular vectors (columns).
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Multiply the factors back into the original K x N matrix."""
        r = self.s.shape[0]
        return (self.u[:, :r] * self.s) @ self.v[:, :r].T


def svd(a) -> Svd:
    """Full SVD of a real matrix.

    Parameters
    ----------
    a : array_like, shape (K, N)
        Matrix with finite entries.

    Returns
    -------
    Svd
        Named tuple ``(u, s, v)`` with square orthogonal ``u`` and ``v``;
        note ``v`` is returned as a matrix of column vectors, not its
        transpose.
    """
    a = as_matrix(a)
    u, s, vt = np.linalg.svd(a, full_matrices=True)
    return Svd(u=u, s=s, v=vt.T)


def spectral_norm(a) -> float:
    """Largest singular value; 0.0 for an all-zero matrix."""
    return float(svd(a).s[0])


def default_rank_tol(a) -> float:
    """Absolute singular-value threshold ``max(K, N) * eps * s[0]``."""
    a = as_matrix(a)
    s0 = float(np.linalg.svd(a, compute_uv=False)[0])
    return max(a.shape) * np.finfo(float).eps * s0


def numerical_rank(a, tol: float | None = None) -> int:
    """Number of singular values strictly above ``tol``.

    Parameters
    ----------
    a : array_like, shape (K, N)
    tol : float, optional
        Absolute threshold; defaults to ``max(K, N) * eps * s[0]``.
    """
    a = as_matrix(a)
    s = np.linalg.svd(a, compute_uv=False)
    if tol is None:
        tol = max(a.shape) * np.finfo(float).eps * float(s[0])
    elif tol < 0:
        raise ValueError("tol must be non-negative")
    return int(np.count_nonzero(s > tol))


def condition_number(a) -> float:
    """Ratio of the largest singular value to the smallest one counted in the rank.

    Returns ``inf`` when the numerical rank is below min(K, N).

    Raises
    ------
    ZeroMatrix
        If every entry of ``a`` is zero: conditioning is undefined.
    """
    a = as_matrix(a)
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        raise ZeroMatrix("condition number of the zero matrix is undefined")
    r = numerical_rank(a)
    if r < min(a.shape):
        return float("inf")
    return float(s[0] / s[r - 1])
