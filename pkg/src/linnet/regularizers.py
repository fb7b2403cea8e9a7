"""One-shot regularized solvers for unstable linear systems.

Each solver trades a little bias (controlled by ``alpha``) for a solution
that no longer explodes when the system is near-singular. All of them reduce
to the plain least-squares answer as ``alpha -> 0`` and collapse onto the
anchor ``x0`` as ``alpha -> inf``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    BadAlpha,
    BadEpsilon,
    DimMismatch,
    NotPsd,
    NotSymmetric,
    SingularL,
    SingularShift,
)
from .linalg import numerical_rank, svd
from .validation import as_matrix, as_start_vector, as_vector, check_square, check_system


@dataclass(frozen=True)
class RegularizedSolution:
    """Solution of a regularized system plus the norms callers plot.

    Attributes
    ----------
    x : ndarray
        The regularized solution.
    alpha : float
        Parameter the solver was run at.
    residual_norm : float
        ``||a @ x - b||`` on the unregularized system.
    solution_norm : float
        ``||x||``.
    """

    x: np.ndarray
    alpha: float
    residual_norm: float
    solution_norm: float


def _solution(a: np.ndarray, b: np.ndarray, x: np.ndarray, alpha: float) -> RegularizedSolution:
    return RegularizedSolution(
        x=x,
        alpha=float(alpha),
        residual_norm=float(np.linalg.norm(a @ x - b)),
        solution_norm=float(np.linalg.norm(x)),
    )


def _check_alpha(alpha) -> float:
    if alpha is None:
        raise BadAlpha("alpha is required")
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0:
        raise BadAlpha(f"alpha must be positive and finite, got {alpha}")
    return alpha


def tikhonov(a, b, alpha, x0=None) -> RegularizedSolution:
    """Minimizer of ``||a @ x - b||^2 + alpha * ||x - x0||^2``.

    Computed through the spectral filter: along each singular direction the
    data coefficient is damped by ``s / (s^2 + alpha)`` and the anchor
    coefficient by ``alpha / (s^2 + alpha)``, so null-space components of
    ``x0`` pass through untouched.

    Parameters
    ----------
    a : array_like, shape (K, N)
    b : array_like, shape (K,)
    alpha : float
        Positive regularization weight.
    x0 : array_like, shape (N,), optional
        Anchor the solution is pulled toward; defaults to the origin.
    """
    a = as_matrix(a)
    b = as_vector(b)
    check_system(a, b)
    alpha = _check_alpha(alpha)
    x0 = as_start_vector(x0, a.shape[1])
    u, s, v = svd(a)
    r = s.shape[0]
    n = a.shape[1]
    # Data term lives in the first r right-singular directions only.
    coeffs = (s / (s**2 + alpha)) * (u.T[:r] @ b)
    x = v[:, :r] @ coeffs
    # Anchor filter: alpha/(s^2 + alpha) on the first r directions, 1 beyond.
    anchor = v.T @ x0
    filt = np.ones(n)
    filt[:r] = alpha / (s**2 + alpha)
    x = x + v @ (filt * anchor)
    return _solution(a, b, x, alpha)


def lavrentiev(a, b, alpha, x0=None) -> RegularizedSolution:
    """Solve ``(a + alpha * I) x = b + alpha * x0`` for symmetric PSD ``a``.

    A cheaper alternative to :func:`tikhonov` that skips forming the normal
    equations, usable only when ``a`` itself is symmetric positive
    semidefinite.

    Raises
    ------
    NotSymmetric
        If ``a`` deviates from its transpose by more than 1e-10 relative.
    NotPsd
        If the smallest eigenvalue is below ``-1e-10 * s[0]``.
    """
    a = as_matrix(a)
    b = as_vector(b)
    check_square(a)
    check_system(a, b)
    alpha = _check_alpha(alpha)
    x0 = as_start_vector(x0, a.shape[1])
    scale = float(np.abs(a).max())
    if scale == 0.0:
        # Zero matrix is trivially symmetric PSD; system reduces to alpha*x = b + alpha*x0.
        x = b / alpha + x0
        return _solution(a, b, x, alpha)
    asym = float(np.abs(a - a.T).max())
    if asym > 1e-10 * scale:
        raise NotSymmetric(f"matrix deviates from symmetry by {asym:.3e} (relative {asym / scale:.3e})")
    sym = 0.5 * (a + a.T)
    eigs = np.linalg.eigvalsh(sym)
    s0 = float(np.abs(eigs).max())
    if eigs[0] < -1e-10 * s0:
        raise NotPsd(f"smallest eigenvalue {eigs[0]:.3e} is below the PSD tolerance")
    x = np.linalg.solve(a + alpha * np.eye(a.shape[0]), b + alpha * x0)
    return _solution(a, b, x, alpha)


def tikhonov_general(a, b, alpha, stabilizer, x0=None) -> RegularizedSolution:
    """Tikhonov with a custom penalty seminorm: solve

    ``(a.T @ a + alpha * L.T @ L) x = a.T @ b + alpha * L.T @ L @ x0``

    where ``L`` (``stabilizer``) is a square invertible N x N weighting of
    the deviation from ``x0``. With ``L = I`` this is exactly
    :func:`tikhonov`.

    Raises
    ------
    SingularL
        If the stabilizer is numerically rank-deficient.
    """
    a = as_matrix(a)
    b = as_vector(b)
    check_system(a, b)
    alpha = _check_alpha(alpha)
    stab = as_matrix(stabilizer, "stabilizer")
    check_square(stab, "stabilizer")
    n = a.shape[1]
    if stab.shape[0] != n:
        raise DimMismatch(f"stabilizer is {stab.shape[0]}x{stab.shape[1]}, expected {n}x{n}")
    if numerical_rank(stab) < n:
        raise SingularL("stabilizer matrix is numerically singular")
    x0 = as_start_vector(x0, n)
    ltl = stab.T @ stab
    x = np.linalg.solve(a.T @ a + alpha * ltl, a.T @ b + alpha * (ltl @ x0))
    return _solution(a, b, x, alpha)


def shifted_solve(a, b, alpha, shift) -> RegularizedSolution:
    """Solve the shifted square system ``(a + alpha * shift) x = b``.

    The caller supplies the shift matrix; picking one that makes the sum
    invertible is the caller's problem. ``alpha`` may be negative but not
    zero.

    Raises
    ------
    SingularShift
        If ``a + alpha * shift`` is numerically singular.
    """
    a = as_matrix(a)
    b = as_vector(b)
    check_square(a)
    check_system(a, b)
    if alpha is None or not math.isfinite(float(alpha)) or float(alpha) == 0.0:
        raise BadAlpha(f"alpha must be non-zero and finite, got {alpha}")
    alpha = float(alpha)
    shift = as_matrix(shift, "shift")
    if shift.shape != a.shape:
        raise DimMismatch(f"shift has shape {shift.shape}, expected {a.shape}")
    m = a + alpha * shift
    if numerical_rank(m) < a.shape[0]:
        raise SingularShift("a + alpha * shift is numerically singular")
    x = np.linalg.solve(m, b)
    return _solution(a, b, x, alpha)


def apriori_alpha(epsilon: float, exact_system_solvable: bool = True) -> float:
    """Accuracy-driven choice of the regularization weight.

    Returns ``epsilon ** (2/3)`` when the underlying exact system is known to
    be solvable and ``epsilon ** (1/2)`` otherwise; both balance the bias and
    noise terms of the corresponding error bound.

    Parameters
    ----------
    epsilon : float
        Combined data/operator accuracy, in (0, 1].
    exact_system_solvable : bool
        Whether ``a @ x = b`` is consistent at the unperturbed data.
    """
    epsilon = float(epsilon)
    if not math.isfinite(epsilon) or not 0.0 < epsilon <= 1.0:
        raise BadEpsilon(f"epsilon must be in (0, 1], got {epsilon}")
    if exact_system_solvable:
        return epsilon ** (2.0 / 3.0)
    return math.sqrt(epsilon)


@dataclass(frozen=True)
class ErrorBoundModel:
    """Worst-case error budget for a regularized solution.

    The three constants weight the bias term (grows with alpha), the direct
    noise term, and the amplified noise term (shrinks with alpha); they
    default to 1 so the bounds can be used as shape functions.
    """

    epsilon: float
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0 and self.c3 > 0):
            raise ValueError("bound constants must be positive")
        if not self.epsilon > 0:
            raise BadEpsilon(f"epsilon must be positive, got {self.epsilon}")

    def solvable_bound(self, alpha: float) -> float:
        """Error bound when the exact system is solvable:

        ``c1*alpha + c2*eps + c3*eps/sqrt(alpha)``.
        """
        alpha = _check_alpha(alpha)
        e = self.epsilon
        return self.c1 * alpha + self.c2 * e + self.c3 * e / math.sqrt(alpha)

    def unsolvable_bound(self, alpha: float) -> float:
        """Error bound without solvability:

        ``c1*alpha + c2*eps/alpha + c3*eps/sqrt(alpha)``.
        """
        alpha = _check_alpha(alpha)
        e = self.epsilon
        return self.c1 * alpha + self.c2 * e / alpha + self.c3 * e / math.sqrt(alpha)
