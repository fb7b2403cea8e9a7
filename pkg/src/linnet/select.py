"""Choosing the regularization weight from what is known about the noise.

The a-posteriori rules pick ``alpha`` so the residual of the regularized
solution matches the noise level (discrepancy principle); the a-priori rule
just raises the combined noise to a power. Root finding runs on
``log10(alpha)`` over [-16, 16] by bisection, which is immune to the many
orders of magnitude a usable ``alpha`` can span.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    BadExponent,
    DeltaTooLarge,
    DeltaTooSmall,
    NoConvergence,
    NoSignChange,
    ZeroNoise,
)
from .pseudo import pseudo_solution
from .regularizers import tikhonov
from .validation import as_matrix, as_vector, check_system

_LOG_LO = -16.0
_LOG_HI = 16.0
_MAX_STEPS = 200


@dataclass(frozen=True)
class NoisyProblem:
    """A measured linear system together with its noise budget.

    Attributes
    ----------
    a : ndarray, shape (K, N)
        Measured operator.
    b : ndarray, shape (K,)
        Measured right-hand side.
    op_err : float
        Known bound on the spectral-norm error of ``a``.
    rhs_err : float
        Known bound on the euclidean error of ``b``.
    """

    a: np.ndarray
    b: np.ndarray
    op_err: float = 0.0
    rhs_err: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", as_matrix(self.a))
        object.__setattr__(self, "b", as_vector(self.b))
        check_system(self.a, self.b)
        for name in ("op_err", "rhs_err"):
            level = float(getattr(self, name))
            if math.isnan(level) or level < 0:
                raise ValueError(f"{name} must be non-negative, got {level}")
            object.__setattr__(self, name, level)


@dataclass(frozen=True)
class AlphaSearchResult:
    """Outcome of a discrepancy-equation root search.

    Attributes
    ----------
    alpha : float
        The accepted parameter.
    gap : float
        Signed residual mismatch at ``alpha`` (how far the discrepancy
        equation is from balance).
    iterations : int
        Bisection evaluations performed.
    trail : list of (alpha, gap)
        Every point the search evaluated, in visit order.
    """

    alpha: float
    gap: float
    iterations: int
    trail: list = field(repr=False, default_factory=list)


def _bisect(gap_fn, tol: float) -> AlphaSearchResult:
    lo, hi = _LOG_LO, _LOG_HI
    g_lo = gap_fn(10.0**lo)
    g_hi = gap_fn(10.0**hi)
    trail = [(10.0**lo, g_lo), (10.0**hi, g_hi)]
    if abs(g_lo) <= tol:
        return AlphaSearchResult(10.0**lo, g_lo, 2, trail)
    if abs(g_hi) <= tol:
        return AlphaSearchResult(10.0**hi, g_hi, 2, trail)
    if not (g_lo < 0.0 < g_hi):
        raise NoSignChange(
            f"discrepancy gap does not change sign on [1e{int(_LOG_LO)}, 1e{int(_LOG_HI)}]"
        )
    iterations = 2
    for _ in range(_MAX_STEPS):
        mid = 0.5 * (lo + hi)
        alpha = 10.0**mid
        g = gap_fn(alpha)
        iterations += 1
        trail.append((alpha, g))
        if abs(g) <= tol:
            return AlphaSearchResult(alpha, g, iterations, trail)
        if g < 0.0:
            lo = mid
        else:
            hi = mid
    raise NoConvergence(f"no root after {_MAX_STEPS} bisection steps")


def discrepancy_alpha(a, b, rhs_err: float, tol: float | None = None) -> AlphaSearchResult:
    """Pick ``alpha`` so the regularized residual equals the data noise.

    Solves ``||a @ x_alpha - b|| = rhs_err`` for the Tikhonov family
    ``x_alpha = tikhonov(a, b, alpha)``; the residual grows monotonically
    with ``alpha``, so the root is unique when it exists.

    Parameters
    ----------
    a, b : array_like
        The measured system.
    rhs_err : float
        Noise level the residual should match. Must exceed the smallest
        attainable residual and stay below ``||b||``.
    tol : float, optional
        Acceptable residual mismatch; defaults to ``1e-10 * ||b||``.

    Raises
    ------
    DeltaTooSmall
        If no regularized solution can have a residual this small.
    DeltaTooLarge
        If even the zero solution beats this residual.
    NoConvergence
        If bisection exhausts its step budget.
    """
    a = as_matrix(a)
    b = as_vector(b)
    check_system(a, b)
    rhs_err = float(rhs_err)
    norm_b = float(np.linalg.norm(b))
    if tol is None:
        tol = 1e-10 * norm_b
    r_min = pseudo_solution(a, b).residual_norm
    if rhs_err <= r_min + tol:
        raise DeltaTooSmall(
            f"target residual {rhs_err:g} is not above the attainable minimum {r_min:g}"
        )
    if rhs_err >= norm_b:
        raise DeltaTooLarge(f"target residual {rhs_err:g} is not below ||b|| = {norm_b:g}")

    def gap(alpha: float) -> float:
        return tikhonov(a, b, alpha).residual_norm - rhs_err

    return _bisect(gap, tol)


def generalized_discrepancy_alpha(problem: NoisyProblem, tol: float | None = None) -> AlphaSearchResult:
    """Discrepancy principle that also charges for operator error.

    Finds ``alpha`` with ``||a @ x_alpha - b|| = op_err * ||x_alpha|| + rhs_err``.
    The left side grows and the right side shrinks as ``alpha`` grows, so
    bisection on the difference is safe once it changes sign on the bracket.

    Raises
    ------
    NoSignChange
        If the balance equation has no root in the alpha bracket.
    NoConvergence
        If bisection exhausts its step budget.
    """
    a, b = problem.a, problem.b
    if tol is None:
        tol = 1e-10 * float(np.linalg.norm(b))

    def gap(alpha: float) -> float:
        sol = tikhonov(a, b, alpha)
        return sol.residual_norm - problem.op_err * sol.solution_norm - problem.rhs_err

    return _bisect(gap, tol)


def apriori_alpha_rule(problem: NoisyProblem, exponent: float) -> float:
    """Noise-power rule ``alpha = (op_err + rhs_err) ** (1 / exponent)``.

    Any ``exponent > 1`` gives a parameter that shrinks more slowly than the
    noise itself, which is what the convergence analysis needs.

    Raises
    ------
    BadExponent
        If ``exponent <= 1``.
    ZeroNoise
        If both noise bounds are zero.
    """
    exponent = float(exponent)
    if not math.isfinite(exponent) or exponent <= 1.0:
        raise BadExponent(f"exponent must exceed 1, got {exponent}")
    total = problem.op_err + problem.rhs_err
    if total == 0.0:
        raise ZeroNoise("both noise bounds are zero; no scale to build alpha from")
    return total ** (1.0 / exponent)
