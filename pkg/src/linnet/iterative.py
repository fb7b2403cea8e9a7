"""Iterative solvers where the iteration count is the regularizer.

Landweber's fixed-point scheme and plain gradient descent both walk toward
the least-squares solution; on noisy data they first approach the true
answer and then drift off toward the contaminated one, so the whole game is
stopping at the right step. The stopping rules below trade off the recorded
step sizes and residuals against the caller's noise budget.

A trace records everything the rules need. When the operator norm exceeds 1
the Landweber system is rescaled to keep the iteration contractive; the
trace keeps the factor, and the rules rescale the noise bounds the same way
so every inequality is evaluated consistently in the scaled system.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateThreshold, DivergenceDetected, NeverTriggered
from .select import NoisyProblem
from .validation import as_matrix, as_start_vector, as_vector, check_system


@dataclass(frozen=True)
class IterationTrace:
    """Complete history of an iterative run.

    Attributes
    ----------
    iterates : ndarray, shape (n_steps + 1, N)
        Row ``n`` is the n-th iterate; row 0 is the start vector.
    residual_norms : ndarray, shape (n_steps + 1,)
        ``||a @ x_n - b||`` in the (possibly rescaled) system the iteration
        actually ran on.
    step_norms : ndarray, shape (n_steps + 1,)
        ``||x_n - x_{n-1}||``; entry 0 is ``inf`` (there is no step into the
        start vector), which keeps the arrays aligned.
    scale_factor : float
        Constant the system was multiplied by before iterating (1.0 when no
        rescaling happened).
    best_index : int or None
        Set by early stopping to the iterate it restored; ``None`` means the
        last iterate is the result.
    validation_residual_norms : ndarray or None
        Residuals on the held-out pair, one entry per early-stopping check.
    """

    iterates: np.ndarray
    residual_norms: np.ndarray
    step_norms: np.ndarray
    scale_factor: float = 1.0
    best_index: int | None = None
    validation_residual_norms: np.ndarray | None = None

    def solution(self) -> np.ndarray:
        """The iterate a caller should use: the restored one, else the last."""
        idx = self.best_index if self.best_index is not None else -1
        return self.iterates[idx]

    def __len__(self) -> int:
        return self.iterates.shape[0]


@dataclass(frozen=True)
class StopDecision:
    """Which rule fired, where, and why."""

    rule: int
    stop_index: int
    triggered_condition: str


def landweber(problem: NoisyProblem, x0=None, max_iter: int = 100) -> IterationTrace:
    """Run the fixed-point iteration ``x <- (I - a.T a) x + a.T b``.

    The scheme is contractive only for operator norm at most 1, so when
    ``||a|| > 1`` both sides of the system are multiplied by
    ``1 / ||a||`` first; the factor is recorded in the trace.

    Parameters
    ----------
    problem : NoisyProblem
        Measured system plus noise bounds (the bounds matter to the
        stopping rules, not to the iteration itself).
    x0 : array_like, optional
        Start vector, default zero.
    max_iter : int
        Number of steps to record.
    """
    if max_iter < 0:
        raise ValueError("max_iter must be non-negative")
    a, b = problem.a, problem.b
    x = as_start_vector(x0, a.shape[1])
    s0 = float(np.linalg.svd(a, compute_uv=False)[0])
    scale = 1.0 / s0 if s0 > 1.0 else 1.0
    a_s = scale * a
    b_s = scale * b
    step_mat = np.eye(a.shape[1]) - a_s.T @ a_s
    pull = a_s.T @ b_s

    iterates = [x]
    residuals = [float(np.linalg.norm(a_s @ x - b_s))]
    steps = [math.inf]
    for _ in range(max_iter):
        x_next = step_mat @ x + pull
        iterates.append(x_next)
        residuals.append(float(np.linalg.norm(a_s @ x_next - b_s)))
        steps.append(float(np.linalg.norm(x_next - x)))
        x = x_next
    return IterationTrace(
        iterates=np.vstack(iterates),
        residual_norms=np.array(residuals),
        step_norms=np.array(steps),
        scale_factor=scale,
    )


def _scaled_noise(trace: IterationTrace, op_err: float, rhs_err: float) -> tuple[float, float]:
    c = trace.scale_factor
    return c * op_err, c * rhs_err


def stop_rule_1(trace: IterationTrace, op_err: float, rhs_err: float,
                a1: float = 1.0, a2: float = 1.0) -> StopDecision:
    """Stop when the step size falls under the noise level.

    Fires at the first ``n >= 1`` with
    ``||x_n - x_{n-1}|| <= a1 * op_err + a2 * rhs_err`` (noise bounds
    rescaled like the system was).

    Raises
    ------
    NeverTriggered
        If no recorded step is that small.
    """
    if a1 <= 0 or a2 <= 0:
        raise ValueError("rule constants must be positive")
    h, d = _scaled_noise(trace, op_err, rhs_err)
    threshold = a1 * h + a2 * d
    hits = np.nonzero(trace.step_norms <= threshold)[0]
    if hits.size == 0:
        raise NeverTriggered(f"no step norm at or below {threshold:g}")
    return StopDecision(rule=1, stop_index=int(hits[0]), triggered_condition="step_norm")


def stop_rule_2(trace: IterationTrace, problem: NoisyProblem,
                a0: float, a1: float) -> StopDecision:
    """Stop when the residual falls under the noise level.

    Fires at the first ``n`` with
    ``||a x_n - b|| <= a0 * op_err + a1 * rhs_err``. The constant ``a0``
    must dominate the norm of the solution being recovered (that is the
    caller's promise) and ``a1`` must exceed 1.

    Raises
    ------
    NeverTriggered
        If no recorded residual is that small.
    """
    if a0 < 0:
        raise ValueError("a0 must be non-negative")
    if a1 <= 1.0:
        raise ValueError("a1 must exceed 1")
    h, d = _scaled_noise(trace, problem.op_err, problem.rhs_err)
    threshold = a0 * h + a1 * d
    hits = np.nonzero(trace.residual_norms <= threshold)[0]
    if hits.size == 0:
        raise NeverTriggered(f"no residual at or below {threshold:g}")
    return StopDecision(rule=2, stop_index=int(hits[0]), triggered_condition="residual")


def stop_rule_3(trace: IterationTrace, problem: NoisyProblem,
                a: float, a1: float = 2.0, a2: float = 2.0) -> StopDecision:
    """Residual rule with a hard ceiling on the iteration count.

    At step ``n`` the threshold is
    ``t_n = a1 * ||x_n|| * op_err + a2 * rhs_err``; the rule fires when the
    residual drops to ``t_n`` or when ``n >= a / t_n**2``, whichever comes
    first. With zero noise the threshold vanishes and only an exactly zero
    residual can fire it.

    Raises
    ------
    DegenerateThreshold
        If both noise bounds are zero and no residual reaches zero.
    NeverTriggered
        If neither branch fires along the trace.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if a1 <= 0 or a2 <= 0:
        raise ValueError("rule constants must be positive")
    h, d = _scaled_noise(trace, problem.op_err, problem.rhs_err)
    degenerate = h == 0.0 and d == 0.0
    for n in range(len(trace)):
        t_n = a1 * float(np.linalg.norm(trace.iterates[n])) * h + a2 * d
        if t_n == 0.0:
            if trace.residual_norms[n] == 0.0:
                return StopDecision(rule=3, stop_index=n, triggered_condition="residual")
            continue
        if trace.residual_norms[n] <= t_n:
            return StopDecision(rule=3, stop_index=n, triggered_condition="residual")
        if n >= a / t_n**2:
            return StopDecision(rule=3, stop_index=n, triggered_condition="iteration_count")
    if degenerate:
        raise DegenerateThreshold("zero noise bounds: threshold is identically zero")
    raise NeverTriggered("neither the residual nor the count branch fired")


@dataclass(frozen=True)
class EarlyStopping:
    """Validation-based stopping for gradient training.

    Exactly one data source must be given: ``validation_fraction`` carves
    the last ``ceil(fraction * K)`` rows off the training system, or
    ``validation`` supplies an explicit ``(a_val, b_val)`` pair.
    """

    patience: int = 1
    check_every: int = 1
    validation_fraction: float | None = None
    validation: tuple | None = None

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError("patience must be at least 1")
        if self.check_every < 1:
            raise ValueError("check_every must be at least 1")
        has_frac = self.validation_fraction is not None
        has_pair = self.validation is not None
        if has_frac == has_pair:
            raise ValueError("give exactly one of validation_fraction or validation")
        if has_frac and not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in (0, 1)")


@dataclass(frozen=True)
class GdConfig:
    """Hyper-parameters for :func:`gd_train`.

    ``learning_rate=None`` asks the trainer to pick the safe default
    ``1 / (2 * ||a||^2 + l2_alpha)``.
    """

    learning_rate: float | None = None
    max_epochs: int = 1000
    l1_alpha: float = 0.0
    l2_alpha: float = 0.0
    early_stopping: EarlyStopping | None = None

    def __post_init__(self):
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")
        if self.l1_alpha < 0 or self.l2_alpha < 0:
            raise ValueError("penalty weights must be non-negative")


def soft_threshold(x: np.ndarray, t: float) -> np.ndarray:
    """Shrink each entry toward zero by ``t``, clamping at zero."""
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def gd_train(a, b, config: GdConfig, x0=None) -> IterationTrace:
    """Proximal gradient descent on the penalized least-squares objective

    ``||a @ x - b||^2 + l1_alpha * ||x||_1 + (l2_alpha / 2) * ||x||^2``.

    Each epoch takes one full-gradient step on the smooth part,
    ``x - lr * (2 a.T (a x - b) + l2_alpha * x)``, then applies the
    soft-threshold operator with level ``lr * l1_alpha`` for the L1 part.

    With early stopping configured, training monitors the residual on the
    held-out pair every ``check_every`` epochs and, once ``patience``
    consecutive checks fail to improve, rewinds to the best checked iterate
    (recorded in ``trace.best_index``).

    Raises
    ------
    DivergenceDetected
        If the training residual grows a million-fold, which means the
        learning rate is far past the stable range.
    """
    a = as_matrix(a)
    b = as_vector(b)
    check_system(a, b)

    a_val = b_val = None
    es = config.early_stopping
    if es is not None:
        if es.validation is not None:
            a_val = as_matrix(es.validation[0], "a_val")
            b_val = as_vector(es.validation[1], "b_val")
            check_system(a_val, b_val)
            if a_val.shape[1] != a.shape[1]:
                raise ValueError("validation system has a different number of unknowns")
        else:
            k = a.shape[0]
            n_val = math.ceil(es.validation_fraction * k)
            if n_val >= k:
                raise ValueError("validation split leaves no training rows")
            a, a_val = a[: k - n_val], a[k - n_val:]
            b, b_val = b[: k - n_val], b[k - n_val:]

    x = as_start_vector(x0, a.shape[1])
    s0 = float(np.linalg.svd(a, compute_uv=False)[0])
    lr = config.learning_rate
    if lr is None:
        lr = 1.0 / (2.0 * s0**2 + config.l2_alpha)
    elif s0 > 0 and lr >= 1.0 / s0**2:
        warnings.warn(
            f"learning rate {lr:g} is at or above 1/||a||^2 = {1.0 / s0**2:g}; "
            "the iteration may diverge",
            RuntimeWarning,
            stacklevel=2,
        )

    r0 = float(np.linalg.norm(a @ x - b))
    blow_up = 1e6 * (r0 if r0 > 0 else float(np.linalg.norm(b)) + 1.0)

    iterates = [x]
    residuals = [r0]
    steps = [math.inf]
    val_curve = []
    best_val = math.inf
    best_epoch = 0
    stale = 0
    best_index = None

    for epoch in range(1, config.max_epochs + 1):
        grad = 2.0 * (a.T @ (a @ x - b)) + config.l2_alpha * x
        x_next = x - lr * grad
        if config.l1_alpha > 0.0:
            x_next = soft_threshold(x_next, lr * config.l1_alpha)
        r = float(np.linalg.norm(a @ x_next - b))
        iterates.append(x_next)
        residuals.append(r)
        steps.append(float(np.linalg.norm(x_next - x)))
        x = x_next
        if r > blow_up:
            raise DivergenceDetected(
                f"residual grew from {r0:g} to {r:g} at epoch {epoch}"
            )
        if es is not None and epoch % es.check_every == 0:
            vr = float(np.linalg.norm(a_val @ x - b_val))
            val_curve.append(vr)
            if vr < best_val:
                best_val = vr
                best_epoch = epoch
                stale = 0
            else:
                stale += 1
                if stale >= es.patience:
                    best_index = best_epoch
                    break

    return IterationTrace(
        iterates=np.vstack(iterates),
        residual_norms=np.array(residuals),
        step_norms=np.array(steps),
        scale_factor=1.0,
        best_index=best_index,
        validation_residual_norms=np.array(val_curve) if val_curve else None,
    )


def early_stop_monitor(train_residual_norms, validation_residual_norms, patience: int) -> int:
    """Replay an early-stopping decision over recorded residual curves.

    Walks the validation curve and returns the index of its first minimum
    once ``patience`` consecutive checks fail to improve on it; if that
    never happens the index of the first global minimum is returned. The
    training curve is only used to check the two records line up.
    """
    train = as_vector(train_residual_norms, "train_residual_norms")
    val = as_vector(validation_residual_norms, "validation_residual_norms")
    if train.shape[0] != val.shape[0]:
        raise ValueError("residual curves have different lengths")
    if patience < 1:
        raise ValueError("patience must be at least 1")
    best = math.inf
    best_i = 0
    stale = 0
    for i, v in enumerate(val):
        if v < best:
            best = float(v)
            best_i = i
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                return best_i
    return best_i
