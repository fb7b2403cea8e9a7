"""Recovering the weight matrix of a linear network from input/output pairs.

A linear network maps an input column ``g`` to ``weights @ g (+ bias)``. Given
K recorded pairs, stacked column-wise into an inputs matrix (N x K) and a
targets matrix (M x K), each row of the weight matrix solves the same linear
system ``inputs.T @ row = target_row``, so one solver choice is applied M
times and the results are stacked.
"""

from dataclasses import dataclass, field

import numpy as np

from . import iterative, pseudo, regularizers
from .exceptions import DimMismatch, LinnetError
from .linalg import svd
from .select import NoisyProblem
from .validation import as_matrix, as_vector


@dataclass(frozen=True)
class TrainingSet:
    """Recorded input/target pairs, one pair per column.

    Attributes
    ----------
    inputs : ndarray, shape (N, K)
    targets : ndarray, shape (M, K)
    """

    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "inputs", as_matrix(self.inputs, "inputs"))
        object.__setattr__(self, "targets", as_matrix(self.targets, "targets"))
        if self.inputs.shape[1] != self.targets.shape[1]:
            raise DimMismatch(
                f"inputs provide {self.inputs.shape[1]} pairs "
                f"but targets provide {self.targets.shape[1]}"
            )


@dataclass(frozen=True)
class SolveReport:
    """Per-output-row solver diagnostics."""

    x: np.ndarray = field(repr=False)
    method: str = "pseudo"
    residual_norm: float = 0.0
    solution_norm: float = 0.0
    alpha: float | None = None
    stop_index: int | None = None
    rank_used: int | None = None


@dataclass(frozen=True)
class WeightModel:
    """Trained network: weights, optional bias, and how they were obtained.

    Attributes
    ----------
    weights : ndarray, shape (M, N)
    bias : ndarray of shape (M,), or None
    method_tag : str
        Name of the solver that produced the weights.
    row_reports : list of SolveReport
        One report per output row, in row order.
    """

    weights: np.ndarray
    bias: np.ndarray | None
    method_tag: str
    row_reports: list = field(repr=False, default_factory=list)


@dataclass(frozen=True)
class Pseudo:
    """Minimum-norm least-squares fit."""


@dataclass(frozen=True)
class Tikhonov:
    alpha: float
    x0: np.ndarray | None = None


@dataclass(frozen=True)
class Lavrentiev:
    alpha: float
    x0: np.ndarray | None = None


@dataclass(frozen=True)
class Landweber:
    """Landweber iteration, optionally cut short by a stopping rule.

    ``rule`` of 1, 2 or 3 selects the stopping rule fed with the noise
    bounds; ``None`` just runs ``max_iter`` steps. The constants map onto
    the rules' parameters (rule 1 uses a1/a2, rule 2 uses a0/a1, rule 3 uses
    a/a1/a2).
    """

    max_iter: int = 500
    op_err: float = 0.0
    rhs_err: float = 0.0
    rule: int | None = None
    a: float = 2.0
    a0: float = 1.0
    a1: float = 2.0
    a2: float = 2.0
    x0: np.ndarray | None = None


@dataclass(frozen=True)
class Gd:
    config: iterative.GdConfig
    x0: np.ndarray | None = None


def assemble_system(ts: TrainingSet) -> tuple[np.ndarray, np.ndarray]:
    """Rewrite the pairs as a stacked linear system.

    Returns ``(a, f)`` with ``a = inputs.T`` of shape (K, N) and
    ``f = targets.T`` of shape (K, M); column ``m`` of ``f`` is the
    right-hand side for row ``m`` of the weight matrix.
    """
    return ts.inputs.T.copy(), ts.targets.T.copy()


def _solve_one(a: np.ndarray, f: np.ndarray, method) -> SolveReport:
    if isinstance(method, Pseudo):
        res = pseudo.pseudo_solution(a, f)
        return SolveReport(
            x=res.x, method="pseudo",
            residual_norm=res.residual_norm, solution_norm=res.solution_norm,
            rank_used=res.rank_used,
        )
    if isinstance(method, Tikhonov):
        res = regularizers.tikhonov(a, f, method.alpha, x0=method.x0)
        return SolveReport(
            x=res.x, method="tikhonov",
            residual_norm=res.residual_norm, solution_norm=res.solution_norm,
            alpha=res.alpha,
        )
    if isinstance(method, Lavrentiev):
        res = regularizers.lavrentiev(a, f, method.alpha, x0=method.x0)
        return SolveReport(
            x=res.x, method="lavrentiev",
            residual_norm=res.residual_norm, solution_norm=res.solution_norm,
            alpha=res.alpha,
        )
    if isinstance(method, Landweber):
        prob = NoisyProblem(a, f, op_err=method.op_err, rhs_err=method.rhs_err)
        trace = iterative.landweber(prob, x0=method.x0, max_iter=method.max_iter)
        if method.rule == 1:
            dec = iterative.stop_rule_1(trace, method.op_err, method.rhs_err,
                                        a1=method.a1, a2=method.a2)
        elif method.rule == 2:
            dec = iterative.stop_rule_2(trace, prob, a0=method.a0, a1=method.a1)
        elif method.rule == 3:
            dec = iterative.stop_rule_3(trace, prob, a=method.a,
                                        a1=method.a1, a2=method.a2)
        elif method.rule is None:
            dec = None
        else:
            raise ValueError(f"unknown stopping rule {method.rule!r}")
        idx = dec.stop_index if dec is not None else len(trace) - 1
        x = trace.iterates[idx]
        return SolveReport(
            x=x, method="landweber",
            residual_norm=float(np.linalg.norm(a @ x - f)),
            solution_norm=float(np.linalg.norm(x)),
            stop_index=idx,
        )
    if isinstance(method, Gd):
        trace = iterative.gd_train(a, f, method.config, x0=method.x0)
        x = trace.solution()
        idx = trace.best_index if trace.best_index is not None else len(trace) - 1
        return SolveReport(
            x=x, method="gd",
            residual_norm=float(np.linalg.norm(a @ x - f)),
            solution_norm=float(np.linalg.norm(x)),
            stop_index=idx,
        )
    raise TypeError(f"unknown training method {method!r}")


def train(ts: TrainingSet, method=Pseudo()) -> WeightModel:
    """Fit the weight matrix row by row with the chosen solver.

    Solver failures are re-raised unchanged except that the message is
    prefixed with the output row that caused them.
    """
    a, f = assemble_system(ts)
    rows = []
    reports = []
    for m in range(f.shape[1]):
        try:
            report = _solve_one(a, f[:, m], method)
        except LinnetError as exc:
            raise type(exc)(f"output row {m}: {exc}") from exc
        rows.append(report.x)
        reports.append(report)
    return WeightModel(
        weights=np.vstack(rows),
        bias=None,
        method_tag=reports[0].method,
        row_reports=reports,
    )


def train_with_bias(ts: TrainingSet, method=Pseudo()) -> WeightModel:
    """Fit weights and a bias by augmenting every input with a trailing 1.

    The augmented problem is solved exactly like :func:`train`; the last
    column of the augmented weight matrix comes back as the bias.
    """
    ones = np.ones((1, ts.inputs.shape[1]))
    augmented = TrainingSet(np.vstack([ts.inputs, ones]), ts.targets)
    model = train(augmented, method)
    return WeightModel(
        weights=model.weights[:, :-1],
        bias=model.weights[:, -1].copy(),
        method_tag=model.method_tag,
        row_reports=model.row_reports,
    )


def predict(model: WeightModel, sample) -> np.ndarray:
    """Map one input vector through the trained network."""
    g = as_vector(sample, "sample")
    n = model.weights.shape[1]
    if g.shape[0] != n:
        raise DimMismatch(f"sample has length {g.shape[0]}, expected {n}")
    out = model.weights @ g
    if model.bias is not None:
        out = out + model.bias
    return out


@dataclass(frozen=True)
class DiagnosisReport:
    """How well-posed the training problem is, before any fitting.

    Attributes
    ----------
    rank : int
        Numerical rank of the inputs matrix.
    singular_values : ndarray
        Its singular values, non-increasing.
    n_identifiable : int
        Directions the data determines at all (same count as ``rank``).
    n_stable : int
        Directions surviving the caller's noise floor.
    full_rank : bool
        Whether every weight direction is determined.
    condition : float
        Spread between the strongest and weakest determined direction
        (``inf`` when rank-deficient or zero).
    """

    rank: int
    singular_values: np.ndarray
    n_identifiable: int
    n_stable: int
    full_rank: bool
    condition: float


def diagnose(ts: TrainingSet, noise_floor: float = 0.0) -> DiagnosisReport:
    """Inspect the inputs matrix for rank deficiency and noise sensitivity."""
    if noise_floor < 0:
        raise ValueError("noise_floor must be non-negative")
    g = ts.inputs
    s = svd(g).s
    tol = max(g.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.count_nonzero(s > tol))
    n_stable = int(np.count_nonzero(s[:rank] > noise_floor))
    if rank == min(g.shape) and s[0] > 0.0:
        condition = float(s[0] / s[rank - 1])
    else:
        condition = float("inf")
    return DiagnosisReport(
        rank=rank,
        singular_values=s,
        n_identifiable=rank,
        n_stable=n_stable,
        full_rank=rank == min(g.shape),
        condition=condition,
    )
