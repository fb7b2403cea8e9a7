"""Noise-sweep experiments: perturb a base system, solve, tabulate errors.

The driving JSON document gives a base system, a strictly decreasing list of
noise levels, how the noise enters (one operator entry, the data vector, or
both), the solver configurations to compare, and a seed. Output is one CSV
row per (noise level, method), deterministic for a fixed spec and seed: the
noise for level ``i`` is drawn from a generator seeded ``seed + i``, so all
methods at one level see identical data regardless of evaluation order.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import LinnetError, ParseError
from .iterative import GdConfig, gd_train, landweber, stop_rule_1, stop_rule_2, stop_rule_3
from .pseudo import pseudo_solution
from .regularizers import apriori_alpha, lavrentiev, tikhonov
from .select import NoisyProblem
from .validation import as_matrix, as_vector

HEADER = "epsilon,method,alpha_or_n,residual,error_to_reference,solution_norm"

_ALPHA_RULES = {
    "eps^(2/3)": lambda eps: apriori_alpha(eps, exact_system_solvable=True),
    "eps^(1/2)": lambda eps: apriori_alpha(eps, exact_system_solvable=False),
}


@dataclass(frozen=True)
class Perturbation:
    """Where the noise of size epsilon enters the base system."""

    mode: str  # "operator_entry" | "data_vector" | "both"
    row: int | None = None  # 1-based, operator modes only
    col: int | None = None


@dataclass(frozen=True)
class ExperimentSpec:
    a: np.ndarray
    b: np.ndarray
    epsilons: list
    perturbation: Perturbation
    methods: list
    seed: int = 0
    reference: np.ndarray | None = None


@dataclass
class RowResult:
    epsilon: float
    method: str
    failed: bool = False
    error_name: str = ""
    error_message: str = ""
    alpha_or_n: str = ""
    residual: float = math.nan
    error_to_reference: float | None = None
    solution_norm: float = math.nan

    def to_csv(self) -> str:
        eps = repr(self.epsilon)
        if self.failed:
            return f"{eps},{self.method},FAILED,,,"
        err = "" if self.error_to_reference is None else repr(self.error_to_reference)
        return (
            f"{eps},{self.method},{self.alpha_or_n},"
            f"{repr(self.residual)},{err},{repr(self.solution_norm)}"
        )


def load_spec(doc: dict, source: str = "<dict>") -> ExperimentSpec:
    """Validate a JSON-decoded experiment document."""
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: experiment spec must be a JSON object")

    def fail(msg):
        raise ParseError(f"{source}: {msg}")

    try:
        if "a" in doc and "f" in doc:
            a = as_matrix(doc["a"], "a")
            b = as_vector(doc["f"], "f")
        elif "inputs" in doc and "targets" in doc:
            inputs = as_matrix(doc["inputs"], "inputs")
            targets = as_matrix(doc["targets"], "targets")
            if targets.shape[0] != 1:
                fail("matrix-form base system needs a single target row")
            a = inputs.T.copy()
            b = targets.reshape(-1)
        else:
            fail("base system missing: give 'a'+'f' or 'inputs'+'targets'")
        if b.shape[0] != a.shape[0]:
            fail(f"'f' has length {b.shape[0]}, expected {a.shape[0]}")
    except (ValueError, TypeError) as exc:
        fail(str(exc))

    eps = doc.get("epsilons")
    if not isinstance(eps, list) or not eps:
        fail("'epsilons' must be a non-empty list")
    try:
        eps = [float(e) for e in eps]
    except (TypeError, ValueError):
        fail("'epsilons' must hold numbers")
    if any(e <= 0 or not math.isfinite(e) for e in eps):
        fail("'epsilons' must be positive and finite")
    if any(eps[i + 1] >= eps[i] for i in range(len(eps) - 1)):
        fail("'epsilons' must be strictly decreasing")

    pert = doc.get("perturbation")
    if not isinstance(pert, dict) or pert.get("mode") not in ("operator_entry", "data_vector", "both"):
        fail("'perturbation.mode' must be operator_entry, data_vector or both")
    row = col = None
    if pert["mode"] in ("operator_entry", "both"):
        row, col = pert.get("row"), pert.get("col")
        if not (isinstance(row, int) and isinstance(col, int)):
            fail("operator perturbation needs integer 'row' and 'col' (1-based)")
        if not (1 <= row <= a.shape[0] and 1 <= col <= a.shape[1]):
            fail(f"perturbation entry ({row},{col}) is outside the {a.shape[0]}x{a.shape[1]} operator")

    methods = doc.get("methods")
    if not isinstance(methods, list) or not methods:
        fail("'methods' must be a non-empty list")
    for m in methods:
        if not isinstance(m, dict) or "method" not in m:
            fail("each method entry must be an object with a 'method' key")
        if m["method"] not in ("pseudo", "tikhonov", "lavrentiev", "landweber", "gd"):
            fail(f"unknown method {m['method']!r}")
        if m["method"] in ("tikhonov", "lavrentiev"):
            alpha = m.get("alpha")
            if isinstance(alpha, str) and alpha not in _ALPHA_RULES:
                fail(f"unknown alpha rule {alpha!r}; use a number, 'eps^(2/3)' or 'eps^(1/2)'")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        fail("'seed' must be an integer")

    reference = None
    if doc.get("reference") is not None:
        try:
            reference = as_vector(doc["reference"], "reference")
        except (ValueError, TypeError) as exc:
            fail(str(exc))
        if reference.shape[0] != a.shape[1]:
            fail(f"'reference' has length {reference.shape[0]}, expected {a.shape[1]}")

    return ExperimentSpec(
        a=a, b=b, epsilons=eps,
        perturbation=Perturbation(pert["mode"], row, col),
        methods=methods, seed=seed, reference=reference,
    )


def _perturbed_system(spec: ExperimentSpec, index: int) -> tuple[np.ndarray, np.ndarray]:
    eps = spec.epsilons[index]
    a = spec.a.copy()
    b = spec.b.copy()
    mode = spec.perturbation.mode
    if mode in ("operator_entry", "both"):
        a[spec.perturbation.row - 1, spec.perturbation.col - 1] += eps
    if mode in ("data_vector", "both"):
        rng = np.random.default_rng(spec.seed + index)
        direction = rng.standard_normal(b.shape[0])
        direction /= np.linalg.norm(direction)
        b = b + eps * direction
    return a, b


def _resolve_alpha(m: dict, eps: float) -> float:
    alpha = m.get("alpha")
    if isinstance(alpha, str):
        return _ALPHA_RULES[alpha](eps)
    if alpha is None:
        raise LinnetError(f"method {m['method']!r} needs 'alpha'")
    return float(alpha)


def _noise_bounds(m: dict, spec: ExperimentSpec, eps: float) -> tuple[float, float]:
    mode = spec.perturbation.mode
    op_err = m.get("h", eps if mode in ("operator_entry", "both") else 0.0)
    rhs_err = m.get("delta", eps if mode in ("data_vector", "both") else 0.0)
    return float(op_err), float(rhs_err)


def _apply_method(a, b, m: dict, spec: ExperimentSpec, eps: float):
    """Returns (solution, alpha_or_n string)."""
    name = m["method"]
    if name == "pseudo":
        return pseudo_solution(a, b).x, ""
    if name == "tikhonov":
        alpha = _resolve_alpha(m, eps)
        return tikhonov(a, b, alpha).x, repr(alpha)
    if name == "lavrentiev":
        alpha = _resolve_alpha(m, eps)
        return lavrentiev(a, b, alpha).x, repr(alpha)
    if name == "landweber":
        op_err, rhs_err = _noise_bounds(m, spec, eps)
        problem = NoisyProblem(a, b, op_err=op_err, rhs_err=rhs_err)
        trace = landweber(problem, max_iter=int(m.get("max_iter", 500)))
        rule = m.get("rule")
        if rule == 1:
            dec = stop_rule_1(trace, op_err, rhs_err,
                              a1=float(m.get("a1", 1.0)), a2=float(m.get("a2", 1.0)))
        elif rule == 2:
            dec = stop_rule_2(trace, problem,
                              a0=float(m.get("a0", 1.0)), a1=float(m.get("a1", 2.0)))
        elif rule == 3:
            dec = stop_rule_3(trace, problem, a=float(m.get("a", 2.0)),
                              a1=float(m.get("a1", 2.0)), a2=float(m.get("a2", 2.0)))
        elif rule is None:
            dec = None
        else:
            raise ParseError(f"unknown stopping rule {rule!r}")
        idx = dec.stop_index if dec is not None else len(trace) - 1
        return trace.iterates[idx], str(idx)
    if name == "gd":
        cfg = GdConfig(
            learning_rate=m.get("learning_rate"),
            max_epochs=int(m.get("max_epochs", 1000)),
            l1_alpha=float(m.get("l1_alpha", 0.0)),
            l2_alpha=float(m.get("l2_alpha", 0.0)),
        )
        trace = gd_train(a, b, cfg)
        return trace.solution(), str(len(trace) - 1)
    raise ParseError(f"unknown method {name!r}")


def run_experiment(spec: ExperimentSpec) -> list:
    """Run the full sweep; returns RowResult objects in output order."""
    results = []
    for i, eps in enumerate(spec.epsilons):
        a, b = _perturbed_system(spec, i)
        for m in spec.methods:
            row = RowResult(epsilon=eps, method=m["method"])
            try:
                x, alpha_or_n = _apply_method(a, b, m, spec, eps)
            except LinnetError as exc:
                row.failed = True
                row.error_name = type(exc).__name__
                row.error_message = str(exc)
            else:
                row.alpha_or_n = alpha_or_n
                row.residual = float(np.linalg.norm(a @ x - b))
                row.solution_norm = float(np.linalg.norm(x))
                if spec.reference is not None:
                    row.error_to_reference = float(np.linalg.norm(x - spec.reference))
            results.append(row)
    return results
