"""Weight recovery for linear networks via regularized least-squares solvers."""

from . import exceptions
from .estimators import LinearNetwork
from .iterative import (
    EarlyStopping,
    GdConfig,
    IterationTrace,
    StopDecision,
    early_stop_monitor,
    gd_train,
    landweber,
    soft_threshold,
    stop_rule_1,
    stop_rule_2,
    stop_rule_3,
)
from .linalg import Svd, condition_number, default_rank_tol, numerical_rank, spectral_norm, svd
from .network import (
    DiagnosisReport,
    Gd,
    Landweber,
    Lavrentiev,
    Pseudo,
    SolveReport,
    Tikhonov,
    TrainingSet,
    WeightModel,
    assemble_system,
    diagnose,
    predict,
    train,
    train_with_bias,
)
from .pseudo import (
    CombinationReport,
    PseudoSolveResult,
    identifiable_combinations,
    normal_equations,
    pinv,
    pseudo_solution,
)
from .regularizers import (
    ErrorBoundModel,
    RegularizedSolution,
    apriori_alpha,
    lavrentiev,
    shifted_solve,
    tikhonov,
    tikhonov_general,
)
from .select import (
    AlphaSearchResult,
    NoisyProblem,
    apriori_alpha_rule,
    discrepancy_alpha,
    generalized_discrepancy_alpha,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaSearchResult",
    "CombinationReport",
    "DiagnosisReport",
    "EarlyStopping",
    "ErrorBoundModel",
    "Gd",
    "GdConfig",
    "IterationTrace",
    "Landweber",
    "Lavrentiev",
    "LinearNetwork",
    "NoisyProblem",
    "Pseudo",
    "PseudoSolveResult",
    "RegularizedSolution",
    "SolveReport",
    "StopDecision",
    "Svd",
    "Tikhonov",
    "TrainingSet",
    "WeightModel",
    "apriori_alpha",
    "apriori_alpha_rule",
    "assemble_system",
    "condition_number",
    "default_rank_tol",
    "diagnose",
    "discrepancy_alpha",
    "early_stop_monitor",
    "exceptions",
    "gd_train",
    "generalized_discrepancy_alpha",
    "identifiable_combinations",
    "landweber",
    "lavrentiev",
    "normal_equations",
    "numerical_rank",
    "pinv",
    "predict",
    "pseudo_solution",
    "shifted_solve",
    "soft_threshold",
    "spectral_norm",
    "stop_rule_1",
    "stop_rule_2",
    "stop_rule_3",
    "svd",
    "tikhonov",
    "tikhonov_general",
    "train",
    "train_with_bias",
]
