"""scikit-learn estimator wrapper around the functional training core.

Samples follow the sklearn convention: ``X`` is (n_samples, n_features) and
``y`` is (n_samples,) or (n_samples, n_outputs). Internally that is exactly
the assembled system the row solvers consume, so the wrapper only reshapes,
validates, and forwards.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from . import network
from .exceptions import BadAlpha
from .iterative import EarlyStopping, GdConfig
from .validation import as_matrix


class LinearNetwork(BaseEstimator, RegressorMixin):
    """Linear model fitted by one of the regularized system solvers.

    Parameters
    ----------
    method : str
        One of ``"pseudo"``, ``"tikhonov"``, ``"lavrentiev"``,
        ``"landweber"``, ``"gd"``.
    alpha : float or None
        Regularization weight for tikhonov/lavrentiev.
    fit_bias : bool
        Learn an additive output bias alongside the weights.
    max_iter : int
        Step budget for the iterative methods.
    learning_rate : float or None
        Gradient step size for ``"gd"``; None picks a safe default.
    l1_alpha, l2_alpha : float
        Penalty weights for ``"gd"``.
    op_err, rhs_err : float
        Noise bounds consumed by Landweber stopping rules.
    stop_rule : int or None
        Landweber stopping rule (1, 2 or 3); None runs ``max_iter`` steps.
    patience : int or None
        Enables validation early stopping for ``"gd"`` when set, holding
        out ``validation_fraction`` of the samples.
    validation_fraction : float
        Tail fraction of samples held out when ``patience`` is set.

    Attributes
    ----------
    weights_ : ndarray, shape (n_outputs, n_features)
    bias_ : ndarray or None
    model_ : WeightModel
        Full training record, including per-row solver reports.
    """

    def __init__(self, method="pseudo", alpha=None, fit_bias=False,
                 max_iter=500, learning_rate=None, l1_alpha=0.0, l2_alpha=0.0,
                 op_err=0.0, rhs_err=0.0, stop_rule=None,
                 patience=None, validation_fraction=0.2):
        self.method = method
        self.alpha = alpha
        self.fit_bias = fit_bias
        self.max_iter = max_iter
        self.learning_rate = learning_rate
        self.l1_alpha = l1_alpha
        self.l2_alpha = l2_alpha
        self.op_err = op_err
        self.rhs_err = rhs_err
        self.stop_rule = stop_rule
        self.patience = patience
        self.validation_fraction = validation_fraction

    def _method_spec(self):
        if self.method == "pseudo":
            return network.Pseudo()
        if self.method == "tikhonov":
            if self.alpha is None:
                raise BadAlpha("method 'tikhonov' needs alpha")
            return network.Tikhonov(alpha=self.alpha)
        if self.method == "lavrentiev":
            if self.alpha is None:
                raise BadAlpha("method 'lavrentiev' needs alpha")
            return network.Lavrentiev(alpha=self.alpha)
        if self.method == "landweber":
            return network.Landweber(
                max_iter=self.max_iter, op_err=self.op_err,
                rhs_err=self.rhs_err, rule=self.stop_rule,
            )
        if self.method == "gd":
            stopping = None
            if self.patience is not None:
                stopping = EarlyStopping(
                    patience=self.patience,
                    validation_fraction=self.validation_fraction,
                )
            cfg = GdConfig(
                learning_rate=self.learning_rate, max_epochs=self.max_iter,
                l1_alpha=self.l1_alpha, l2_alpha=self.l2_alpha,
                early_stopping=stopping,
            )
            return network.Gd(config=cfg)
        raise ValueError(f"unknown method {self.method!r}")

    def fit(self, X, y):
        X = as_matrix(X, "X")
        y = np.asarray(y, dtype=float)
        self._y_is_1d = y.ndim == 1
        if self._y_is_1d:
            y = y.reshape(-1, 1)
        y = as_matrix(y, "y")
        ts = network.TrainingSet(inputs=X.T, targets=y.T)
        trainer = network.train_with_bias if self.fit_bias else network.train
        self.model_ = trainer(ts, self._method_spec())
        self.weights_ = self.model_.weights
        self.bias_ = self.model_.bias
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        X = as_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        out = X @ self.weights_.T
        if self.bias_ is not None:
            out = out + self.bias_
        return out[:, 0] if self._y_is_1d else out
