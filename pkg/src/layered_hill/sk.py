"""Scikit-learn style front end.

LayeredHillEstimator is a fit-shaped estimator: ``fit(X)`` consumes an
(n_samples, d) array, enumerates the constrained tuple order statistics,
and exposes the tail-exponent estimate and its confidence interval as
fitted attributes.  Parameters follow sklearn conventions (stored
verbatim in ``__init__``, resolved in ``fit``), so the estimator composes
with ``get_params``/``set_params``, cloning, and pipelines.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .constraints import ALWAYS_ONE, CONNECTIVITY, PAIR_DISTANCE, Constraint
from .estimation import estimate_from_stream
from .geometry import PointCloud
from .order_stats import top_tuple_values

_DEFAULT_KINDS = {1: ALWAYS_ONE, 2: PAIR_DISTANCE}


class LayeredHillEstimator(BaseEstimator):
    """Tail-exponent estimation from the k-th layer of clustered extremes.

    Parameters
    ----------
    k : int
        Layer order (tuple arity).  k = 1 is the traditional Hill
        estimator on norms; k = 2 uses pairs within ``radius``.
    kind : str or None
        Constraint kind; None picks always_one for k = 1, pair_distance
        for k = 2, and connectivity for k >= 3.
    radius : float
        Connectivity radius of the geometric constraint.
    m : int or None
        Cut-off; the estimator uses the top m^k tuple values.  When None,
        m = round(n ** beta).
    beta : float
        Cut-off exponent used when ``m`` is None.
    gamma : float
        Confidence level of the reported interval.

    Attributes
    ----------
    alpha_ : float
        Estimated tail exponent.
    H_ : float
        Layered Hill value.
    ci_ : tuple of (float, float) or None
        Level-``gamma`` confidence interval for the exponent.
    regime_ : str
        Heuristic regime tag used for normalization.
    report_ : EstimateReport
        Full structured result.
    """

    def __init__(self, k=1, kind=None, radius=1.0, m=None, beta=0.5, gamma=0.95):
        self.k = k
        self.kind = kind
        self.radius = radius
        self.m = m
        self.beta = beta
        self.gamma = gamma

    def _constraint(self):
        kind = self.kind
        if kind is None:
            kind = _DEFAULT_KINDS.get(self.k, CONNECTIVITY)
        return Constraint(kind=kind, arity=self.k, radius=self.radius)

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        cloud = PointCloud(X)
        n = len(cloud)
        m = self.m if self.m is not None else max(2, int(math.floor(n**self.beta + 0.5)))
        constraint = self._constraint()
        stream = top_tuple_values(cloud, constraint, m**self.k)
        report = estimate_from_stream(
            stream, self.k, cloud.dim, n, m, gamma=self.gamma
        )
        self.n_features_in_ = cloud.dim
        self.m_ = m
        self.report_ = report
        self.H_ = report.H
        self.alpha_ = report.alpha
        self.ci_ = report.ci
        self.regime_ = report.regime.tag
        return self

    def score(self, X=None, y=None):
        """Negative interval half-width; larger is a tighter fit."""
        check_is_fitted(self, "alpha_")
        if self.ci_ is None:
            return -np.inf
        return -(self.ci_[1] - self.ci_[0]) / 2.0
