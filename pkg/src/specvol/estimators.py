"""scikit-learn compatible wrappers around the numerical core.

These let the per-day measures drop into ``sklearn.pipeline`` objects::

    make_pipeline(DFTAmplitude()).fit_transform(log_price_matrix)

and expose the period aggregation and the cross-sectional test as
estimators with fitted ``*_`` attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from .event_study import ERROR_BAR_MULTIPLIER, frequency_profile
from .exceptions import DegenerateError, UndefinedAggregateError
from .spectral import dft_coefficients, n_frequencies
from .volatility import realized_variance


class DFTAmplitude(TransformerMixin, BaseEstimator):
    """Map log-price vectors (one per row) to their amplitude spectra.

    Parameters
    ----------
    return_coefficients : bool, default=False
        If True, ``transform`` returns ``[a | b]`` stacked column-wise
        instead of the amplitudes.
    """

    def __init__(self, return_coefficients=False):
        self.return_coefficients = return_coefficients

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        # fewer than 3 points leaves no frequency below Nyquist: zero columns
        self.n_frequencies_ = n_frequencies(X.shape[1])
        return self

    def transform(self, X):
        check_is_fitted(self, "n_frequencies_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        coeffs = dft_coefficients(X)
        if self.return_coefficients:
            return np.hstack([coeffs.a, coeffs.b])
        return np.hypot(coeffs.a, coeffs.b)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_frequencies_")
        w = range(1, self.n_frequencies_ + 1)
        if self.return_coefficients:
            return np.array([f"a{i}" for i in w] + [f"b{i}" for i in w], dtype=object)
        return np.array([f"c{i}" for i in w], dtype=object)


class RealizedVariance(TransformerMixin, BaseEstimator):
    """Sum of squared returns per row; output has a single column."""

    def fit(self, X, y=None):
        validate_data(self, X, dtype=np.float64)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return realized_variance(X)[:, None]

    def get_feature_names_out(self, input_features=None):
        return np.array(["sigma2"], dtype=object)


class ChangeRate(BaseEstimator):
    """Log ratio of after-period to before-period RMS, column by column.

    ``fit(X, y)`` takes one row per day and a boolean ``y`` marking the
    days on or after the event.

    Parameters
    ----------
    squared : bool, default=False
        Set when ``X`` already holds squared magnitudes (e.g. daily realized
        variances), so the RMS is ``sqrt(mean(X))`` rather than
        ``sqrt(mean(X**2))``.
    """

    def __init__(self, squared=False):
        self.squared = squared

    def fit(self, X, y):
        X = check_array(X, dtype=np.float64, ensure_2d=False)
        if X.ndim == 1:
            X = X[:, None]
        after = np.asarray(y, dtype=bool).ravel()
        if after.shape[0] != X.shape[0]:
            raise ValueError(f"y has {after.shape[0]} entries for {X.shape[0]} rows")
        if after.all() or not after.any():
            raise UndefinedAggregateError("both periods need at least one day")
        sq = X if self.squared else X * X
        if self.squared and np.any(sq < 0):
            raise ValueError("squared magnitudes must be non-negative")
        self.n_features_in_ = X.shape[1]
        self.n_before_ = int((~after).sum())
        self.n_after_ = int(after.sum())
        self.before_ = np.sqrt(sq[~after].mean(axis=0))
        self.after_ = np.sqrt(sq[after].mean(axis=0))
        if np.any(self.before_ <= 0) or np.any(self.after_ <= 0):
            raise DegenerateError("zero aggregate in one of the periods")
        self.change_rate_ = np.log(self.after_ / self.before_)
        return self


class CrossSectionalTTest(BaseEstimator):
    """Column-wise one-sample t-test against zero with ``k``-SE intervals.

    ``fit(X)`` takes one row per stock. NaNs are dropped per column.
    """

    def __init__(self, k=ERROR_BAR_MULTIPLIER):
        self.k = k

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64, ensure_2d=False, ensure_all_finite="allow-nan")
        if X.ndim == 1:
            X = X[:, None]
        p = frequency_profile(X, k=self.k)
        self.n_features_in_ = X.shape[1]
        self.n_ = p.n
        self.mean_ = p.mean
        self.sd_ = p.sd
        self.se_ = p.se
        with np.errstate(divide="ignore", invalid="ignore"):
            self.t_stat_ = np.where(p.se > 0, p.mean / np.where(p.se > 0, p.se, 1.0), np.nan)
        self.lower_ = p.lo
        self.upper_ = p.hi
        return self
