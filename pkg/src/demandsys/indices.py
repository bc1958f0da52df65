"""Price aggregators: share-weighted (Stone) index, translog index, and the
geometric-mean aggregate price used by the quadratic expenditure shifter.

Pure functions over immutable inputs; the first two return log-scale
series, the geometric aggregate returns a level series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DataError
from .validation import check_matrix, check_share_rows, check_vector

__all__ = ["PriceIndexSeries", "stone_index", "translog_index", "cobb_douglas_q"]

_LOG_KINDS = ("stone", "translog")
_LEVEL_KINDS = ("cobb_douglas",)


@dataclass(frozen=True)
class PriceIndexSeries:
    """A length-T aggregate price series.

    ``values`` holds log prices for kinds 'stone' and 'translog' and a
    strictly positive level series for kind 'cobb_douglas'. ``alpha0`` is
    the translog intercept, None for other kinds.
    """

    kind: str
    values: np.ndarray
    alpha0: float | None = None

    def __post_init__(self):
        if self.kind not in _LOG_KINDS + _LEVEL_KINDS:
            raise DataError(f"unknown index kind {self.kind!r}")
        values = check_vector(self.values, "values")
        if self.kind in _LEVEL_KINDS and np.any(values <= 0):
            raise DataError("level-space index values must be strictly positive")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def stone_index(shares, log_prices) -> PriceIndexSeries:
    """Share-weighted mean of log prices per observation.

    Each row of ``shares`` must sum to 1; shapes must agree.
    """
    shares = check_matrix(shares, "shares")
    log_prices = check_matrix(log_prices, "log_prices", rows=shares.shape[0], cols=shares.shape[1])
    check_share_rows(shares)
    return PriceIndexSeries(kind="stone", values=(shares * log_prices).sum(axis=1))


def translog_index(alpha, gamma, log_prices, alpha0: float = 0.0) -> PriceIndexSeries:
    """Quadratic-form aggregate of log prices.

    For each observation t with log-price row lp:
    value_t = alpha0 + alpha . lp + 0.5 * lp' gamma lp.
    ``gamma`` is used exactly as passed (it is already symmetric whenever
    the symmetry restriction was imposed upstream).
    """
    log_prices = check_matrix(log_prices, "log_prices")
    n = log_prices.shape[1]
    alpha = check_vector(alpha, "alpha", size=n)
    gamma = check_matrix(gamma, "gamma", rows=n, cols=n)
    quad = 0.5 * np.einsum("ti,ij,tj->t", log_prices, gamma, log_prices)
    return PriceIndexSeries(kind="translog", values=alpha0 + log_prices @ alpha + quad, alpha0=float(alpha0))


def cobb_douglas_q(beta, log_prices) -> PriceIndexSeries:
    """Geometric aggregate price: exp(beta . log prices) per observation."""
    log_prices = check_matrix(log_prices, "log_prices")
    beta = check_vector(beta, "beta", size=log_prices.shape[1])
    return PriceIndexSeries(kind="cobb_douglas", values=np.exp(log_prices @ beta))
