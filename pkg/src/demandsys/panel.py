"""Weekly price/quantity panels: data model, CSV ingestion, expenditure
shares, and descriptive statistics.

All containers are immutable after construction (arrays are marked
read-only) and all operations are pure functions, so values can be shared
freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .exceptions import DataError, FormatError, InsufficientDataError
from .validation import check_matrix, check_positive, check_same_shape

__all__ = [
    "MarketPanel",
    "SharePanel",
    "SummaryTable",
    "load_panel",
    "compute_shares",
    "summary_stats",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class MarketPanel:
    """T weekly observations of prices and quantities for n goods in one region.

    Parameters
    ----------
    region : str
        Label for the market the panel was aggregated over.
    goods : tuple of str
        Good labels, fixed ordering; length n.
    weeks : tuple
        Week identifiers (ISO date strings or integers), strictly increasing;
        length T. Model formulas always use the positional index t = 0..T-1,
        the identifiers are kept for reporting.
    prices : (T, n) ndarray
        Average prices, strictly positive.
    quantities : (T, n) ndarray
        Quantities, strictly positive.
    """

    region: str
    goods: tuple
    weeks: tuple
    prices: np.ndarray
    quantities: np.ndarray

    def __post_init__(self):
        goods = tuple(str(g) for g in self.goods)
        weeks = tuple(self.weeks)
        if len(set(goods)) != len(goods):
            raise DataError("good labels must be unique")
        prices = check_matrix(self.prices, "prices", rows=len(weeks), cols=len(goods))
        quantities = check_matrix(self.quantities, "quantities", rows=len(weeks), cols=len(goods))
        check_same_shape(prices, quantities, "prices", "quantities")
        check_positive(prices, "prices")
        check_positive(quantities, "quantities")
        for a, b in zip(weeks, weeks[1:]):
            if not type(a) is type(b) or not a < b:
                raise DataError(f"weeks must be strictly increasing and homogeneous: {a!r} !< {b!r}")
        object.__setattr__(self, "goods", goods)
        object.__setattr__(self, "weeks", weeks)
        object.__setattr__(self, "prices", _freeze(prices))
        object.__setattr__(self, "quantities", _freeze(quantities))

    @property
    def n_weeks(self) -> int:
        return len(self.weeks)

    @property
    def n_goods(self) -> int:
        return len(self.goods)

    def expenditures(self) -> np.ndarray:
        """Per-observation spending, price times quantity, shape (T, n)."""
        return self.prices * self.quantities


@dataclass(frozen=True)
class SharePanel:
    """Expenditure shares, log prices, and total expenditure derived from a
    :class:`MarketPanel`; the estimator's input.
    """

    log_prices: np.ndarray
    shares: np.ndarray
    total_expenditure: np.ndarray
    source: MarketPanel

    def __post_init__(self):
        T, n = self.source.n_weeks, self.source.n_goods
        lp = check_matrix(self.log_prices, "log_prices", rows=T, cols=n)
        sh = check_matrix(self.shares, "shares", rows=T, cols=n)
        x = np.asarray(self.total_expenditure, dtype=float)
        if x.shape != (T,):
            raise DataError(f"total_expenditure must have length {T}")
        if np.any(x <= 0):
            raise DataError("total_expenditure must be strictly positive")
        if np.any(sh < 0) or np.any(sh > 1):
            raise DataError("shares must lie in [0, 1]")
        if np.any(np.abs(sh.sum(axis=1) - 1.0) > 1e-12):
            raise DataError("share rows must sum to 1 within 1e-12")
        object.__setattr__(self, "log_prices", _freeze(lp))
        object.__setattr__(self, "shares", _freeze(sh))
        object.__setattr__(self, "total_expenditure", _freeze(x))

    @property
    def n_weeks(self) -> int:
        return self.source.n_weeks

    @property
    def n_goods(self) -> int:
        return self.source.n_goods

    @property
    def goods(self) -> tuple:
        return self.source.goods


_STAT_ROWS = ("Minimum", "Maximum", "Mean", "SD", "CV (%)")
_KINDS = ("quantity", "price")


@dataclass(frozen=True)
class SummaryTable:
    """Min/max/mean/SD/CV per good for quantities and prices.

    Arrays have shape (2, n) with row 0 = quantities, row 1 = prices.
    SD is the sample (n-1 denominator) standard deviation and
    CV = 100 * SD / mean.
    """

    region: str
    goods: tuple
    minimum: np.ndarray
    maximum: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    cv: np.ndarray
    kinds: tuple = field(default=_KINDS)

    def to_frame(self) -> pd.DataFrame:
        """Wide layout: statistic rows by (kind, good) columns."""
        cols = pd.MultiIndex.from_product([self.kinds, self.goods])
        data = np.vstack([
            np.concatenate([self.minimum[0], self.minimum[1]]),
            np.concatenate([self.maximum[0], self.maximum[1]]),
            np.concatenate([self.mean[0], self.mean[1]]),
            np.concatenate([self.sd[0], self.sd[1]]),
            np.concatenate([self.cv[0], self.cv[1]]),
        ])
        return pd.DataFrame(data, index=list(_STAT_ROWS), columns=cols)


_LONG_COLUMNS = ("week", "good", "price", "quantity")


def _parse_weeks(values) -> list:
    """Week labels: integers where possible, otherwise strings (ISO dates
    sort correctly lexicographically)."""
    out = []
    for v in values:
        try:
            out.append(int(v))
        except (TypeError, ValueError):
            out.append(str(v))
    if len({type(v) for v in out}) > 1:
        raise DataError("week identifiers mix integers and strings")
    return out


def load_panel(path, columns: dict | None = None, region: str | None = None) -> MarketPanel:
    """Read a long-format CSV (``week,good,price,quantity``) into a panel.

    Parameters
    ----------
    path : str or Path
        CSV file with a header row, decimal point '.', no thousands
        separators.
    columns : dict, optional
        Maps the canonical names ``week``, ``good``, ``price``,
        ``quantity`` to the actual column names in the file.
    region : str, optional
        Region label; defaults to the file stem.

    Raises
    ------
    FormatError
        Missing/unmappable column or unreadable file.
    DataError
        Non-positive or non-numeric price/quantity, duplicate
        (week, good) pair, or a good missing in some week.
    """
    mapping = {name: name for name in _LONG_COLUMNS}
    if columns:
        mapping.update({k: v for k, v in columns.items() if k in _LONG_COLUMNS})
    try:
        df = pd.read_csv(path)
    except FileNotFoundError:
        raise FormatError(f"input file not found: {path}") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise FormatError(f"cannot parse {path}: {exc}") from None

    missing = [mapping[name] for name in _LONG_COLUMNS if mapping[name] not in df.columns]
    if missing:
        raise FormatError(f"{path}: missing column(s) {missing}; found {list(df.columns)}")
    df = df.rename(columns={v: k for k, v in mapping.items()})

    for col in ("price", "quantity"):
        values = pd.to_numeric(df[col], errors="coerce")
        bad = values.isna() | ~np.isfinite(values)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise DataError(f"{path}: non-numeric {col} at data row {row} (week={df['week'].iloc[row]!r}, good={df['good'].iloc[row]!r})")
        nonpos = values <= 0
        if nonpos.any():
            row = int(np.flatnonzero(nonpos)[0])
            raise DataError(f"{path}: non-positive {col} at data row {row} (week={df['week'].iloc[row]!r}, good={df['good'].iloc[row]!r})")
        df[col] = values.astype(float)

    weeks_raw = _parse_weeks(df["week"])
    df = df.assign(week=weeks_raw, good=df["good"].astype(str))

    dup = df.duplicated(subset=["week", "good"])
    if dup.any():
        row = int(np.flatnonzero(dup)[0])
        raise DataError(f"{path}: duplicate (week, good) pair at data row {row}: ({df['week'].iloc[row]!r}, {df['good'].iloc[row]!r})")

    goods = list(dict.fromkeys(df["good"]))  # first-appearance order
    weeks = sorted(set(df["week"]))
    wide_p = df.pivot(index="week", columns="good", values="price").loc[weeks, goods]
    wide_q = df.pivot(index="week", columns="good", values="quantity").loc[weeks, goods]
    if wide_p.isna().any().any():
        missing_cells = wide_p.isna().stack()
        week, good = missing_cells[missing_cells].index[0]
        raise DataError(f"{path}: unbalanced panel, good {good!r} missing in week {week!r}")

    label = region if region is not None else _stem(path)
    return MarketPanel(
        region=label,
        goods=tuple(goods),
        weeks=tuple(weeks),
        prices=wide_p.to_numpy(),
        quantities=wide_q.to_numpy(),
    )


def _stem(path) -> str:
    import os

    return os.path.splitext(os.path.basename(str(path)))[0]


def compute_shares(panel: MarketPanel) -> SharePanel:
    """Expenditure shares w = pq / sum(pq), totals, and log prices.

    Shares are normalized row by row so each row sums to 1 exactly up to
    float rounding; total expenditure is the unnormalized row sum.
    """
    expenditure = panel.expenditures()
    total = expenditure.sum(axis=1)
    shares = expenditure / total[:, None]
    return SharePanel(
        log_prices=np.log(panel.prices),
        shares=shares,
        total_expenditure=total,
        source=panel,
    )


def summary_stats(panel: MarketPanel) -> SummaryTable:
    """Per-good descriptive statistics for quantities and prices.

    Requires T >= 2 for the sample standard deviation.
    """
    if panel.n_weeks < 2:
        raise InsufficientDataError(f"summary statistics need at least 2 weeks, got {panel.n_weeks}")
    blocks = np.stack([panel.quantities, panel.prices])  # (2, T, n)
    mean = blocks.mean(axis=1)
    sd = blocks.std(axis=1, ddof=1)
    return SummaryTable(
        region=panel.region,
        goods=panel.goods,
        minimum=blocks.min(axis=1),
        maximum=blocks.max(axis=1),
        mean=mean,
        sd=sd,
        cv=100.0 * sd / mean,
    )
