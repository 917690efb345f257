"""CSV ingestion of monthly closes and the report / scan / plot-data writers."""

from __future__ import annotations

import csv
import io
import os
import warnings
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .exceptions import EmptyInput, MalformedCsv

REPORT_HEADER = ("index", "n", "j", "estimate", "min_sq_error", "residual")
SCAN_HEADER = ("j", "residual", "estimate", "mu", "xi_hat", "min_sq_error")
PLOT_HEADER = ("i", "value", "classic_mean", "numerical_estimate")
ACF_HEADER = ("lag", "acf")
CONVERGENCE_HEADER = ("n", "mse_mean_estimator", "se", "var_prediction_error", "se2")

# labels closer than this (median spacing) are probably not monthly
_MIN_MONTHLY_DAYS = 25


@dataclass(frozen=True)
class TimeSeries:
    values: np.ndarray
    labels: tuple[date, ...] | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ValueError("series values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != v.size:
                raise ValueError("labels and values differ in length")
            if any(b <= a for a, b in zip(labels, labels[1:])):
                raise ValueError("labels must be strictly increasing")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def head(self, n: int) -> TimeSeries:
        return TimeSeries(self.values[:n], None if self.labels is None else self.labels[:n])


@dataclass(frozen=True)
class ReportRow:
    index_name: str
    n: int
    j_star: int
    estimate: float
    min_sq_error: float
    residual: float

    def as_fields(self) -> list[str]:
        return [
            self.index_name,
            str(self.n),
            str(self.j_star),
            format_number(self.estimate),
            format_number(self.min_sq_error),
            format_number(self.residual),
        ]


def format_number(x: float) -> str:
    """Shortest positional decimal that round-trips to the same double."""
    return np.format_float_positional(float(x), unique=True, trim="-")


def _open_text(source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8", newline=""), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"), newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def load_series(source) -> TimeSeries:
    """Parse a ``date,close`` or ``close`` CSV.

    Parameters
    ----------
    source : path, bytes, or binary/text stream
        UTF-8 CSV with a header row. Blank lines are skipped.

    Raises
    ------
    EmptyInput
        No header or no data rows.
    MalformedCsv
        Unknown header, non-numeric close, bad or non-increasing dates.
    """
    fh, owned = _open_text(source)
    try:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in row)]
    finally:
        if owned:
            fh.close()
    if not rows:
        raise EmptyInput("input has no header")
    header_line, header = rows[0]
    header = [c.strip().lower() for c in header]
    if header == ["date", "close"]:
        has_dates = True
    elif header == ["close"]:
        has_dates = False
    else:
        raise MalformedCsv(f"line {header_line}: expected header 'date,close' or 'close', got {','.join(header)!r}")
    if len(rows) == 1:
        raise EmptyInput("input has no data rows")

    values, labels = [], []
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise MalformedCsv(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        text = row[-1].strip()
        try:
            value = float(text)
        except ValueError:
            raise MalformedCsv(f"line {lineno}: close value {text!r} is not a number") from None
        if not np.isfinite(value):
            raise MalformedCsv(f"line {lineno}: close value {text!r} is not finite")
        values.append(value)
        if has_dates:
            try:
                d = date.fromisoformat(row[0].strip())
            except ValueError:
                raise MalformedCsv(f"line {lineno}: bad ISO-8601 date {row[0].strip()!r}") from None
            if labels and d <= labels[-1]:
                raise MalformedCsv(f"line {lineno}: date {d} does not increase")
            labels.append(d)

    if len(labels) > 2:
        spacing = np.median(np.diff([d.toordinal() for d in labels]))
        if spacing < _MIN_MONTHLY_DAYS:
            warnings.warn(
                f"median date spacing is {spacing:g} days; input is expected to be monthly",
                UserWarning,
                stacklevel=2,
            )
    return TimeSeries(np.array(values), tuple(labels) if has_dates else None)


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_series(series: TimeSeries, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        if series.labels is None:
            w.writerow(["close"])
            w.writerows([format_number(v)] for v in series.values)
        else:
            w.writerow(["date", "close"])
            w.writerows([d.isoformat(), format_number(v)] for d, v in zip(series.labels, series.values))


def write_report(rows: Sequence[ReportRow], path) -> None:
    if not rows:
        raise ValueError("report needs at least one row")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(REPORT_HEADER)
        w.writerows(r.as_fields() for r in rows)


def write_scan(scan: Iterable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(SCAN_HEADER)
        for p in scan:
            w.writerow(
                [str(p.j)]
                + [format_number(x) for x in (p.residual, p.estimate, p.multiplier, p.xi_hat, p.min_sq_error)]
            )


def write_plot_data(series: TimeSeries, scan: Sequence, classic_estimate: float, path) -> None:
    """One row per index ``i``: the series, the constant classic mean, and scan estimates.

    Rows run to the larger of the series length and the last scanned ``j``;
    cells with nothing to show are left empty.
    """
    estimates = {p.j: p.estimate for p in scan}
    last = max([len(series)] + list(estimates))
    classic = format_number(classic_estimate)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(PLOT_HEADER)
        for i in range(1, last + 1):
            value = format_number(series.values[i - 1]) if i <= len(series) else ""
            est = format_number(estimates[i]) if i in estimates else ""
            w.writerow([str(i), value, classic, est])


def write_acf(acf, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(ACF_HEADER)
        w.writerows([str(int(h)), format_number(v)] for h, v in zip(acf.lags, acf.values))


def write_outputs(
    rows: Sequence[ReportRow],
    scan: Sequence,
    classic_estimate: float,
    destination,
    series: TimeSeries,
) -> dict[str, Path]:
    """Write ``report.csv``, ``scan.csv`` and ``plot.csv`` into ``destination``."""
    if not rows:
        raise ValueError("report needs at least one row")
    out = Path(destination)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.csv" for name in ("report", "scan", "plot")}
    write_report(rows, paths["report"])
    write_scan(scan, paths["scan"])
    write_plot_data(series, scan, classic_estimate, paths["plot"])
    return paths
