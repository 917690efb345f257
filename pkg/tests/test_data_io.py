import csv
import io
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krigmean import EmptyInput, MalformedCsv, ReportRow, ScanPoint, TimeSeries, load_series, write_outputs
from krigmean.data_io import format_number, write_acf, write_series
from krigmean.correlation import sample_acf


def test_load_dated(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("date,close\n1989-09-01,2363.1\n1989-10-01,2142.6\n\n1989-11-01,2276.8\n", encoding="utf-8")
    s = load_series(path)
    assert len(s) == 3
    np.testing.assert_array_equal(s.values, [2363.1, 2142.6, 2276.8])
    assert s.labels[0] == date(1989, 9, 1)


def test_load_close_only_from_bytes_stream():
    s = load_series(io.BytesIO(b"close\n1\n2.5\n"))
    assert s.labels is None
    assert s.values.tolist() == [1.0, 2.5]


def test_non_numeric_close_names_line():
    with pytest.raises(MalformedCsv, match="line 3"):
        load_series(b"close\n1\nabc\n")


@pytest.mark.parametrize(
    "text",
    [
        b"price\n1\n",
        b"date,close\n2000-02-01,1\n2000-01-01,2\n",
        b"date,close\n2000-13-01,1\n",
        b"date,close\n2000-01-01\n",
        b"close\n1,5\n",
        b"close\nnan\n",
    ],
)
def test_malformed(text):
    with pytest.raises(MalformedCsv):
        load_series(text)


@pytest.mark.parametrize("text", [b"", b"\n\n", b"close\n", b"date,close\n\n"])
def test_empty(text):
    with pytest.raises(EmptyInput):
        load_series(text)


def test_daily_labels_warn():
    rows = "".join(f"2020-01-{d:02d},{d}\n" for d in range(1, 11))
    with pytest.warns(UserWarning, match="monthly"):
        load_series(("date,close\n" + rows).encode())


def test_timeseries_invariants():
    with pytest.raises(ValueError):
        TimeSeries([1.0, np.inf])
    with pytest.raises(ValueError):
        TimeSeries([1.0, 2.0], (date(2000, 1, 1),))


@pytest.mark.parametrize(
    "x, text",
    [(8463.0, "8463"), (0.00315, "0.00315"), (-5.8e-05, "-0.000058"), (0.1 + 0.2, "0.30000000000000004")],
)
def test_format_number(x, text):
    assert format_number(x) == text


@settings(max_examples=200)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e12, max_value=1e12), min_size=1))
def test_series_round_trip(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("rt") / "s.csv"
    write_series(TimeSeries(values), path)
    assert load_series(path).values.tolist() == [float(v) for v in values]


def test_dated_round_trip(tmp_path):
    s = TimeSeries([1.25, 3.0], (date(2001, 1, 1), date(2001, 2, 1)))
    write_series(s, tmp_path / "s.csv")
    back = load_series(tmp_path / "s.csv")
    assert back.labels == s.labels
    assert back.values.tolist() == s.values.tolist()


def scan_points(js):
    return [ScanPoint(j, 0.1 / j - 0.01, 10 + 1 / 3 / j, -0.2, 0.05, 0.003 + j * 1e-9) for j in js]


def test_write_outputs_formats(tmp_path):
    row = ReportRow("FTSE 100", 132, 426, 8463.0, 0.00315, -0.000058)
    series = TimeSeries(np.arange(1.0, 6.0))
    paths = write_outputs([row], scan_points([6, 7]), 3.0, tmp_path, series)
    report = paths["report"].read_bytes()
    assert report == b"index,n,j,estimate,min_sq_error,residual\nFTSE 100,132,426,8463,0.00315,-0.000058\n"
    assert paths["scan"].read_text().splitlines()[0] == "j,residual,estimate,mu,xi_hat,min_sq_error"
    plot = paths["plot"].read_text().splitlines()
    assert plot[0] == "i,value,classic_mean,numerical_estimate"
    assert plot[1] == "1,1,3,"
    assert plot[6].startswith("6,,3,")
    assert len(plot) == 1 + 7


def test_empty_scan_plot(tmp_path):
    series = TimeSeries([1.0, 2.0, 3.0])
    paths = write_outputs([ReportRow("x", 3, 4, 2.0, 0.1, 0.0)], [], 2.0, tmp_path, series)
    assert paths["plot"].read_text() == "i,value,classic_mean,numerical_estimate\n1,1,2,\n2,2,2,\n3,3,2,\n"
    assert paths["scan"].read_text() == "j,residual,estimate,mu,xi_hat,min_sq_error\n"


def test_write_outputs_requires_rows(tmp_path):
    with pytest.raises(ValueError):
        write_outputs([], [], 0.0, tmp_path, TimeSeries([1.0]))


def test_plot_data_round_trip(tmp_path):
    scan = scan_points(range(11, 60))
    write_outputs([ReportRow("x", 10, 11, 1.0, 0.1, 0.0)], scan, 2.0, tmp_path, TimeSeries(np.ones(10)))
    with open(tmp_path / "plot.csv", newline="") as fh:
        parsed = {int(r["i"]): float(r["numerical_estimate"]) for r in csv.DictReader(fh) if r["numerical_estimate"]}
    assert parsed == {p.j: p.estimate for p in scan}


def test_acf_csv(tmp_path):
    write_acf(sample_acf([1, 2, 3, 4, 5, 6, 7, 8], 2), tmp_path / "acf.csv")
    assert (tmp_path / "acf.csv").read_text() == "lag,acf\n0,1\n1,0.625\n2,0.27380952380952384\n"


def test_unwritable_destination(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        write_outputs([ReportRow("x", 1, 2, 1.0, 0.0, 0.0)], [], 0.0, blocker / "sub", TimeSeries([1.0]))
