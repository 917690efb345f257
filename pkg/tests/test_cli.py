import json

import numpy as np
import pytest

from krigmean import KrigingMeanEstimator, load_series
from krigmean.cli import main
from krigmean.synthetic import Ar1Spec, generate_ar1


@pytest.fixture
def ar1_csv(tmp_path):
    path = tmp_path / "ar1.csv"
    assert main(["simulate", "--phi", "0.8", "--length", "240", "--seed", "7", "--mean", "100", "--output", str(path)]) == 0
    return path


def read(path):
    return path.read_bytes()


def test_report_pipeline(ar1_csv, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["report", "--input", str(ar1_csv), "--n", "120", "--output-dir", str(out), "--index-name", "AR1"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-2] == "index,n,j,estimate,min_sq_error,residual"
    assert lines[-1].startswith("AR1,120,")
    assert read(out / "report.csv").decode().splitlines() == lines[-2:]
    assert (out / "scan.csv").exists() and (out / "plot.csv").exists()

    est = KrigingMeanEstimator(n_window=120).fit(load_series(ar1_csv))
    assert lines[-1].split(",")[2] == str(est.j_star_)


def test_report_is_deterministic(ar1_csv, tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert main(["report", "--input", str(ar1_csv), "--n", "100", "--output-dir", str(out), "--threads", "3"]) == 0
    for name in ("report.csv", "scan.csv", "plot.csv"):
        assert read(outs[0] / name) == read(outs[1] / name)


def test_units_absolute(ar1_csv, tmp_path):
    main(["report", "--input", str(ar1_csv), "--n", "120", "--output-dir", str(tmp_path / "n")])
    main(["report", "--input", str(ar1_csv), "--n", "120", "--output-dir", str(tmp_path / "a"), "--units", "absolute"])
    norm = float(read(tmp_path / "n" / "report.csv").decode().splitlines()[1].split(",")[4])
    absolute = float(read(tmp_path / "a" / "report.csv").decode().splitlines()[1].split(",")[4])
    sigma2 = KrigingMeanEstimator(n_window=120).fit(load_series(ar1_csv)).sigma2_
    assert absolute == pytest.approx(norm * sigma2, rel=1e-14)


def test_white_noise_exits_2(tmp_path, capsys):
    path = tmp_path / "wn.csv"
    main(["simulate", "--phi", "0", "--length", "200", "--seed", "4", "--output", str(path)])
    code = main(["report", "--input", str(path), "--n", "100", "--output-dir", str(tmp_path / "o")])
    assert code == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "no root" in err[0]


@pytest.mark.parametrize(
    "content, extra",
    [
        ("close\n1\nabc\n", []),
        ("", []),
        ("close\n" + "".join(f"{i}\n" for i in range(20)), ["--n", "50"]),
        ("close\n" + "".join(f"{i % 3}\n" for i in range(20)), ["--n", "10", "--j-max", "5"]),
        ("close\n" + "5\n" * 20, []),
    ],
)
def test_input_errors_exit_1(tmp_path, capsys, content, extra):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    assert main(["report", "--input", str(path), "--output-dir", str(tmp_path / "o"), *extra]) == 1
    assert len(capsys.readouterr().err.strip().splitlines()) == 1


def test_missing_file_exits_1(tmp_path):
    assert main(["acf", "--input", str(tmp_path / "nope.csv")]) == 1


def test_acf_fit_scan(ar1_csv, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["acf", "--input", str(ar1_csv), "--n", "120", "--max-lag", "5", "--output-dir", str(out)]) == 0
    lines = (out / "acf.csv").read_text().splitlines()
    assert lines[0] == "lag,acf" and lines[1] == "0,1" and len(lines) == 7

    assert main(["fit", "--input", str(ar1_csv), "--n", "120", "--family", "spherical", "--output-dir", str(out)]) == 0
    model = json.loads((out / "model.json").read_text())
    assert model["family"] == "spherical" and model["n"] == 120 and model["range"] > 0

    assert main(["scan", "--input", str(ar1_csv), "--n", "50", "--j-max", "80", "--output-dir", str(out)]) == 0
    scan = (out / "scan.csv").read_text().splitlines()
    assert scan[0] == "j,residual,estimate,mu,xi_hat,min_sq_error"
    assert [int(r.split(",")[0]) for r in scan[1:]] == list(range(51, 81))


def test_simulate_convergence_table(tmp_path):
    series = tmp_path / "s.csv"
    args = ["simulate", "--phi", "0.5", "--seed", "3", "--output", str(series), "--output-dir", str(tmp_path)]
    assert main(args + ["--n-grid", "10,20", "--replicates", "100"]) == 0
    lines = (tmp_path / "convergence.csv").read_text().splitlines()
    assert lines[0] == "n,mse_mean_estimator,se,var_prediction_error,se2"
    assert [line.split(",")[0] for line in lines[1:]] == ["10", "20"]
    np.testing.assert_array_equal(load_series(series).values, generate_ar1(Ar1Spec(0.5, seed=3)).values)


@pytest.mark.slow
def test_simulate_report_across_seeds():
    # same computation as `simulate --phi 0.8 --length 240 --seed s` then `report --n 120`
    true_mean = 10.0
    estimates = []
    for seed in range(500):
        series = generate_ar1(Ar1Spec(phi=0.8, mean=true_mean, length=240, seed=seed))
        estimates.append(KrigingMeanEstimator(n_window=120).fit(series).mean_)
    estimates = np.array(estimates)
    sd = estimates.std(ddof=1)
    assert abs(estimates.mean() - true_mean) <= 3 * sd / np.sqrt(estimates.size)
    assert np.mean(np.abs(estimates - true_mean) <= 3 * sd) >= 0.99
