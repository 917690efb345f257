"""Command line entry point: ``krigmean {acf,fit,scan,report,simulate}``.

Exit status is 0 on success, 2 when the scan finds no root and 1 on any
input or model error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .correlation import DEFAULT_FAMILY, FAMILIES, sample_acf
from .data_io import REPORT_HEADER, load_series, write_acf, write_outputs, write_scan, write_series
from .estimator import KrigingMeanEstimator, default_max_lag
from .exceptions import KrigingError, NoRootInRange
from .kriging import assemble_lambda, series_stats
from .scan import DEFAULT_TOLERANCE, scan_residuals
from .synthetic import Ar1Spec, generate_ar1, mc_asymptotics
from .validation import UNITS, check_int

EXIT_OK, EXIT_INPUT, EXIT_NO_ROOT = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path | None
    n: int | None
    family: str
    j_max: int | None
    tolerance: float
    units: str
    seed: int | None
    output_dir: Path
    threads: int = 1

    def __post_init__(self):
        if self.n is not None and self.n < 1:
            raise ValueError(f"--n must be at least 1, got {self.n}")
        if self.j_max is not None and self.n is not None and self.j_max <= self.n:
            raise ValueError(f"--j-max must exceed --n ({self.n}), got {self.j_max}")
        if not self.tolerance > 0:
            raise ValueError(f"--tolerance must be positive, got {self.tolerance}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="krigmean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", type=Path, required=True, help="CSV with header 'date,close' or 'close'")
    data.add_argument("--n", type=int, help="window size: the first N observations (default: all)")
    data.add_argument("--output-dir", type=Path, default=Path("."))

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--family", choices=FAMILIES, default=DEFAULT_FAMILY)
    model.add_argument("--max-lag", type=int, help="largest ACF lag used in the fit (default: n // 4)")
    model.add_argument("--nugget", type=float, default=0.0)
    model.add_argument("--fit-nugget", action="store_true")

    scan = argparse.ArgumentParser(add_help=False)
    scan.add_argument("--j-max", type=int, help="last scanned index (default: 10 * n)")
    scan.add_argument("--units", choices=UNITS, default="normalized")
    scan.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("acf", parents=[data], help="write the sample ACF of the window")
    p.add_argument("--max-lag", type=int)

    sub.add_parser("fit", parents=[data, model], help="fit a correlation model and write model.json")
    sub.add_parser("scan", parents=[data, model, scan], help="write the residual scan without root finding")

    p = sub.add_parser("report", parents=[data, model, scan], help="full pipeline: report, scan and plot CSVs")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--index-name", default=None, help="label for the report row (default: input file stem)")

    p = sub.add_parser("simulate", help="write a synthetic AR(1) series, optionally a Monte Carlo table")
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--mean", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--length", type=int, default=240)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path, default=Path("series.csv"))
    p.add_argument("--n-grid", type=_int_list, help="window sizes for the Monte Carlo table, e.g. 25,50,100")
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--output-dir", type=Path, default=Path("."))
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        input=getattr(args, "input", None),
        n=getattr(args, "n", None),
        family=getattr(args, "family", DEFAULT_FAMILY),
        j_max=getattr(args, "j_max", None),
        tolerance=getattr(args, "tolerance", DEFAULT_TOLERANCE),
        units=getattr(args, "units", "normalized"),
        seed=getattr(args, "seed", None),
        output_dir=args.output_dir,
        threads=getattr(args, "threads", 1),
    )


def _window(config: RunConfig):
    series = load_series(config.input)
    n = len(series) if config.n is None else config.n
    if n > len(series):
        raise ValueError(f"--n {n} exceeds the {len(series)} observations in {config.input}")
    return series, series.values[:n]


def _estimator(args, config: RunConfig, n: int) -> KrigingMeanEstimator:
    return KrigingMeanEstimator(
        n_window=n,
        family=config.family,
        nugget=args.nugget,
        fit_nugget=args.fit_nugget,
        max_lag=args.max_lag,
        j_max=config.j_max,
        tolerance=config.tolerance,
        units=config.units,
        threads=config.threads,
    )


def dispatch(args) -> int:
    config = _config(args)
    out = config.output_dir

    if config.command == "simulate":
        spec = Ar1Spec(args.phi, args.mean, args.sigma, args.length, args.seed)
        args.output.parent.mkdir(parents=True, exist_ok=True)
        write_series(generate_ar1(spec), args.output)
        print(args.output)
        if args.n_grid:
            out.mkdir(parents=True, exist_ok=True)
            table = mc_asymptotics(spec, args.n_grid, args.replicates)
            table.write_csv(out / "convergence.csv")
            print(out / "convergence.csv")
        return EXIT_OK

    series, window = _window(config)
    n = window.size
    out.mkdir(parents=True, exist_ok=True)

    if config.command == "acf":
        max_lag = default_max_lag(n) if args.max_lag is None else check_int(args.max_lag, "--max-lag", minimum=0)
        write_acf(sample_acf(window, max_lag), out / "acf.csv")
        print(out / "acf.csv")
        return EXIT_OK

    if config.command == "fit":
        est = _estimator(args, config, n)
        model = est.fit_correlation_model(window)
        text = json.dumps({"n": n, **model.to_dict()}, sort_keys=True)
        (out / "model.json").write_text(text + "\n", encoding="utf-8")
        print(text)
        return EXIT_OK

    if config.command == "scan":
        est = _estimator(args, config, n)
        model = est.fit_correlation_model(window)
        system = assemble_lambda(model, n)
        scale = 1.0 if config.units == "normalized" else series_stats(system, window).sigma2
        j_max = config.j_max or 10 * n
        points = scan_residuals(system, model, window, n + 1, j_max, sigma2=scale, threads=config.threads)
        write_scan(points, out / "scan.csv")
        print(out / "scan.csv")
        return EXIT_OK

    # report
    est = _estimator(args, config, n)
    try:
        est.fit(window)
    except NoRootInRange:
        if hasattr(est, "scan_"):
            write_scan(est.scan_, out / "scan.csv")
        raise
    name = args.index_name or config.input.stem
    row = est.report_row(name)
    write_outputs([row], est.scan_, est.classic_mean_, out, series)
    print(",".join(REPORT_HEADER))
    print(",".join(row.as_fields()))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return dispatch(args)
    except NoRootInRange as exc:
        print(f"krigmean: no root: {exc}", file=sys.stderr)
        return EXIT_NO_ROOT
    except (KrigingError, ValueError, TypeError, OSError) as exc:
        print(f"krigmean: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
