"""Command-line front end.

Subcommands:

    probe scatter   random-state (LQU, AvSk[, variance]) tables as CSV
    probe boundary  parametric family curves
    probe state     measure a single family state
    probe verify    run the invariant suites
    probe bounds    per-row LQU bounds from (avsk, variance) columns

Exit codes: 0 success, 1 invariant failure, 2 invalid configuration,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Optional

import numpy as np

from .errors import InvalidConfig, ProbeError
from .measures import (
    Spectrum,
    avsk as avsk_fn,
    harmonic_spectrum,
    lqu_two_qubit,
    measure_state,
    optimal_spectrum,
    sigma_z_spectrum,
)
from .moments import lqu_bounds, variance as variance_fn
from .states import (
    FAMILY_TAGS,
    RandomSeed,
    StateFamily,
    family_product,
    family_pqc,
    family_sep,
    isotropic,
    make_state,
    pure_schmidt,
    random_density,
    random_separable,
    werner,
)
from .verify import run_suites

CSV_HEADER_COMMENT = "# probe-metrics v1"
SCATTER_COLUMNS = ("stateId", "familyTag", "lqu", "avsk", "variance", "purityA", "purityB", "witnessEntangled")
BOUNDARY_COLUMNS = ("family", "param", "lqu", "avsk", "variance")
BOUNDS_COLUMNS = ("stateId", "lqu", "avsk", "variance", "lquLower", "lquUpper")

BOUNDARY_FAMILIES = {
    "pure-schmidt": pure_schmidt,
    "isotropic": isotropic,
    "werner": werner,
    "cq-line": family_product,
    "family_product": family_product,
    "family_pqc": family_pqc,
    "family_sep": family_sep,
}


def fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass
class RunConfig:
    command: str
    dim_a: int = 2
    dim_b: int = 2
    count: int = 1
    seed: int = 42
    spectrum: str = "sigma-z"
    explicit_spectrum: Optional[tuple] = None
    with_variance: bool = False
    rank: Optional[int] = None
    separable_terms: Optional[int] = None
    family: Optional[str] = None
    params: tuple = ()
    out: Optional[str] = None
    fmt: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if self.dim_a < 2 or self.dim_b < 1:
            raise InvalidConfig(f"dims must be at least 2x1, got {self.dim_a}x{self.dim_b}")
        if self.count < 1:
            raise InvalidConfig(f"count must be >= 1, got {self.count}")
        if self.explicit_spectrum is not None and len(self.explicit_spectrum) != self.dim_a:
            raise InvalidConfig(
                f"explicit spectrum length {len(self.explicit_spectrum)} != N_A {self.dim_a}"
            )
        if self.rank is not None and not 1 <= self.rank <= self.dim_a * self.dim_b:
            raise InvalidConfig(f"rank {self.rank} outside 1..{self.dim_a * self.dim_b}")
        if self.workers < 1:
            raise InvalidConfig("workers must be >= 1")

    def make_spectrum(self) -> Spectrum:
        if self.explicit_spectrum is not None:
            return Spectrum(self.explicit_spectrum)
        if self.spectrum == "sigma-z":
            if self.dim_a != 2:
                raise InvalidConfig("spectrum sigma-z needs N_A = 2; use optimal/harmonic/explicit")
            return sigma_z_spectrum()
        if self.spectrum == "optimal":
            return optimal_spectrum(self.dim_a)
        if self.spectrum == "harmonic":
            return harmonic_spectrum(self.dim_a)
        raise InvalidConfig(f"unknown spectrum choice {self.spectrum!r}")


def _parse_dims(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError as exc:
        raise InvalidConfig(f"dims must look like 2x2, got {text!r}") from exc


# ---------------------------------------------------------------------------
# scatter
# ---------------------------------------------------------------------------

_WORKER_CFG: Optional[RunConfig] = None


def _scatter_state(cfg: RunConfig, index: int):
    seed = RandomSeed(cfg.seed).child(index)
    if cfg.family is not None:
        if cfg.params:
            param = cfg.params[0]
        else:
            param = float(seed.child(999).rng().uniform())
        rho = make_state(StateFamily(cfg.family, (param,) + tuple(cfg.params[1:])), seed=seed)
        tag = cfg.family
    elif cfg.separable_terms is not None:
        rho = random_separable(cfg.dim_a, cfg.dim_b, cfg.separable_terms, seed)
        tag = "separable"
    else:
        rank = cfg.rank or cfg.dim_a * cfg.dim_b
        rho = random_density(cfg.dim_a, cfg.dim_b, rank, seed)
        tag = "ginibre" if cfg.rank is None else f"ginibre-r{cfg.rank}"
    return rho, tag


def _scatter_row(index: int) -> list[str]:
    cfg = _WORKER_CFG
    rho, tag = _scatter_state(cfg, index)
    spec = cfg.make_spectrum()
    report = measure_state(rho, spec, with_variance=cfg.with_variance, family_tag=tag)
    variance_field = fmt(report.variance) if report.variance is not None else ""
    return [
        str(index),
        tag,
        fmt(report.lqu),
        fmt(report.avsk),
        variance_field,
        fmt(report.purity_a),
        fmt(report.purity_b),
        "true" if report.witness_entangled else "false",
    ]


def _init_worker(cfg: RunConfig) -> None:
    global _WORKER_CFG
    _WORKER_CFG = cfg


def run_scatter(cfg: RunConfig, stream=None) -> dict:
    """Generate `count` random-state rows and return the summary dict."""
    _init_worker(cfg)
    indices = range(cfg.count)
    if cfg.workers > 1:
        with Pool(cfg.workers, initializer=_init_worker, initargs=(cfg,)) as pool:
            rows = pool.map(_scatter_row, indices, chunksize=256)
    else:
        rows = [_scatter_row(i) for i in indices]

    buf = io.StringIO()
    buf.write(CSV_HEADER_COMMENT + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCATTER_COLUMNS)
    writer.writerows(rows)
    payload = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(payload)
    elif stream is not None:
        stream.write(payload)

    lqus = np.array([float(r[2]) for r in rows])
    avsks = np.array([float(r[3]) for r in rows])
    violations = int(np.sum(avsks < lqus - 1e-9))
    summary = {
        "count": len(rows),
        "lqu": {"min": float(lqus.min()), "max": float(lqus.max())},
        "avsk": {"min": float(avsks.min()), "max": float(avsks.max())},
        "orderingViolations": violations,
    }
    if cfg.with_variance:
        variances = np.array([float(r[4]) for r in rows])
        summary["variance"] = {"min": float(variances.min()), "max": float(variances.max())}
    return summary


# ---------------------------------------------------------------------------
# boundary
# ---------------------------------------------------------------------------

def run_boundary(cfg: RunConfig, family: str, steps: int, stream=None) -> int:
    if family not in BOUNDARY_FAMILIES:
        raise InvalidConfig(f"boundary family must be one of {sorted(BOUNDARY_FAMILIES)}, got {family!r}")
    if steps < 2:
        raise InvalidConfig("steps must be >= 2")
    maker = BOUNDARY_FAMILIES[family]
    spec = sigma_z_spectrum()
    rows = []
    for param in np.linspace(0.0, 1.0, steps):
        rho = maker(float(param))
        root = rho.sqrt()
        a = avsk_fn(rho, spec, sqrt_rho=root)
        l = lqu_two_qubit(rho, sqrt_rho=root)
        v = variance_fn(rho, spec, sqrt_rho=root)
        rows.append([family, fmt(float(param)), fmt(l), fmt(a), fmt(v)])

    buf = io.StringIO()
    buf.write(CSV_HEADER_COMMENT + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BOUNDARY_COLUMNS)
    writer.writerows(rows)
    payload = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(payload)
    elif stream is not None:
        stream.write(payload)
    return len(rows)


# ---------------------------------------------------------------------------
# state
# ---------------------------------------------------------------------------

def run_state(cfg: RunConfig, stream) -> None:
    if cfg.family is None:
        raise InvalidConfig("state command requires --family")
    rho = make_state(StateFamily(cfg.family, cfg.params), seed=RandomSeed(cfg.seed))
    # lqu_minimize needs a non-degenerate spectrum, so fall back to the
    # harmonic one beyond two-level probes.
    spec = sigma_z_spectrum() if rho.dim_a == 2 else harmonic_spectrum(rho.dim_a)
    report = measure_state(rho, spec, with_variance=cfg.with_variance, family_tag=cfg.family)
    if cfg.fmt == "json":
        stream.write(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
    else:
        data = report.as_dict()
        writer = csv.writer(stream, lineterminator="\n")
        stream.write(CSV_HEADER_COMMENT + "\n")
        keys = sorted(data)
        writer.writerow(keys)
        writer.writerow([data[k] if not isinstance(data[k], float) else fmt(data[k]) for k in keys])


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def run_bounds(in_path: str, out_path: str) -> int:
    with open(in_path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_HEADER_COMMENT:
            raise InvalidConfig(f"{in_path} is missing the '{CSV_HEADER_COMMENT}' header")
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"avsk", "variance", "lqu"} <= set(reader.fieldnames):
            raise InvalidConfig(f"{in_path} needs lqu, avsk and variance columns (run scatter --with-variance)")
        rows = []
        for idx, row in enumerate(reader):
            if row["variance"] in ("", None):
                raise InvalidConfig(f"{in_path} row {idx}: empty variance; rerun scatter with --with-variance")
            a, v, l = float(row["avsk"]), float(row["variance"]), float(row["lqu"])
            lo, hi = lqu_bounds(a, v)
            rows.append([row.get("stateId", str(idx)), fmt(l), fmt(a), fmt(v), fmt(lo), fmt(hi)])
    with open(out_path, "w", newline="") as fh:
        fh.write(CSV_HEADER_COMMENT + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BOUNDS_COLUMNS)
        writer.writerows(rows)
    return len(rows)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="probe", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scatter", help="measure randomly generated states")
    sc.add_argument("--dims", default="2x2")
    sc.add_argument("--n", type=int, default=1000, dest="count")
    sc.add_argument("--seed", type=int, default=42)
    sc.add_argument("--spectrum", default="sigma-z",
                    help="sigma-z | optimal | harmonic | comma-separated values")
    sc.add_argument("--with-variance", action="store_true")
    sc.add_argument("--rank", type=int, default=None)
    sc.add_argument("--separable", type=int, default=None, metavar="TERMS",
                    help="sample convex mixtures of TERMS random product states")
    sc.add_argument("--family", default=None, choices=sorted(FAMILY_TAGS))
    sc.add_argument("--param", type=float, action="append", default=None)
    sc.add_argument("--workers", type=int, default=1)
    sc.add_argument("--out", required=True)

    bd = sub.add_parser("boundary", help="emit a special-family curve")
    bd.add_argument("--family", required=True, choices=sorted(BOUNDARY_FAMILIES))
    bd.add_argument("--steps", type=int, default=200)
    bd.add_argument("--out", required=True)

    st = sub.add_parser("state", help="measure a single family state")
    st.add_argument("--family", required=True, choices=sorted(FAMILY_TAGS))
    st.add_argument("--param", type=float, action="append", default=None)
    st.add_argument("--measure", default="all", choices=("all", "fast"))
    st.add_argument("--seed", type=int, default=42)
    st.add_argument("--format", default="json", choices=("json", "csv"), dest="fmt")

    vf = sub.add_parser("verify", help="run invariant suites")
    vf.add_argument("--suite", default="all", choices=("all", "linalg", "states", "measures", "moments"))
    vf.add_argument("--seed", type=int, default=12345)
    vf.add_argument("--format", default="text", choices=("text", "json"), dest="fmt")
    vf.add_argument("--mc-samples", type=int, default=1_000_000,
                    help="sample count for the Weingarten Monte Carlo check")
    vf.add_argument("--inject-fault", default=None, choices=("negate-prefactor",),
                    help="self-test hook: deliberately break an invariant")

    bn = sub.add_parser("bounds", help="apply the LQU mean/variance bounds per row")
    bn.add_argument("--in", dest="in_path", required=True)
    bn.add_argument("--out", required=True)
    return parser


def _spectrum_args(text: str) -> tuple[str, Optional[tuple]]:
    if text in ("sigma-z", "optimal", "harmonic"):
        return text, None
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise InvalidConfig(f"cannot parse spectrum {text!r}") from exc
    return "explicit", values


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scatter":
            dim_a, dim_b = _parse_dims(args.dims)
            spectrum, explicit = _spectrum_args(args.spectrum)
            cfg = RunConfig(
                command="scatter", dim_a=dim_a, dim_b=dim_b, count=args.count, seed=args.seed,
                spectrum=spectrum, explicit_spectrum=explicit, with_variance=args.with_variance,
                rank=args.rank, separable_terms=args.separable, family=args.family,
                params=tuple(args.param or ()), out=args.out, workers=args.workers,
            )
            summary = run_scatter(cfg)
            print(json.dumps(summary, indent=2, sort_keys=True))
            return 0 if summary["orderingViolations"] == 0 else 1
        if args.command == "boundary":
            cfg = RunConfig(command="boundary", out=args.out)
            n = run_boundary(cfg, args.family, args.steps)
            print(f"wrote {n} rows for family {args.family} to {args.out}")
            return 0
        if args.command == "state":
            cfg = RunConfig(
                command="state", seed=args.seed, family=args.family,
                params=tuple(args.param or ()), fmt=args.fmt,
                with_variance=(args.measure == "all"),
            )
            run_state(cfg, sys.stdout)
            return 0
        if args.command == "verify":
            results = run_suites(args.suite, seed=args.seed, inject_fault=args.inject_fault,
                                 mc_moment_samples=args.mc_samples)
            failed = [r for r in results if not r.passed]
            if args.fmt == "json":
                print(json.dumps([r.__dict__ for r in results], indent=2))
            else:
                for r in results:
                    print(r.line())
                print(f"{len(results) - len(failed)}/{len(results)} checks passed")
            return 1 if failed else 0
        if args.command == "bounds":
            n = run_bounds(args.in_path, args.out)
            print(f"wrote {n} bounded rows to {args.out}")
            return 0
    except InvalidConfig as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except ProbeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
