"""Command-line harness.

Every subcommand takes the same flags; ``--config FILE`` supplies defaults
from a flat JSON object whose keys are flag names, and flags given on the
command line win.  Exit codes: 0 success, 1 validation error, 2 numerical
non-convergence, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from . import io as glio
from .covops import make_model, op_norm_power_iter, schur_bound, truncate
from .exceptions import NonConvergenceError, NotACovarianceError, ValidationError
from .gp import SeedSpec, radius_statistic, sample_process
from .hardy import CoefficientSeries, hp_norm_grid, make_boundary_example
from .io import fmt9
from .littlewood import (
    estimate_mixed_norm,
    exp_integral_estimate,
    improvement_sweep,
    moment_equivalence_check,
    verify_bounds,
)
from .multipliers import lacunary_hp_criterion, multiplier_test, necessary_decay_diagnostic, wiener_check
from .sequences import SequenceSpec

COMMANDS = ("norm", "covnorm", "sample", "estimate", "verify", "expint", "sweep", "diag", "selftest")
DIAG_KINDS = ("multiplier", "decay", "wiener", "lacunary", "radius")

DEFAULTS = {
    "family": "identity",
    "sigma2": 1.0,
    "c": None,
    "bandwidth": 3,
    "template": None,
    "sigma": "const:1",
    "a": 1.0,
    "f": None,
    "coeffs": None,
    "coeffs_file": None,
    "degree": 0,
    "p": 2.0,
    "q": 2.0,
    "trials": 1000,
    "grid": None,
    "seed": None,
    "stream": 0,
    "lam": 0.25,
    "degrees": "256,1024,4096",
    "kind": "multiplier",
    "seq": "const:1",
    "m": 0,
    "eps": 0.25,
    "n0": 1,
    "out": None,
    "json": None,
    "matrix_out": None,
    "outdir": "selftest-artifacts",
    "only": None,
}

# Config-file spellings accepted for a few keys.
ALIASES = {"N": "degree", "M": "grid", "T": "trials", "coeffs-file": "coeffs_file", "matrix-out": "matrix_out"}


@dataclasses.dataclass
class ExperimentConfig:
    command: str
    family: str
    sigma2: float
    c: object
    bandwidth: int
    template: object
    sigma: str
    a: float
    f: object
    coeffs: object
    coeffs_file: object
    degree: int
    p: float
    q: float
    trials: int
    grid: object
    seed: int
    stream: int
    lam: float
    degrees: object
    kind: str
    seq: str
    m: int
    eps: float
    n0: int
    out: object
    json: object
    matrix_out: object
    outdir: str
    only: object

    def model(self):
        params = {}
        if self.family == "toeplitz_geometric":
            params = {"sigma2": self.sigma2, "c": 0.5 if self.c is None else float(self.c)}
        elif self.family == "band":
            params = {"bandwidth": self.bandwidth, "template": self.template}
        elif self.family == "diagonal":
            params = {"sigma": self.sigma}
        elif self.family == "rank_one":
            params = {"c": "const:1" if self.c is None else str(self.c)}
        elif self.family == "triangular_factor":
            params = {"a": self.a, "c": 0.5 if self.c is None else float(self.c)}
        return make_model(self.family, **params)

    def series(self, degree=None):
        degree = self.degree if degree is None else degree
        if self.coeffs_file:
            return glio.load_coeffs(self.coeffs_file)
        if self.coeffs is not None:
            return CoefficientSeries(self.coeffs)
        return series_from_spec(self.f or "ones", degree, self.seed)


def series_from_spec(spec, degree, seed=0):
    """``single:K``, ``boundary``, ``ones``, ``random``, ``lacunary`` or ``geometric:R``."""
    kind, _, arg = str(spec).partition(":")
    try:
        if kind == "single":
            return CoefficientSeries.monomial(int(arg or 0))
        if kind == "boundary":
            return make_boundary_example(degree)
        if kind == "ones":
            return CoefficientSeries(np.ones(degree + 1))
        if kind == "random":
            return CoefficientSeries(np.random.default_rng([seed, degree]).standard_normal(degree + 1))
        if kind == "geometric":
            return CoefficientSeries(float(arg) ** np.arange(degree + 1))
        if kind == "lacunary":
            from .hardy import make_lacunary

            ks = [k for k in range(64) if 2**k <= max(degree, 1)]
            return make_lacunary([2**k for k in ks], [2.0 ** (-k / 2) for k in ks])
    except (TypeError, ValueError) as exc:
        raise ValidationError("f", f"cannot build series from {spec!r}: {exc}") from None
    raise ValidationError("f", f"unknown series spec {spec!r}")


def _floats(text, key):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [x for x in str(text).split(",") if x.strip()]
    try:
        return [complex(x.replace(" ", "")) if isinstance(x, str) else complex(x) for x in items]
    except ValueError as exc:
        raise ValidationError(key, str(exc)) from None


def _real_list(values, key):
    out = []
    for v in values:
        if v.imag != 0:
            raise ValidationError(key, "entries must be real")
        out.append(v.real)
    return out


def load_config(path):
    """Read a flat JSON object of flag values."""
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        return {}
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("config", f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("config", "top level must be an object")
    out = {}
    for key, value in data.items():
        name = ALIASES.get(key, key.replace("-", "_"))
        if name not in DEFAULTS:
            raise ValidationError(key, "unknown configuration key")
        if isinstance(value, (dict, list)) and name not in ("template", "coeffs", "degrees", "only"):
            raise ValidationError(key, "configuration must be flat")
        out[name] = value
    return out


def build_config(command, file_values, flag_values):
    merged = dict(DEFAULTS)
    merged.update(file_values)
    merged.update(flag_values)
    if merged["seed"] is None:
        env = os.environ.get("GL_SEED")
        fallback = acceptance.DEFAULT_SEED if command == "selftest" else 0
        merged["seed"] = env if env is not None else fallback
    cfg = ExperimentConfig(command=command, **merged)
    return validate(cfg)


def _as_int(key, value, minimum):
    try:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError
        ivalue = int(value)
    except (TypeError, ValueError):
        raise ValidationError(key, f"expected an integer, got {value!r}") from None
    if ivalue < minimum:
        raise ValidationError(key, f"must be >= {minimum} (got {ivalue})")
    return ivalue


def _as_float(key, value, low=None, strict=False):
    try:
        fvalue = float(value)
    except (TypeError, ValueError):
        raise ValidationError(key, f"expected a number, got {value!r}") from None
    if not np.isfinite(fvalue):
        raise ValidationError(key, "must be finite")
    if low is not None and (fvalue < low or (strict and fvalue == low)):
        raise ValidationError(key, f"must be {'>' if strict else '>='} {low} (got {fvalue})")
    return fvalue


def validate(cfg):
    """Check every numeric field before any computation starts."""
    cfg.degree = _as_int("degree", cfg.degree, 0)
    cfg.trials = _as_int("trials", cfg.trials, 2)
    cfg.seed = _as_int("seed", cfg.seed, 0)
    if cfg.seed >= 2**64:
        raise ValidationError("seed", "must fit in 64 unsigned bits")
    cfg.stream = _as_int("stream", cfg.stream, 0)
    cfg.bandwidth = _as_int("bandwidth", cfg.bandwidth, 1)
    cfg.m = _as_int("m", cfg.m, 0)
    cfg.n0 = _as_int("n0", cfg.n0, 1)
    if cfg.grid is not None:
        cfg.grid = _as_int("grid", cfg.grid, 1)
    cfg.p = _as_float("p", cfg.p, 0, strict=True)
    cfg.q = _as_float("q", cfg.q, 1)
    cfg.lam = _as_float("lam", cfg.lam, 0)
    cfg.eps = _as_float("eps", cfg.eps, 0, strict=True)
    cfg.sigma2 = _as_float("sigma2", cfg.sigma2, 0, strict=True)
    cfg.a = _as_float("a", cfg.a)
    if cfg.coeffs is not None:
        cfg.coeffs = _floats(cfg.coeffs, "coeffs")
        if not cfg.coeffs:
            raise ValidationError("coeffs", "must not be empty")
    if cfg.template is not None:
        cfg.template = _real_list(_floats(cfg.template, "template"), "template")
    if isinstance(cfg.degrees, str):
        cfg.degrees = [_as_int("degrees", x, 0) for x in cfg.degrees.split(",") if x.strip()]
    else:
        cfg.degrees = [_as_int("degrees", x, 0) for x in cfg.degrees]
    if cfg.only is not None:
        items = cfg.only.split(",") if isinstance(cfg.only, str) else cfg.only
        cfg.only = [_as_int("only", x, 1) for x in items if str(x).strip()]
    if cfg.kind not in DIAG_KINDS:
        raise ValidationError("kind", f"choose from {DIAG_KINDS}")
    SequenceSpec.parse(cfg.seq)
    # Building the model now surfaces bad family parameters before any work.
    cfg.model()
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common(parser):
    sup = argparse.SUPPRESS
    parser.add_argument("--config", default=sup, help="flat JSON file of flag values")
    parser.add_argument("--family", default=sup, help="identity, diagonal, band, hilbert, toeplitz_geometric, rank_one, triangular_factor")
    parser.add_argument("--sigma2", type=float, default=sup)
    parser.add_argument("--c", default=sup, help="geometric ratio, or a sequence spec for rank_one")
    parser.add_argument("--bandwidth", type=int, default=sup)
    parser.add_argument("--template", default=sup, help="band template, comma separated")
    parser.add_argument("--sigma", default=sup, help="sequence spec of standard deviations (diagonal)")
    parser.add_argument("--a", type=float, default=sup)
    parser.add_argument("--f", default=sup, help="single:K, boundary, ones, random, lacunary, geometric:R")
    parser.add_argument("--coeffs", default=sup, help="comma separated coefficients, e.g. 1,1 or 1+2j,0")
    parser.add_argument("--coeffs-file", dest="coeffs_file", default=sup)
    parser.add_argument("--N", "--degree", dest="degree", type=int, default=sup)
    parser.add_argument("--p", type=float, default=sup)
    parser.add_argument("--q", type=float, default=sup)
    parser.add_argument("--trials", "--T", dest="trials", type=int, default=sup)
    parser.add_argument("--M", "--grid", dest="grid", type=int, default=sup)
    parser.add_argument("--seed", type=int, default=sup, help="root seed (default: $GL_SEED or 0)")
    parser.add_argument("--stream", type=int, default=sup)
    parser.add_argument("--lam", type=float, default=sup)
    parser.add_argument("--degrees", default=sup)
    parser.add_argument("--kind", default=sup, help=f"diag kind: {', '.join(DIAG_KINDS)}")
    parser.add_argument("--seq", default=sup, help="sequence spec: const:V, cyclic:..., power:EXP[:SCALE[:OFFSET]], prefix:...")
    parser.add_argument("--m", type=int, default=sup)
    parser.add_argument("--eps", type=float, default=sup)
    parser.add_argument("--n0", type=int, default=sup)
    parser.add_argument("--out", default=sup, help="CSV output path")
    parser.add_argument("--json", default=sup, help="JSON output path")
    parser.add_argument("--matrix-out", dest="matrix_out", default=sup)
    parser.add_argument("--outdir", default=sup)
    parser.add_argument("--only", default=sup, help="selftest: comma separated criterion numbers")


def make_parser():
    parser = _Parser(prog="gaussian-littlewood", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    helps = {
        "norm": "grid H^p norm of a series",
        "covnorm": "finite-section operator norm and Schur bound",
        "sample": "one process realisation",
        "estimate": "Monte Carlo L^q(Ω, H^p) norm of Rf",
        "verify": "bound reports for ||Rf||_{L^2(Ω, H^p)}",
        "expint": "exponential integral estimate",
        "sweep": "deterministic vs randomised norms across degrees",
        "diag": "multiplier, decay, Wiener, lacunary and radius diagnostics",
        "selftest": "run the acceptance suite",
    }
    for name in COMMANDS:
        _add_common(sub.add_parser(name, help=helps[name]))
    return parser


def _emit(line):
    print(line)


def _kv(**items):
    return " ".join(f"{k}={fmt9(v) if not isinstance(v, str) else v}" for k, v in items.items())


def _write_outputs(cfg, rows=None, columns=None, payload=None):
    if cfg.out and rows is not None:
        glio.rows_to_csv(rows, columns, cfg.out)
    if cfg.json and payload is not None:
        glio.dump_json(payload, cfg.json)


def cmd_norm(cfg):
    f = cfg.series()
    res = hp_norm_grid(f, cfg.p, cfg.grid)
    _emit(_kv(norm=res.value, p=res.p, M=res.grid_size, exact=str(res.exact).lower(), degree=f.degree))
    row = {"p": res.p, "M": res.grid_size, "exact": res.exact, "value": res.value}
    _write_outputs(cfg, [row], ("p", "M", "exact", "value"), row)
    return 0


def cmd_covnorm(cfg):
    model = cfg.model()
    T = truncate(model, cfg.degree)
    res = op_norm_power_iter(T)
    limit = model.schur_limit()
    row = {"model": model.describe(), "N": cfg.degree, "op_norm": res.estimate, "iterations": res.iterations,
           "converged": res.converged, "residual": res.residual, "schur": schur_bound(model, cfg.degree),
           "schur_limit": float("nan") if limit is None else limit}
    _emit(_kv(op_norm=res.estimate, model=row["model"], N=cfg.degree, iterations=res.iterations,
              converged=str(res.converged).lower(), schur=row["schur"], schur_limit=row["schur_limit"]))
    _write_outputs(cfg, [row], tuple(row), row)
    if cfg.matrix_out:
        glio.matrix_to_csv(T, cfg.matrix_out)
    if not res.converged:
        raise NonConvergenceError("power iteration did not converge", res.estimate)
    return 0


def cmd_sample(cfg):
    model = cfg.model()
    sample = sample_process(model, cfg.degree, SeedSpec(cfg.seed, cfg.stream))
    text = glio.sample_to_csv(sample, cfg.out)
    if not cfg.out:
        sys.stdout.write(text)
    _emit(_kv(sample=model.describe(), N=cfg.degree, seed=cfg.seed, stream=cfg.stream,
              X0=float(sample.values[0])))
    if cfg.json:
        glio.dump_json({"model": sample.model_id, "seed": cfg.seed, "stream": cfg.stream,
                        "values": sample.values}, cfg.json)
    return 0


def cmd_estimate(cfg):
    est = estimate_mixed_norm(cfg.series(), cfg.model(), cfg.p, cfg.q, cfg.trials, SeedSpec(cfg.seed, cfg.stream), cfg.grid)
    _emit(_kv(estimate=est.mean, stderr=est.stderr, raw_moment=est.raw_moment, raw_stderr=est.raw_stderr,
              p=est.p, q=est.q, T=est.trials, M=est.grid_size, seed=est.seed))
    row = dataclasses.asdict(est)
    _write_outputs(cfg, [row], tuple(row), est)
    return 0


def _report_lines(reports):
    for r in reports:
        status = "ok" if r.satisfied else "VIOLATED"
        _emit(_kv(report=r.bound_name, kind=r.kind, estimate=r.estimate, stderr=r.stderr,
                  bound=r.bound_value, margin=r.margin, status=status))


def cmd_verify(cfg):
    f = cfg.series()
    seed = SeedSpec(cfg.seed, cfg.stream)
    reports = verify_bounds(f, cfg.model(), cfg.p, cfg.trials, seed, cfg.grid)
    if cfg.p < 1:
        _emit("p < 1: quasi-norm regime, no bounds checked")
    elif cfg.q != 2:
        reports += list(moment_equivalence_check(f, cfg.model(), cfg.p, cfg.q, cfg.trials, seed, cfg.grid))
    _report_lines(reports)
    if cfg.out:
        glio.reports_to_csv(reports, cfg.out)
    if cfg.json:
        glio.reports_to_json(reports, cfg.json)
    return 0


def cmd_expint(cfg):
    est = exp_integral_estimate(cfg.series(), cfg.model(), cfg.lam, cfg.trials, cfg.grid, SeedSpec(cfg.seed, cfg.stream))
    _emit(_kv(expint=est.mean, stderr=est.stderr, lam=est.lam, threshold=est.threshold,
              blow_up=str(est.blow_up).lower(), tail_index=est.tail_index, T=est.trials, M=est.grid_size))
    row = {k: v for k, v in dataclasses.asdict(est).items() if k != "reasons"}
    row["reasons"] = ";".join(est.reasons)
    _write_outputs(cfg, [row], tuple(row), est)
    return 0


def cmd_sweep(cfg):
    rows = improvement_sweep(lambda N: cfg.series(N), cfg.model(), cfg.p, cfg.degrees, cfg.trials,
                             SeedSpec(cfg.seed, cfg.stream), cfg.grid)
    for r in rows:
        _emit(_kv(degree=r.degree, deterministic=r.deterministic_norm, randomized_median=r.randomized_median))
    dicts = [dataclasses.asdict(r) for r in rows]
    _write_outputs(cfg, dicts, ("degree", "deterministic_norm", "randomized_median"), rows)
    return 0


def cmd_diag(cfg):
    if cfg.kind == "multiplier":
        rep = multiplier_test(SequenceSpec.parse(cfg.seq), cfg.p, max(cfg.degree, 1))
        row = dataclasses.asdict(rep)
        _emit(_kv(diag=rep.name, value=rep.value, value_doubled=rep.value_doubled, stable=str(rep.stable).lower()))
    elif cfg.kind == "decay":
        rep = necessary_decay_diagnostic(cfg.model(), cfg.m, cfg.eps, cfg.p, max(cfg.degree, 1))
        row = {k: v for k, v in dataclasses.asdict(rep).items() if k != "window_sups"}
        _emit(_kv(diag="decay", applicable=str(rep.applicable).lower(), trend_ok=str(rep.trend_ok).lower(),
                  partial_sum=rep.partial_sum, partial_sum_doubled=rep.partial_sum_doubled))
    elif cfg.kind == "wiener":
        f = cfg.series()
        lam = np.zeros(f.degree + 1)
        if cfg.m > f.degree:
            raise ValidationError("m", f"must be <= degree {f.degree}")
        lam[cfg.m] = 1.0
        rep = wiener_check(cfg.model(), lam, f.coeffs, f.degree)
        row = dataclasses.asdict(rep)
        _emit(_kv(diag="wiener", wiener_sum=rep.wiener_sum, row_norm=rep.row_norm, op_norm=rep.op_norm,
                  l2_inequality=str(rep.l2_inequality).lower()))
    elif cfg.kind == "lacunary":
        f = cfg.series() if (cfg.coeffs or cfg.coeffs_file or cfg.f) else series_from_spec("lacunary", cfg.degree)
        rep = lacunary_hp_criterion(f, cfg.model(), cfg.trials, SeedSpec(cfg.seed, cfg.stream))
        row = dataclasses.asdict(rep)
        _emit(_kv(diag="lacunary", mean=rep.mean, stderr=rep.stderr, expected=rep.expected, bound=rep.bound,
                  matches_expected=str(rep.matches_expected).lower()))
    else:
        sample = sample_process(cfg.model(), cfg.degree, SeedSpec(cfg.seed, cfg.stream))
        stat = radius_statistic(sample, cfg.n0)
        row = {"statistic": stat, "N": cfg.degree, "n0": cfg.n0, "seed": cfg.seed, "stream": cfg.stream}
        _emit(_kv(diag="radius", statistic=stat, N=cfg.degree, n0=cfg.n0))
    _write_outputs(cfg, [row], tuple(row), row)
    return 0


def cmd_selftest(cfg):
    results = acceptance.run_all(cfg.seed, cfg.only, cfg.outdir, echo=_emit)
    failed = [r.number for r in results if not r.ok]
    _emit(f"selftest: {len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failing: {','.join(map(str, failed))}" if failed else ""))
    return 0 if not failed else 1


HANDLERS = {
    "norm": cmd_norm,
    "covnorm": cmd_covnorm,
    "sample": cmd_sample,
    "estimate": cmd_estimate,
    "verify": cmd_verify,
    "expint": cmd_expint,
    "sweep": cmd_sweep,
    "diag": cmd_diag,
    "selftest": cmd_selftest,
}


def main(argv=None):
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if ns.command is None:
        parser.print_usage(sys.stderr)
        return 1
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    try:
        file_values = load_config(ns.config) if getattr(ns, "config", None) else {}
        cfg = build_config(ns.command, file_values, flags)
        return HANDLERS[ns.command](cfg)
    except (ValidationError, NotACovarianceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NonConvergenceError as exc:
        print(f"error: {exc} (last estimate {fmt9(exc.last_estimate)})", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
