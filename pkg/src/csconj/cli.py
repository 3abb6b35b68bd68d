"""
Command-line interface.

Subcommands: ``fit``, ``sample``, ``evidence``, ``test-ri`` and ``em``.
Reports are JSON on stdout (or ``--output``); sample dumps are CSV.
Failures print one line on stderr, ``csconj: error[<kind>]: <message>``,
and exit with 2 (usage or invalid argument), 3 (data) or 4 (numeric).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, datasets
from .conjugate import (
    MeanPrecisionPrior,
    MeanVariancePrior,
    PrecisionPrior,
    VariancePrior,
    log_evidence_known_mean,
    sample_eta,
    sample_mean_precision,
    sample_mean_variance,
    sample_sigma,
    suff_stats_known_mean,
    suff_stats_unknown_mean,
    update_mean_precision_prior,
    update_mean_variance_prior,
    update_precision_prior,
    update_variance_prior,
)
from .errors import CsError, DataError, NumericError
from .intercept import PRIOR_NAMES, GibbsConfig, Method, em_fit, test_positivity
from .io import ingest_grouped_csv, ingest_matrix_csv
from .rng import RngStream

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
FAMILIES = ("eta", "sigma", "mean-eta", "mean-sigma")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------- report


@dataclass
class Report:
    """Machine-readable result of one command."""

    command: str
    config: dict
    results: dict
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {"command": self.command, "config": self.config, "results": self.results, "provenance": self.provenance},
            indent=2,
            sort_keys=True,
            allow_nan=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "Report":
        obj = json.loads(text)
        return cls(obj["command"], obj["config"], obj["results"], obj["provenance"])


def _provenance(seed=None) -> dict:
    return {
        "version": __version__,
        "seed": seed,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "value") and not isinstance(value, (int, float, str, bool)):
        return value.value
    return value


# -------------------------------------------------------------- arg parsing


def _floats(n=None):
    def parse(text):
        try:
            vals = [float(t) for t in text.split(",") if t.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
        if n is not None and len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} values, got {len(vals)}")
        return vals

    return parse


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _add_prior_flags(p):
    g = p.add_argument_group("prior hyperparameters")
    g.add_argument("--alpha", type=_floats(2), default=[1.0, 1.0], help="shapes alpha1,alpha2 (eta, sigma)")
    g.add_argument("--lambda", dest="lam", type=_floats(2), default=[1.0, 1.0],
                   help="rates lambda1,lambda2 (eta, sigma, mean-sigma)")
    g.add_argument("--m-h", type=float, default=1.0, help="m_H (mean-eta)")
    g.add_argument("--beta", type=_floats(2), default=[1.0, 0.0], help="beta1,beta2 (mean-eta)")
    g.add_argument("--m-sigma", type=float, default=1.0, help="m_Sigma (mean-sigma)")
    g.add_argument("--m-mu", type=float, default=1.0, help="m_mu (mean-eta, mean-sigma)")
    g.add_argument("--nu", type=_floats(), default=None, help="prior mean nu (default zeros)")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="csconj", description="Conjugate inference for compound-symmetric Gaussian models.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--args-file", metavar="FILE", help="read additional arguments from FILE (shell syntax)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="posterior hyperparameters from matrix data")
    f.add_argument("data", type=Path, help="CSV, one observation per row")
    f.add_argument("--family", choices=FAMILIES, default="eta")
    f.add_argument("--known-mean", type=_floats(), default=None, help="known mean for eta/sigma (default zeros)")
    f.add_argument("--d", type=int, default=None, help="dimension (needed when the file has no rows)")
    _add_prior_flags(f)
    f.add_argument("-o", "--output", type=Path)
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("sample", help="prior or posterior draws as CSV")
    s.add_argument("--family", choices=FAMILIES, default="eta")
    s.add_argument("--d", type=int, default=None)
    s.add_argument("--data", type=Path, help="condition on this matrix CSV")
    s.add_argument("--known-mean", type=_floats(), default=None)
    s.add_argument("--count", type=_nonneg_int, default=1000)
    s.add_argument("--seed", type=_nonneg_int, default=0)
    s.add_argument("--stream", type=_nonneg_int, default=0)
    _add_prior_flags(s)
    s.add_argument("-o", "--output", type=Path)
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("evidence", help="log evidence of the known-mean precision model")
    e.add_argument("data", type=Path)
    e.add_argument("--known-mean", type=_floats(), default=None)
    e.add_argument("--d", type=int, default=None)
    _add_prior_flags(e)
    e.add_argument("-o", "--output", type=Path)
    e.set_defaults(func=cmd_evidence)

    t = sub.add_parser("test-ri", help="posterior probability that the random-intercept variance is <= 0")
    t.add_argument("data", help=f"grouped CSV, or a bundled dataset ({', '.join(datasets.NAMES)}, optionally with .csv)")
    t.add_argument("--modified", action="store_true", help="drop the bundled removal list to unbalance the data")
    t.add_argument("--method", choices=["auto", "direct", "gibbs", "quadrature"], default="auto")
    t.add_argument("--prior", choices=PRIOR_NAMES, default="conjugate-limit")
    t.add_argument("--burn-in", type=_nonneg_int, default=1000)
    t.add_argument("--samples", type=_nonneg_int, default=100_000)
    t.add_argument("--seed", type=_nonneg_int, default=0)
    t.add_argument("--init", choices=["em", "prior"], default="em")
    t.add_argument("--oracle", action="store_true", help="add the quadrature value")
    t.add_argument("-o", "--output", type=Path)
    t.set_defaults(func=cmd_test_ri)

    m = sub.add_parser("em", help="EM estimates for grouped data")
    m.add_argument("data")
    m.add_argument("--modified", action="store_true")
    m.add_argument("--tol", type=float, default=1e-9)
    m.add_argument("--max-iter", type=_nonneg_int, default=10_000)
    m.add_argument("--ddof", type=int, choices=[0, 1], default=0)
    m.add_argument("-o", "--output", type=Path)
    m.set_defaults(func=cmd_em)
    return p


def expand_args_file(argv: list[str]) -> list[str]:
    """Splice the contents of every ``--args-file FILE`` into ``argv``."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        path = None
        if a == "--args-file":
            if i + 1 >= len(argv):
                raise UsageError("--args-file needs a path")
            path = argv[i + 1]
            i += 2
        elif a.startswith("--args-file="):
            path = a.split("=", 1)[1]
            i += 1
        else:
            out.append(a)
            i += 1
            continue
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read args file {path}: {exc.strerror}") from None
        out.extend(expand_args_file(shlex.split(text, comments=True)))
    return out


# ------------------------------------------------------------------ helpers


def _vector(values, d, name):
    if values is None:
        return np.zeros(d)
    if len(values) != d:
        raise UsageError(f"{name} has {len(values)} entries, expected {d}")
    return np.asarray(values, dtype=float)


def _load_matrix(path, d):
    x = ingest_matrix_csv(path, d)
    if x.shape[1] < 2:
        raise DataError(f"{path}: need at least 2 columns, got {x.shape[1]}")
    return x


def _build_prior(args, d):
    fam = args.family
    if fam == "eta":
        return PrecisionPrior(d, *args.alpha, *args.lam)
    if fam == "sigma":
        return VariancePrior(d, *args.alpha, *args.lam)
    nu = _vector(args.nu, d, "--nu")
    if fam == "mean-eta":
        return MeanPrecisionPrior(d, args.m_h, *args.beta, args.m_mu, nu)
    return MeanVariancePrior(d, args.m_sigma, *args.lam, args.m_mu, nu)


def _prior_dict(prior) -> dict:
    out = {"type": type(prior).__name__}
    for k, v in vars(prior).items():
        out[k] = v.tolist() if isinstance(v, np.ndarray) else v
    return out


def _posterior(prior, x, args):
    if isinstance(prior, (PrecisionPrior, VariancePrior)):
        mu = _vector(args.known_mean, prior.d, "--known-mean")
        s = suff_stats_known_mean(x, mu)
        upd = update_precision_prior if isinstance(prior, PrecisionPrior) else update_variance_prior
        return upd(prior, s), s.n
    s = suff_stats_unknown_mean(x, prior.d)
    upd = update_mean_precision_prior if isinstance(prior, MeanPrecisionPrior) else update_mean_variance_prior
    return upd(prior, s), s.n


def _config(args) -> dict:
    return _jsonable({k: v for k, v in vars(args).items() if k not in ("func", "output", "args_file")})


def _emit(text: str, output):
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")


def _grouped(args):
    path = Path(args.data)
    if not path.exists() and path.stem in datasets.NAMES and path.suffix in ("", ".csv"):
        data = datasets.load(path.stem)
    else:
        data = ingest_grouped_csv(args.data)
    return datasets.remove_entries(data) if args.modified else data


def _dim(args, x_path=None):
    if x_path is not None:
        x = _load_matrix(x_path, args.d)
        return x.shape[1], x
    if args.d is None:
        raise UsageError("--d is required without --data")
    return args.d, None


# ----------------------------------------------------------------- commands


def cmd_fit(args) -> int:
    d, x = _dim(args, args.data)
    prior = _build_prior(args, d)
    post, n = _posterior(prior, x, args)
    results = {"n": n, "prior": _prior_dict(prior), "posterior": _prior_dict(post)}
    _emit(Report("fit", _config(args), _jsonable(results), _provenance()).to_json(), args.output)
    return EXIT_OK


def cmd_sample(args) -> int:
    d, x = _dim(args, args.data)
    prior = _build_prior(args, d)
    if x is not None:
        prior, _ = _posterior(prior, x, args)
    rng = RngStream(args.seed, args.stream)
    fam = args.family
    if fam == "eta":
        header, rows = ["eta1", "eta2"], sample_eta(prior, rng, args.count)
    elif fam == "sigma":
        header, rows = ["sigma1", "sigma2"], sample_sigma(prior, rng, args.count)
    else:
        sampler = sample_mean_precision if fam == "mean-eta" else sample_mean_variance
        mus, pairs = sampler(prior, rng, args.count)
        names = ["eta1", "eta2"] if fam == "mean-eta" else ["sigma1", "sigma2"]
        header = [f"mu{i + 1}" for i in range(d)] + names
        rows = np.hstack([mus, pairs]) if args.count else np.zeros((0, d + 2))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_evidence(args) -> int:
    x = _load_matrix(args.data, args.d)
    d = x.shape[1]
    prior = PrecisionPrior(d, *args.alpha, *args.lam)
    s = suff_stats_known_mean(x, _vector(args.known_mean, d, "--known-mean"))
    results = {"n": s.n, "prior": _prior_dict(prior), "log_evidence": log_evidence_known_mean(prior, s)}
    _emit(Report("evidence", _config(args), _jsonable(results), _provenance()).to_json(), args.output)
    return EXIT_OK


def cmd_test_ri(args) -> int:
    data = _grouped(args)
    if args.samples < 1 and args.method != "quadrature":
        raise UsageError("--samples must be >= 1")
    config = GibbsConfig(burn_in=args.burn_in, samples=max(args.samples, 1), seed=args.seed,
                         init=args.init, prior=args.prior)
    method = None if args.method == "auto" else Method(args.method)
    report = test_positivity(data, config, method=method, oracle=args.oracle)
    results = report.to_dict()
    results["groups"] = {"J": data.J, "sizes": data.sizes.tolist(), "grand_mean": data.grand_mean}
    _emit(Report("test-ri", _config(args), _jsonable(results), _provenance(args.seed)).to_json(), args.output)
    return EXIT_OK


def cmd_em(args) -> int:
    data = _grouped(args)
    res = em_fit(data, tol=args.tol, max_iter=args.max_iter, ddof=args.ddof)
    _emit(Report("em", _config(args), _jsonable(res.to_dict()), _provenance()).to_json(), args.output)
    return EXIT_OK


# --------------------------------------------------------------------- main


def _fail(kind: str, message: str, code: int) -> int:
    one_line = " ".join(str(message).split())
    print(f"csconj: error[{kind}]: {one_line}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(expand_args_file(argv))
        return args.func(args)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except DataError as exc:
        return _fail("data", exc, EXIT_DATA)
    except NumericError as exc:
        return _fail("numeric", exc, EXIT_NUMERIC)
    except CsError as exc:
        return _fail(type(exc).__name__, exc, EXIT_USAGE)
