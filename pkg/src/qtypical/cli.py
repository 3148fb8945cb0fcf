"""Command-line driver: ``qtypical {moments,variance,mc,sweep,fit}``.

Every subcommand writes a CSV (or TSV) table with a header row.  Runs are
reproducible: the seed defaults to a fixed constant and Monte Carlo output
does not depend on ``--workers``.

Exit status: 0 success, 2 usage or precondition error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import math
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import numpy as np

from .ensemble import DEFAULT_SEED, SamplerConfig, make_window
from .fluctuations import mc_decomposition
from .fock import (
    DEFAULT_P_MAX,
    CapacityError,
    TwoModeSpace,
    build_observable,
    moment_matrix,
    oscillator_moment,
)
from .scaling import (
    DegenerateGridError,
    exact_case_variance,
    fit_expansion,
    scaling_sweep,
)

EXIT_USAGE = 2
EXIT_CAPACITY = 3


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def format_decimal(x) -> str:
    """Stable decimal text with about 10 significant digits.

    Integers print bare; values in [0.01, 1) keep 10 decimal places.
    """
    if x is None:
        return "nan"
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    if x == 0:
        return "0"
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    if abs(x) >= 1:
        return f"{x:.10g}"
    if abs(x) >= 1e-2:
        return np.format_float_positional(x, precision=10, unique=False, trim="-")
    return f"{x:.9e}"


def format_exact(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return ""


# ---------------------------------------------------------------- parsing


def _positive_int_list(text: str) -> list[int]:
    items = [t for t in text.replace(";", ",").split(",") if t.strip()]
    return [int(t) for t in items]


CONFIG_KEYS = {
    "nu": ("nu", int),
    "N": ("N", int),
    "N-list": ("N_list", str),
    "N_list": ("N_list", str),
    "k": ("k", int),
    "k-list": ("k_list", str),
    "k_list": ("k_list", str),
    "alpha": ("alpha", float),
    "c": ("c", float),
    "samples": ("samples", int),
    "seed": ("seed", int),
    "workers": ("workers", int),
    "out": ("out", str),
    "format": ("format", str),
    "plot": ("plot", str),
    "i": ("i", int),
    "j": ("j", int),
    "p-max": ("p_max", int),
    "p_max": ("p_max", int),
}


def read_config(path: str) -> dict:
    """Parse a ``key = value`` file (``#`` starts a comment)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError("--config", f"cannot read {path}: {exc.strerror}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError("--config", f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError("--config", f"{path}:{lineno}: unknown key {key!r}")
        dest, conv = CONFIG_KEYS[key]
        try:
            values[dest] = conv(value)
        except ValueError:
            raise UsageError("--config", f"{path}:{lineno}: bad value for {key!r}") from None
    return values


def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "tsv"), default="csv")
    p.add_argument("--config", help="key=value file; explicit flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtypical",
        allow_abbrev=False,
        description="Typicality of collective observables in a two-mode Bose gas.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", allow_abbrev=False, help="exact oscillator moments <phi_i|x^p|phi_j>")
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--p-max", dest="p_max", type=int, default=8)
    _common(p)

    p = sub.add_parser("variance", allow_abbrev=False, help="exact mean and variance of X_2nu on a window")
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--N", type=int, default=10)
    p.add_argument("--k", type=int, default=1)
    _common(p)

    p = sub.add_parser("mc", allow_abbrev=False, help="Monte Carlo decomposition with jackknife errors")
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    _common(p)

    p = sub.add_parser("sweep", allow_abbrev=False, help="ratio delta/mean along n = c N^alpha")
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--N-list", dest="N_list", default="100,1000,10000,100000,1000000")
    p.add_argument("--mc", dest="samples", type=int, default=0, metavar="SAMPLES",
                   help="also run Monte Carlo with this many samples per row")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot", help="write (log10 N, log10 ratio) plot data here")
    _common(p)

    p = sub.add_parser("fit", allow_abbrev=False, help="fit delta^2 to {N^2/4, n^2, N, 1}")
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--N-list", dest="N_list", default=",".join(str(N) for N in (200, 400, 800)))
    p.add_argument("--k-list", dest="k_list", default="2,5,10")
    _common(p)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        values = read_config(known.config)
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                sp.set_defaults(**values)
    return parser.parse_args(argv)


# ---------------------------------------------------------------- commands


def _require(cond: bool, flag: str, message: str):
    if not cond:
        raise UsageError(flag, message)


def _check_space(args):
    _require(args.N >= 0 and args.N % 2 == 0, "--N", f"N must be a non-negative even integer, got {args.N}")
    _require(args.k >= 0, "--k", f"k must be non-negative, got {args.k}")
    _require(args.k <= args.N // 2, "--k", f"half-width {args.k} exceeds N/2 = {args.N // 2}")


def _check_nu(args):
    _require(args.nu >= 1, "--nu", f"nu must be a positive integer, got {args.nu}")


def _parse_list(text: str, flag: str) -> list[int]:
    try:
        values = _positive_int_list(text)
    except ValueError:
        raise UsageError(flag, f"expected comma-separated integers, got {text!r}") from None
    _require(bool(values), flag, "list is empty")
    return values


def cmd_moments(args):
    _require(args.i in (0, 1), "--i", f"mode index must be 0 or 1, got {args.i}")
    _require(args.j in (0, 1), "--j", f"mode index must be 0 or 1, got {args.j}")
    _require(args.p_max >= 0, "--p-max", f"must be non-negative, got {args.p_max}")
    if args.p_max > DEFAULT_P_MAX:
        raise CapacityError(f"--p-max: {args.p_max} exceeds the exact-arithmetic bound {DEFAULT_P_MAX}")
    header = ["i", "j", "p", "exact", "numerator", "denominator", "sqrt2", "value"]
    rows = []
    for p in range(args.p_max + 1):
        m = oscillator_moment(args.i, args.j, p)
        c = m.coefficient
        rows.append([args.i, args.j, p, str(m), c.numerator, c.denominator,
                     int(m.root2 and c != 0), format_decimal(float(m))])
    return header, rows


def cmd_variance(args):
    _check_nu(args)
    _check_space(args)
    mean, dsq = exact_case_variance(args.nu, args.N, args.k)
    ratio = None if mean == 0 else math.sqrt(dsq) / abs(float(mean))
    header = ["nu", "N", "n", "mean", "delta_sq", "ratio", "mean_exact", "delta_sq_exact"]
    row = [args.nu, args.N, 2 * args.k + 1, format_decimal(mean), format_decimal(dsq),
           format_decimal(ratio), format_exact(mean), format_exact(dsq)]
    return header, [row]


def _config(args) -> SamplerConfig:
    return SamplerConfig(master_seed=args.seed)


def cmd_mc(args):
    _check_nu(args)
    _check_space(args)
    _require(args.samples >= 100, "--samples", f"need at least 100 samples, got {args.samples}")
    _require(args.workers >= 1, "--workers", f"must be at least 1, got {args.workers}")
    space = TwoModeSpace(args.N)
    rep = mc_decomposition(
        make_window(space, args.k),
        build_observable(space, moment_matrix(2 * args.nu)),
        _config(args),
        args.samples,
        workers=args.workers,
    )
    _, exact = exact_case_variance(args.nu, args.N, args.k)
    se = rep.stderr["delta_sq"]
    diff = rep.delta_sq - float(exact)
    z = diff / se if se > 0 else (0.0 if diff == 0 else math.copysign(math.inf, diff))
    header = ["nu", "N", "n", "samples", "seed", "delta_s_sq", "delta_s_sq_stderr",
              "delta_q_sq", "delta_q_sq_stderr", "sum", "sum_stderr", "exact_delta_sq",
              "exact_delta_sq_exact", "z_score"]
    row = [args.nu, args.N, 2 * args.k + 1, args.samples, args.seed,
           format_decimal(rep.delta_s_sq), format_decimal(rep.stderr["delta_s_sq"]),
           format_decimal(rep.delta_q_sq), format_decimal(rep.stderr["delta_q_sq"]),
           format_decimal(rep.delta_sq), format_decimal(se),
           format_decimal(exact), format_exact(exact), format_decimal(z)]
    return header, [row]


def cmd_sweep(args):
    _check_nu(args)
    _require(0 <= args.alpha <= 1, "--alpha", f"must lie in [0, 1], got {args.alpha}")
    _require(args.c > 0, "--c", f"must be positive, got {args.c}")
    N_list = _parse_list(args.N_list, "--N-list")
    for N in N_list:
        _require(N > 0 and N % 2 == 0, "--N-list", f"entries must be positive even integers, got {N}")
    _require(args.samples == 0 or args.samples >= 100, "--mc",
             f"need 0 or at least 100 samples, got {args.samples}")
    result = scaling_sweep(args.nu, args.alpha, args.c, N_list, mc_samples=args.samples,
                           config=_config(args), workers=args.workers)
    header = ["nu", "N", "k", "n", "method", "mean", "delta_sq", "ratio", "delta_sq_stderr"]
    rows = []
    for r in result.rows:
        se = r.stderr["delta_sq"] if r.stderr else None
        rows.append([r.nu, r.N, r.k, r.n, r.method, format_decimal(r.mean),
                     format_decimal(r.delta_sq), format_decimal(r.ratio),
                     "" if se is None else format_decimal(se)])
    if args.plot:
        lines = [
            f"{format_decimal(math.log10(r.N))} {format_decimal(math.log10(r.ratio))}"
            for r in result.exact_rows() if r.ratio
        ]
        Path(args.plot).write_text("\n".join(lines) + "\n")
    return header, rows


def cmd_fit(args):
    _check_nu(args)
    N_list = _parse_list(args.N_list, "--N-list")
    k_list = _parse_list(args.k_list, "--k-list")
    for N in N_list:
        _require(N >= 0 and N % 2 == 0, "--N-list", f"entries must be non-negative even integers, got {N}")
        for k in k_list:
            _require(0 <= k <= N // 2, "--k-list", f"half-width {k} exceeds N/2 = {N // 2}")
    try:
        fit = fit_expansion(args.nu, [(N, k) for N in N_list for k in k_list])
    except DegenerateGridError as exc:
        flag = "--N-list" if len(set(N_list)) < 3 else "--k-list"
        raise UsageError(flag, str(exc)) from None
    header = ["nu", "d20_fit", "d02_fit", "d20_exact", "d02_exact", "max_residual"]
    row = [args.nu, format_decimal(fit.d20), format_decimal(fit.d02),
           format_exact(fit.exact.d20), format_exact(fit.exact.d02),
           format_decimal(fit.max_residual)]
    return header, [row]


COMMANDS = {
    "moments": cmd_moments,
    "variance": cmd_variance,
    "mc": cmd_mc,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
}


@contextmanager
def _output(path):
    if path:
        with open(path, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def render(header, rows, fmt: str = "csv") -> str:
    sep = "," if fmt == "csv" else "\t"
    lines = [sep.join(header)] + [sep.join(str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        header, rows = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qtypical: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"qtypical: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except SystemExit as exc:
        return int(exc.code or 0)
    with _output(args.out) as fh:
        fh.write(render(header, rows, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
