"""Command-line front end: build family members, verify them, sweep parameters.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 I/O error.

Examples::

    shrinktori verify --family clifford
    shrinktori build --family anciaux --p 1 --q 3 --out anciaux.csv
    shrinktori sweep --family lee-wang --sweep "m=1,n=1;m=1,n=2"
"""

import argparse
import dataclasses
import io
import logging
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import grid as G
from . import tori, verify
from .errors import InadmissibleParameterError, ShrinkToriError

logger = logging.getLogger("shrinktori")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3

# parameters each family accepts; integers except alpha, which stays an exact "a/b" string
FAMILY_PARAMS = {
    "clifford": (),
    "sphere": (),
    "lee-wang": ("m", "n"),
    "lawson": ("alpha",),
    "anciaux": ("p", "q"),
    "abresch-langer": ("p", "q", "p2", "q2"),
}
INT_PARAMS = ("m", "n", "p", "q", "p2", "q2")
CONFIG_KEYS = ("family", "grid", "tol", "format", "out", "sweep") + INT_PARAMS + ("alpha",)
MIN_RESOLUTION = 8


class UsageError(ValueError):
    pass


@dataclasses.dataclass
class RunConfig:
    command: str
    family: str
    params: dict
    grid: tuple = None
    tol: float = None
    fmt: str = "json"
    out: str = None
    sweep: list = None


# -- parsing -----------------------------------------------------------------

def parse_grid(text):
    """'NxM' -> (N, M); both must be even and at least 8."""
    match = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", str(text))
    if not match:
        raise UsageError(f"grid must look like NxM, got {text!r}")
    shape = int(match.group(1)), int(match.group(2))
    if min(shape) < MIN_RESOLUTION or any(n % 2 for n in shape):
        raise UsageError(f"grid resolution must be even and >= {MIN_RESOLUTION}, got {text!r}")
    return shape


def coerce_param(key, value):
    if key in INT_PARAMS:
        try:
            return int(str(value).strip())
        except ValueError:
            raise UsageError(f"{key} must be an integer, got {value!r}") from None
    if key == "alpha":
        tori.parse_fraction(value)   # validate early, keep the exact string
        return str(value).strip()
    raise UsageError(f"unknown parameter {key!r}")


def parse_sweep(text, family):
    """'m=1,n=2;m=1,n=3' -> [{'m': 1, 'n': 2}, {'m': 1, 'n': 3}]; empty text -> []."""
    points = []
    for chunk in (text or "").split(";"):
        if not chunk.strip():
            continue
        point = {}
        for item in chunk.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or not key:
                raise UsageError(f"bad sweep item {item!r}; expected key=value")
            point[key] = coerce_param(key, value)
        check_params(family, point)
        points.append(point)
    return points


def check_params(family, params):
    if family not in tori.REGISTRY:
        raise KeyError(f"unknown family {family!r}; choose from {sorted(tori.REGISTRY)}")
    extra = set(params) - set(FAMILY_PARAMS[family])
    if extra:
        raise UsageError(f"{family} does not take {sorted(extra)}")


def read_config(path):
    """Flat ``key = value`` file; blank lines and ``#`` comments are ignored."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().lstrip("-").replace("-", "_")
            if not sep or key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unrecognized line {line!r}")
            values[key] = value.strip()
    return values


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--family", help=f"one of {', '.join(tori.REGISTRY)}")
    for key in INT_PARAMS:
        common.add_argument(f"--{key}")
    common.add_argument("--alpha", help="Lawson parameter as an exact 'a/b' string")
    common.add_argument("--grid", help="resolution NxM, even and >= 8")
    common.add_argument("--tol", help="override the pointwise zero tolerance")
    common.add_argument("--format", dest="format", choices=("json", "csv"))
    common.add_argument("--out", help="output path (default: stdout, or <family>.csv for build)")
    common.add_argument("--sweep", help="parameter points, e.g. 'm=1,n=2;m=1,n=3'")
    common.add_argument("-q", "--quiet", action="store_true", help="only log warnings")

    parser = argparse.ArgumentParser(prog="shrinktori", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="write surface (and profile curve) CSV data")
    sub.add_parser("verify", parents=[common], help="run the identity suite and classify")
    sub.add_parser("sweep", parents=[common], help="verify a list of parameter points, CSV out")
    return parser


def make_config(args):
    raw = read_config(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        value = getattr(args, key)
        if value is not None:
            raw[key] = value
    family = raw.get("family")
    if not family:
        raise UsageError("--family is required")
    params = {k: coerce_param(k, raw[k]) for k in INT_PARAMS + ("alpha",) if k in raw}
    check_params(family, params)
    tol = None
    if "tol" in raw:
        try:
            tol = float(raw["tol"])
        except ValueError:
            raise UsageError(f"tolerance must be a number, got {raw['tol']!r}") from None
        if not tol > 0 or not math.isfinite(tol):
            raise UsageError(f"tolerance must be positive, got {raw['tol']!r}")
    fmt = raw.get("format") or ("csv" if args.command == "sweep" else "json")
    if fmt not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {fmt!r}")
    sweep = parse_sweep(raw.get("sweep", ""), family) if args.command == "sweep" else None
    return RunConfig(command=args.command, family=family, params=params,
                     grid=parse_grid(raw["grid"]) if "grid" in raw else None,
                     tol=tol, fmt=fmt, out=raw.get("out"), sweep=sweep)


# -- helpers -----------------------------------------------------------------

def make_grid(immersion, shape=None):
    default = immersion.default_grid()
    return default if shape is None else dataclasses.replace(default, shape=tuple(shape))


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")
        logger.info("wrote %s", out)


def _num(x):
    if isinstance(x, bool):
        return str(int(x))
    if x is None or x == "n/a":
        return "nan"
    if isinstance(x, str):
        return str(float(tori.parse_fraction(x)))
    return format(float(x), ".17g")


SCALAR_COLUMNS = (
    [f"residual_{k}" for k in verify.RESIDUAL_KEYS]
    + [f"{k}_{end}" for k in verify.RANGE_KEYS for end in ("min", "max")]
    + list(verify.INTEGRAL_KEYS)
    + ["genus", "maslov_u", "maslov_v", "lagrangian", "clifford", "consistent", "failures"])


def scalar_row(report):
    d = report.to_dict()
    maslov = report.maslov or [None, None]
    row = [d["residuals"][k] for k in verify.RESIDUAL_KEYS]
    row += [v for k in verify.RANGE_KEYS for v in d["ranges"][k]]
    row += [d["integrals"][k] for k in verify.INTEGRAL_KEYS]
    row += [report.genus, maslov[0], maslov[1], report.flags["lagrangian"],
            report.conclusion == verify.CLIFFORD, report.consistent, len(report.failures)]
    return [_num(x) for x in row]


def _passed(report):
    return not report.failures and bool(report.consistent)


def run_verify(family, params, shape=None, tol=None):
    immersion = tori.build(family, **params)
    return verify.verify(immersion, make_grid(immersion, shape), zero_tol=tol)


# -- commands ----------------------------------------------------------------

def write_surface_csv(fh, surface):
    fh.write("u,v,x1,y1,x2,y2\n")
    U, V = surface.jet.u.ravel(), surface.jet.v.ravel()
    P = surface.jet.phi.reshape(-1, 4)
    for u, v, p in zip(U, V, P):
        fh.write(",".join(format(float(x), ".17g") for x in (u, v, *p)) + "\n")


def cmd_build(config):
    immersion = tori.build(config.family, **config.params)
    surface = G.sample(immersion, make_grid(immersion, config.grid))
    out = Path(config.out or f"{config.family}.csv")
    curves = getattr(immersion, "curves", ())
    closure = max((c.closure_error for c in curves), default=immersion.closure_error(surface.grid))
    logger.info("%s %s: closure error %.3e", config.family, config.params, closure)
    files = [out]
    with open(out, "w", encoding="utf-8") as fh:
        write_surface_csv(fh, surface)
    for i, curve in enumerate(curves, 1):
        suffix = "_curve" if len(curves) == 1 else f"_curve{i}"
        path = out.with_name(out.stem + suffix + out.suffix)
        with open(path, "w", encoding="utf-8") as fh:
            curve.write_csv(fh)
        files.append(path)
    for path in files:
        logger.info("wrote %s", path)
    if config.fmt == "json":
        summary = {"family": config.family, "params": config.params,
                   "grid": list(surface.grid.shape), "closure_error": closure,
                   "files": [str(p) for p in files]}
        sys.stdout.write(verify.to_json(summary) + "\n")
    return EXIT_OK


def cmd_verify(config):
    report = run_verify(config.family, config.params, config.grid, config.tol)
    if config.fmt == "json":
        text = verify.to_json(report) + "\n"
    else:
        params = list(FAMILY_PARAMS[config.family])
        row = [config.family] + [_num(config.params.get(k)) for k in params] + scalar_row(report)
        text = ",".join(["family"] + params + SCALAR_COLUMNS) + "\n" + ",".join(row) + "\n"
    _emit(text, config.out)
    for failure in report.failures:
        logger.warning("check failed: %s", failure)
    logger.info("conclusion: %s (consistent: %s)", report.conclusion, report.consistent)
    return EXIT_OK if _passed(report) else EXIT_FAIL


def cmd_sweep(config, workers=4):
    points = config.sweep
    names = [k for k in FAMILY_PARAMS[config.family] if any(k in p for p in points)]

    def one(point):
        return run_verify(config.family, point, config.grid, config.tol)

    with ThreadPoolExecutor(max_workers=max(1, min(workers, len(points)))) as pool:
        reports = list(pool.map(one, points))   # map keeps input order
    buf = io.StringIO()
    buf.write(",".join(["family"] + names + SCALAR_COLUMNS) + "\n")
    for point, report in zip(points, reports):
        buf.write(",".join([config.family] + [_num(point.get(k)) for k in names]
                           + scalar_row(report)) + "\n")
    _emit(buf.getvalue(), config.out)
    return EXIT_OK if all(_passed(r) for r in reports) else EXIT_FAIL


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = make_config(args)
        return COMMANDS[config.command](config)
    except (UsageError, InadmissibleParameterError, KeyError) as exc:
        logger.error("invalid input: %s", exc.args[0] if exc.args else exc)
        return EXIT_INPUT
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO
    except ShrinkToriError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
