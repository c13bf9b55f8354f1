"""Command line front end: ``specshift compute | verify | spline``.

Exit codes: 0 success, 2 invalid input, 3 a verification check failed,
4 the multilinear measure exceeded its atom budget.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .divdiff import NodeMultiset, spline_to_piecewise
from .errors import CapacityError, SpecShiftError
from .multimeasure import DEFAULT_ATOM_BUDGET
from .pair import Perturbation
from .piecewise import PiecewisePolynomial
from .verify import FAMILIES, run_verification

__all__ = [
    "JobConfig",
    "InputError",
    "read_matrix",
    "write_matrix",
    "read_pieces",
    "parse_grid",
    "parse_orders",
    "cmd_compute",
    "cmd_verify",
    "cmd_spline",
    "main",
]

EXIT_OK, EXIT_VALIDATION, EXIT_CHECK_FAILED, EXIT_CAPACITY = 0, 2, 3, 4


class InputError(ValueError):
    """Malformed command line value or input file."""


@dataclass
class JobConfig:
    """Everything a subcommand needs, already parsed and validated."""

    order: int = 2
    h0: str | None = None
    v: str | None = None
    grid: tuple | None = None
    out: str = "."
    fmt: str = "csv"
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    random: tuple | None = None
    wide_spectrum: float | None = None
    orders: tuple = (1, 2, 3, 4, 5)
    node_sets: int = 200
    atom_budget: int = DEFAULT_ATOM_BUDGET

    def __post_init__(self):
        if self.order < 1:
            raise InputError("order must be at least 1")
        if self.grid is not None and self.grid[2] < 2:
            raise InputError("grid needs at least 2 points")
        if self.fmt not in ("csv", "json"):
            raise InputError(f"unknown format {self.fmt!r}")


# ---------------------------------------------------------------------------
# parsing


def parse_grid(text):
    """``"MIN:MAX:N"`` -> ``(min, max, n)``."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise InputError(f"grid must look like MIN:MAX:N, got {text!r}") from None
    if n < 2 or not hi > lo:
        raise InputError("grid needs MAX > MIN and N >= 2")
    return lo, hi, n


def parse_orders(text):
    """``"1..5"`` or ``"1,3,4"`` -> sorted tuple of orders."""
    try:
        if ".." in text:
            a, b = text.split("..")
            out = tuple(range(int(a), int(b) + 1))
        else:
            out = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise InputError(f"orders must look like 1..5 or 1,2,3, got {text!r}") from None
    if not out or min(out) < 1:
        raise InputError("orders must be positive")
    return tuple(sorted(set(out)))


def parse_tolerance(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise InputError(f"tolerance override must be NAME=VALUE, got {text!r}")
    if name not in FAMILIES:
        raise InputError(f"unknown check family {name!r}")
    try:
        tol = float(value)
    except ValueError:
        raise InputError(f"tolerance for {name} is not a number") from None
    if not tol >= 0:
        raise InputError(f"tolerance for {name} must be nonnegative")
    return name, tol


def read_matrix(path):
    """Read ``{"dim": n, "re": [[...]], "im": [[...]]}``; ``im`` is optional."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read matrix file {path}: {exc}") from None
    if not isinstance(obj, dict) or "re" not in obj:
        raise InputError(f"{path}: expected an object with 're' (and optional 'im', 'dim')")
    try:
        re_ = np.array(obj["re"], dtype=float)
        im_ = np.array(obj.get("im", np.zeros_like(re_)), dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{path}: matrix entries must be numbers") from None
    n = obj.get("dim", re_.shape[0] if re_.ndim else 0)
    if re_.shape != (n, n) or im_.shape != (n, n):
        raise InputError(f"{path}: 're' and 'im' must both be {n} x {n}")
    return re_ + 1j * im_


def write_matrix(path, M):
    M = np.asarray(M, dtype=complex)
    obj = {"dim": M.shape[0], "re": M.real.tolist(), "im": M.imag.tolist()}
    Path(path).write_text(json.dumps(obj) + "\n")


def read_pieces(path):
    """Load densities written by ``compute`` (``pieces.csv`` or ``densities.json``).

    Returns
    -------
    dict
        order -> :class:`PiecewisePolynomial`. Orders whose density is
        identically zero have no rows in the CSV form and are absent.
    """
    path = Path(path)
    if path.suffix == ".json":
        obj = json.loads(path.read_text())
        out = {}
        for d in obj["densities"]:
            c = np.array(d["coefficients"], dtype=float)
            out[d["order"]] = PiecewisePolynomial(d["breakpoints"], c if c.size else np.zeros((0, 1)))
        return out
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            order = int(row[0])
            rows.setdefault(order, []).append([float(x) for x in row[2:]])
    out = {}
    for order, rs in rows.items():
        rs = [r for r in rs if r]
        if not rs or len(rs[0]) == 0:
            out[order] = PiecewisePolynomial.zero()
            continue
        bps = [r[0] for r in rs] + [rs[-1][1]]
        out[order] = PiecewisePolynomial(bps, np.array([r[2:] for r in rs]))
    return out


# ---------------------------------------------------------------------------
# output helpers


def _fmt(x):
    x = float(x)
    return repr(x) if math.isfinite(x) else str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([v if isinstance(v, str) else _fmt(v) if isinstance(v, float) else v for v in r])


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")


def _grid(config):
    lo, hi, n = config.grid
    return np.linspace(lo, hi, n)


def _piece_rows(order, P, width):
    rows = []
    for k in range(P.n_intervals):
        c = [float(v) for v in np.real(P.coefficients[k])]
        c += [0.0] * (width - len(c))
        rows.append([order, k, float(P.breakpoints[k]), float(P.breakpoints[k + 1]), *c])
    return rows


def _pieces_dict(P):
    return {"breakpoints": [float(b) for b in P.breakpoints],
            "coefficients": [[float(v) for v in np.real(r)] for r in P.coefficients],
            "left_tail": float(np.real(P.left_tail)), "right_tail": float(np.real(P.right_tail))}


# ---------------------------------------------------------------------------
# commands


def _load_pair(config):
    if config.h0 is None or config.v is None:
        raise InputError("both --h0 and --v are required")
    return Perturbation(read_matrix(config.h0), read_matrix(config.v), atom_budget=config.atom_budget)


def cmd_compute(config):
    """Write ``eta_1 .. eta_p`` exactly, on a grid, with masses and targets.

    Returns the list of written paths.
    """
    from .ssf_engine import eta_sequence
    pair = _load_pair(config)
    etas = eta_sequence(pair, None, config.order)
    Vm = pair.V.matrix
    Vk = np.eye(pair.dim, dtype=complex)
    targets = []
    for k in range(1, config.order + 1):
        Vk = Vk @ Vm
        targets.append(float(np.trace(Vk).real) / math.factorial(k))
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if config.fmt == "json":
        obj = {"order": config.order,
               "densities": [{"order": S.order, "mass": S.mass, "target": targets[S.order - 1],
                              **_pieces_dict(S.density)} for S in etas]}
        if config.grid is not None:
            t = _grid(config)
            obj["samples"] = {"t": [float(x) for x in t],
                              **{f"eta_{S.order}": [float(v) for v in np.real(S(t))] for S in etas}}
        path = out / "densities.json"
        _write_json(path, obj)
        return [path]
    width = max(S.density.coefficients.shape[1] for S in etas)
    rows = [r for S in etas for r in _piece_rows(S.order, S.density, width)]
    path = out / "pieces.csv"
    _write_csv(path, ["order", "interval", "left", "right", *[f"c{j}" for j in range(width)]], rows)
    written.append(path)
    path = out / "masses.csv"
    _write_csv(path, ["order", "mass", "target"],
               [[S.order, float(S.mass), targets[S.order - 1]] for S in etas])
    written.append(path)
    if config.grid is not None:
        t = _grid(config)
        cols = [np.real(S(t)) for S in etas]
        path = out / "samples.csv"
        _write_csv(path, ["t", *[f"eta_{S.order}" for S in etas]],
                   [[float(t[i]), *[float(c[i]) for c in cols]] for i in range(t.size)])
        written.append(path)
    return written


def cmd_verify(config, progress=None):
    """Run the verification suite and write ``report.json`` and ``timings.json``.

    Returns the :class:`~specshift.verify.VerificationReport`.
    """
    t0 = time.perf_counter()
    kwargs = dict(orders=config.orders, seed=config.seed, tolerances=config.tolerances,
                  suite_count=config.node_sets, wide_scale=config.wide_spectrum, progress=progress)
    if config.random is not None:
        count, dim = config.random
        report = run_verification(count=count, dims=(2, max(dim, 2)), **kwargs)
    else:
        pair = _load_pair(config)
        report = run_verification(pairs=[(pair, None)], **kwargs)
    elapsed = time.perf_counter() - t0
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "report.json", report.to_dict())
    _write_json(out / "timings.json", {"wall_seconds": elapsed})
    return report


def cmd_spline(nodes, kind, config):
    """Samples, exact pieces and the integral of a spline kernel.

    Returns the integral (``None`` for the cumulative kernel, whose left
    tail is 1).
    """
    nodes = NodeMultiset.coerce(nodes)
    P = spline_to_piecewise(nodes, kind)
    integral = float(np.real(P.integral())) if kind == "basic" else None
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    t = _grid(config) if config.grid is not None else None
    if config.fmt == "json":
        obj = {"kind": kind, "nodes": [float(x) for x in nodes.nodes], "integral": integral,
               **_pieces_dict(P)}
        if t is not None:
            obj["samples"] = {"t": [float(x) for x in t], "value": [float(v) for v in np.real(P(t))]}
        _write_json(out / "spline.json", obj)
        return integral
    width = max(P.coefficients.shape[1], 1)
    _write_csv(out / "pieces.csv", ["order", "interval", "left", "right", *[f"c{j}" for j in range(width)]],
               _piece_rows(nodes.n - 1, P, width))
    _write_csv(out / "summary.csv", ["key", "value"],
               [["kind", kind], ["nodes", " ".join(_fmt(x) for x in nodes.nodes)],
                ["left_tail", float(np.real(P.left_tail))], ["right_tail", float(np.real(P.right_tail))],
                ["integral", "" if integral is None else integral]])
    if t is not None:
        _write_csv(out / "samples.csv", ["t", "value"],
                   [[float(a), float(b)] for a, b in zip(t, np.real(P(t)))])
    return integral


# ---------------------------------------------------------------------------
# argument parsing


def _parser():
    p = argparse.ArgumentParser(prog="specshift",
                                description="Higher-order spectral shift densities for Hermitian matrix pairs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default=".", help="output directory (default: current)")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        sp.add_argument("--grid", help="sample grid MIN:MAX:N")

    c = sub.add_parser("compute", help="write eta_1 .. eta_p for a matrix pair")
    c.add_argument("--order", "-p", type=int, default=2)
    c.add_argument("--h0", required=True, help="matrix JSON file for H0")
    c.add_argument("--v", required=True, help="matrix JSON file for V")
    c.add_argument("--atom-budget", type=int, default=DEFAULT_ATOM_BUDGET)
    common(c)

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--h0")
    v.add_argument("--v")
    v.add_argument("--random", nargs=2, type=int, metavar=("COUNT", "DIM"),
                   help="COUNT seeded pairs with dimensions cycling through 2..DIM")
    v.add_argument("--orders", default="1..5")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")
    v.add_argument("--wide-spectrum", type=float, metavar="SCALE")
    v.add_argument("--node-sets", type=int, default=200,
                   help="random node sets for the spline and transform suites")
    v.add_argument("--atom-budget", type=int, default=DEFAULT_ATOM_BUDGET)
    v.add_argument("--out", default=".")
    v.add_argument("--quiet", action="store_true")

    s = sub.add_parser("spline", help="sample a basic or cumulative spline kernel")
    s.add_argument("--nodes", required=True, help="comma separated nodes, e.g. 0,1,3")
    s.add_argument("--kind", choices=("basic", "cumulative"), default="basic")
    common(s)
    return p


def _config(args):
    kw = {"out": args.out}
    if getattr(args, "grid", None):
        kw["grid"] = parse_grid(args.grid)
    for name in ("fmt", "order", "h0", "v", "seed", "atom_budget", "node_sets"):
        if getattr(args, name, None) is not None:
            kw[name] = getattr(args, name)
    if args.command == "verify":
        kw["orders"] = parse_orders(args.orders)
        kw["tolerances"] = dict(parse_tolerance(t) for t in args.tol)
        kw["wide_spectrum"] = args.wide_spectrum
        if args.random is not None:
            count, dim = args.random
            if count < 1 or dim < 1:
                raise InputError("--random needs positive COUNT and DIM")
            kw["random"] = (count, dim)
        elif args.h0 is None or args.v is None:
            raise InputError("verify needs --random COUNT DIM or both --h0 and --v")
        if args.wide_spectrum is not None and not args.wide_spectrum > 0:
            raise InputError("--wide-spectrum must be positive")
    return JobConfig(**kw)


def _join_negative_values(argv):
    # "--grid -1:1:5" would otherwise read the value as an option
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--grid":
            val = next(it, None)
            out.append(tok if val is None else f"{tok}={val}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = _parser().parse_args(_join_negative_values(argv))
    try:
        config = _config(args)
        if args.command == "compute":
            for path in cmd_compute(config):
                print(path)
            return EXIT_OK
        if args.command == "verify":
            report = cmd_verify(config)
            s = report.summary()
            if not args.quiet:
                for name, fam in s["families"].items():
                    print(f"{name:32s} {fam['passed']:6d}/{fam['checks']:<6d} max rel {fam['max_rel_error']:.2e}")
            print(f"{s['passed']}/{s['checks']} checks passed; report in {Path(config.out) / 'report.json'}")
            return EXIT_OK if report.passed else EXIT_CHECK_FAILED
        try:
            nodes = [float(x) for x in args.nodes.split(",") if x.strip()]
        except ValueError:
            raise InputError(f"nodes must be comma separated numbers, got {args.nodes!r}") from None
        integral = cmd_spline(nodes, args.kind, config)
        print(f"integral: {'n/a (cumulative kernel)' if integral is None else _fmt(integral)}")
        return EXIT_OK
    except CapacityError as exc:
        print(f"specshift: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, SpecShiftError, ValueError) as exc:
        print(f"specshift: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
