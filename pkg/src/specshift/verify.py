"""Verification runner: every identity of the package as a named check.

Each check produces a :class:`CheckRecord`. Records are grouped into
families (the part of the name before the first ``/``); tolerances are set
per family and can be overridden. A record passes when its relative error
is at most the tolerance; for checks with a zero reference the relative
error is the absolute error.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .cauchy import (MeasureSpec, cauchy_derivative, cauchy_transform, integration_by_parts_check,
                     log_boundary_value, stieltjes_invert)
from .divdiff import (NodeMultiset, _recursive_rows, basic_spline, cumulative_spline_kernel, divided_difference,
                      divided_difference_resolvent, spline_to_piecewise)
from .ensembles import ensemble
from .errors import DomainError
from .functions import Exponential, Polynomial, ResolventPower, f_z
from .multimeasure import resolvent_power_trace
from .operator_core import resolvent
from .pair import EXTENDED_DPS, Perturbation
from .taylor_remainder import (fd_derivative, fd_remainder_trace, gateaux_trace, remainder_operator,
                        _mp_divided_difference, remainder_trace, trace_path, FD_DPS)
from .ssf_engine import asymptotics_report, eta_sequence, trace_formula_rhs

__all__ = [
    "FAMILIES",
    "CheckRecord",
    "VerificationReport",
    "pair_checks",
    "spline_checks",
    "divdiff_checks",
    "cauchy_checks",
    "random_node_sets",
    "run_verification",
    "WIDE_TOLERANCE",
]

# family -> (anchor, default tolerance)
FAMILIES = {
    "trace_formula": ("higher-order trace formula: tr R_p(f) = int f^(p) eta_p", 1e-7),
    "krein_trace_formula": ("Krein trace formula: order 1 with xi from counting functions", 1e-7),
    "koplienko_trace_formula": ("Koplienko trace formula: order 2", 1e-7),
    "mass_identity": ("total mass of eta_p dt equals tr(V^p)/p!", 1e-9),
    "tail_asymptotics": ("eta_p vanishes at -inf; right limit equals the mass defect", 0.0),
    "breakpoint_structure": ("eta_p is piecewise polynomial of degree <= p-1 on spec(H0) u spec(H0+V)", 0.0),
    "resolvent_power_identity": ("tr((R V)^p) as the multilinear integral of [l_1..l_p] f_z", 1e-10),
    "remainder_recursion": ("R_{p+1}(f_z) = R_p(f_z) - (R V)^p R as matrices", 1e-11),
    "method_agreement": ("spectral and multilinear remainder traces agree", 1e-9),
    "transform_recursion": ("(-1)^p tr R_p(f_z) = G^(p) of eta_p dt", 1e-8),
    "transform_recursion_second": ("second line: -G^(p) + ((-1)^(p+1)/p) d/dz tr((R V)^p)", 1e-8),
    "fd_oracle": ("finite-difference remainder oracle vs multilinear path", 1e-6),
    "gateaux_fd": ("Gateaux trace vs Richardson finite-difference derivative", 1e-6),
    "stieltjes_inversion": ("-Im G(t+i eps)/pi recovers eta_p(t) within C eps", 1.0),
    "stieltjes_halving": ("halving eps halves the inversion error (factor 3 band)", 3.0),
    "log_boundary": ("Im J(t+i eps)/pi -> cumulative kernel/(p-1), extrapolated in eps", 1e-6),
    "integration_by_parts": ("int dnu/(z-t) = -int F(t)/(z-t)^2 dt", 1e-10),
    "herglotz_sign": ("Im G(z) < 0 on the upper half-plane for nonnegative measures", 0.0),
    "growth_normalization": ("G(iy)/(iy) -> 0 monotonically for finite measures", 1e-3),
    "spline_integral": ("basic spline on p+1 nodes integrates to 1/p", 1e-10),
    "spline_nonnegativity": ("basic spline is nonnegative", 1e-12),
    "spline_support": ("basic spline vanishes outside the node range", 0.0),
    "cumulative_monotonicity": ("cumulative kernel is nonincreasing", 1e-12),
    "cumulative_endpoints": ("cumulative kernel is 1 left of the nodes and 0 from the largest node on", 1e-12),
    "cumulative_identity": ("cumulative kernel = (p-1) int_t^inf of the basic spline, coefficientwise", 1e-10),
    "cumulative_smoothness": ("cumulative kernel is C^(p-1-M) at the breakpoints", 1e-9),
    "divdiff_symmetry": ("divided differences are symmetric in the nodes", 1e-10),
    "divdiff_leading_coefficient": ("monic degree-n polynomial over n+1 nodes gives 1", 1e-12),
    "peano_kernel": ("[x_0..x_p] f = 1/(p-1)! int f^(p) B dt against quadrature", 1e-8),
    "resolvent_closed_form": ("product closed form of [x] f_z^k vs recursion", 1e-12),
    "confluent_limit": ("[0, d] f_z -> f_z'(0) with error at most d sup|f_z''|/2", 1.0),
}

# families of pair checks relaxed in the wide-spectrum run
WIDE_TOLERANCE = 1e-6
_PAIR_FAMILIES = (
    "trace_formula", "krein_trace_formula", "koplienko_trace_formula", "mass_identity",
    "resolvent_power_identity", "remainder_recursion", "method_agreement", "transform_recursion",
    "transform_recursion_second", "fd_oracle", "gateaux_fd", "integration_by_parts",
)

Z_TRACE = (1j, 2 + 1j, -3 + 0.5j)
Z_TRANSFORM = (1j, 2 + 1j)
INVERSION_EPS = (1e-3, 5e-4, 2.5e-4)


def _jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        x = complex(x)
        return x.real if x.imag == 0 else [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


@dataclass(frozen=True)
class CheckRecord:
    name: str
    anchor: str
    lhs: object
    rhs: object
    abs_error: float
    rel_error: float
    tolerance: float
    passed: bool

    @property
    def family(self):
        return self.name.split("/", 1)[0]

    def to_dict(self):
        d = {k: _jsonable(v) for k, v in asdict(self).items()}
        d["pass"] = d.pop("passed")
        return d


class _Recorder:
    def __init__(self, tolerances):
        self.tol = tolerances
        self.records = []

    def add(self, name, lhs, rhs, scale=None, abs_error=None):
        """Record ``lhs`` vs ``rhs``; relative error is ``|lhs - rhs| / scale``.

        ``scale`` defaults to ``|rhs|``; a zero scale makes the check absolute.
        """
        family = name.split("/", 1)[0]
        anchor, _ = FAMILIES[family]
        tol = self.tol[family]
        err = float(abs(complex(lhs) - complex(rhs))) if abs_error is None else float(abs_error)
        sc = abs(complex(rhs)) if scale is None else float(scale)
        rel = err / sc if sc > 0 else err
        passed = bool(rel <= tol) and math.isfinite(rel)
        self.records.append(CheckRecord(name, anchor, lhs, rhs, err, rel, tol, passed))


@dataclass
class VerificationReport:
    records: list
    config: dict = field(default_factory=dict)

    def sorted_records(self):
        return sorted(self.records, key=lambda r: r.name)

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    def summary(self):
        fams = {}
        for r in self.records:
            s = fams.setdefault(r.family, {"checks": 0, "passed": 0, "max_rel_error": 0.0})
            s["checks"] += 1
            s["passed"] += int(r.passed)
            s["max_rel_error"] = max(s["max_rel_error"], r.rel_error)
        total = len(self.records)
        ok = sum(r.passed for r in self.records)
        return {"checks": total, "passed": ok, "failed": total - ok,
                "families": {k: fams[k] for k in sorted(fams)}}

    def to_dict(self):
        return {"config": self.config, "summary": self.summary(),
                "records": [r.to_dict() for r in self.sorted_records()]}


def _tolerances(overrides=None, wide=False):
    tol = {k: v[1] for k, v in FAMILIES.items()}
    if wide:
        for k in _PAIR_FAMILIES:
            tol[k] = max(tol[k], WIDE_TOLERANCE)
    for k, v in (overrides or {}).items():
        if k not in tol:
            raise DomainError(f"unknown check family {k!r}")
        tol[k] = float(v)
    return tol


# ---------------------------------------------------------------------------
# pair checks


def _trace_family(p):
    return {1: "krein_trace_formula", 2: "koplienko_trace_formula"}.get(p, "trace_formula")


def _zname(z):
    return f"z={complex(z).real:+g}{complex(z).imag:+g}i"


def _poisson_constant(P, t):
    # (P_eps * eta)(t) - eta(t) is bounded by eps/pi times
    # int |eta(s) - eta(t) - eta'(t)(s - t) 1_{|s-t|<d}| / (s - t)^2 ds
    b = P.breakpoints
    d = float(np.min(np.abs(b - t)))
    e0, e1 = float(P(t)), float(P(t, deriv=1))
    lo, hi = b[0], b[-1]

    def near(s):
        return abs(float(P(s)) - e0 - e1 * (s - t)) / (s - t) ** 2 if s != t else 0.0

    def far(s):
        return abs(float(P(s)) - e0) / (s - t) ** 2

    cuts = sorted(set(b.tolist()) | {t - d, t + d})
    total = 0.0
    for a, c in zip(cuts[:-1], cuts[1:]):
        f = near if (t - d <= a and c <= t + d) else far
        total += _quad(f, a, c, limit=200, epsabs=1e-13)[0]
    total += abs(e0) * (1.0 / (t - lo) + 1.0 / (hi - t))
    return total / math.pi


def _inversion_points(P, eps_max, count=2):
    b = P.breakpoints
    w = np.diff(b)
    order = np.argsort(-w, kind="stable")[:count]
    return [0.5 * (b[k] + b[k + 1]) for k in sorted(order) if w[k] >= 20 * eps_max]


def _oracle_dps(pair):
    # far-away eigenvalues make the remainder tiny next to tr f itself;
    # add five digits per decade of spectral width
    return FD_DPS + 5 * int(math.ceil(math.log10(1.0 + pair.spectral_width())))


def pair_checks(pair, label, orders, rec, fd=True, transforms=True, inversion=True):
    """All per-pair identities for one :class:`Perturbation`."""
    pmax = max(orders)
    seq = eta_sequence(pair, None, pmax)
    D0, V = pair.D0, pair.V.matrix
    n = pair.dim
    spec = np.union1d(pair.D0.eigenvalues, pair.D1.eigenvalues)
    for S in seq:
        p = S.order
        if p not in orders:
            continue
        tag = f"{label}/p{p}"
        for z in Z_TRACE:
            for k in (1, 2, 3):
                f = ResolventPower(z, k)
                lhs = remainder_trace(pair, None, f, p)
                rhs = trace_formula_rhs(S, f)
                rec.add(f"{_trace_family(p)}/{tag}/k{k}/{_zname(z)}", lhs, rhs,
                        scale=abs(lhs) + 1e-12)
        ref = pair.trace_power(p) / math.factorial(p)
        rec.add(f"mass_identity/{tag}", S.mass, ref,
                scale=max(abs(ref), pair.abs_trace_power(p) / math.factorial(p)))
        ar = asymptotics_report(S)
        rec.add(f"tail_asymptotics/{tag}", abs(ar.left_limit) + abs(ar.right_limit), 0.0,
                scale=0.0,
                abs_error=abs(ar.left_limit) + abs(ar.right_limit) + (0.0 if ar.consistent else 1.0))
        bp = S.density.breakpoints
        if S.meta.get("precision") == "extended":
            # extended densities break at the correctly rounded eigenvalues of H0 + V
            spec = np.union1d(spec, pair.xi_offsets_extended()[0])
        stray = int(np.sum(~np.isin(bp, spec))) if len(bp) else 0
        deg = S.density.trim().degree
        rec.add(f"breakpoint_structure/{tag}", stray + max(deg - (p - 1), 0), 0, scale=0.0)
    for p in orders:
        if p > 4:
            continue
        m = pair.measure(p)
        for z in Z_TRACE:
            R = resolvent(D0, z)
            direct = np.trace(np.linalg.matrix_power(R @ V, p))
            rec.add(f"resolvent_power_identity/{label}/p{p}/{_zname(z)}",
                    resolvent_power_trace(m, z), direct)
        if n <= 6:
            for z in Z_TRANSFORM:
                R = resolvent(D0, z)
                T = np.linalg.matrix_power(R @ V, p) @ R
                Rp = remainder_operator(pair, None, f_z(z), p)
                Rq = remainder_operator(pair, None, f_z(z), p + 1)
                res = np.linalg.norm(Rq - (Rp - T))
                scale = max(np.linalg.norm(Rp), np.linalg.norm(T))
                rec.add(f"remainder_recursion/{label}/p{p}/{_zname(z)}", res, 0.0,
                        scale=scale, abs_error=res)
                ref = remainder_trace(pair, None, f_z(z), p)
                rec.add(f"method_agreement/{label}/p{p}/{_zname(z)}", np.trace(Rp), ref,
                        scale=abs(ref) + 1e-12)
        if transforms:
            S = seq[p - 1]
            mS = MeasureSpec.from_density(S.density)
            for z in Z_TRANSFORM:
                G = cauchy_derivative(mS, z, p)
                lhs1 = (-1) ** p * remainder_trace(pair, None, f_z(z), p)
                rec.add(f"transform_recursion/{label}/p{p}/{_zname(z)}", lhs1, G)
                lhs2 = (-1) ** (p + 1) * remainder_trace(pair, None, f_z(z), p + 1)
                rhs2 = -G + (-1) ** (p + 1) / p * resolvent_power_trace(m, z, 1)
                rec.add(f"transform_recursion_second/{label}/p{p}/{_zname(z)}", lhs2, rhs2)
    if fd:
        H0m, h = pair.H0.matrix, 1e-2 / (1.0 + np.linalg.norm(V, 2))
        z = 2 + 1j
        dps = _oracle_dps(pair)
        for p in orders:
            lhs = fd_remainder_trace(H0m, V, f_z(z), p, h, dps=dps)
            rhs = remainder_trace(pair, None, f_z(z), p)
            rec.add(f"fd_oracle/{label}/p{p}/{_zname(z)}", lhs, rhs)
        g = trace_path(H0m, V, f_z(z), dps)
        for j in range(1, min(pmax, 4) + 1):
            lhs = fd_derivative(g, j, h, dps=dps) / math.factorial(j)
            rhs = gateaux_trace(D0, pair.V, f_z(z), j, measure=pair.measure(j))
            rec.add(f"gateaux_fd/{label}/j{j}/{_zname(z)}", lhs, rhs)
    if inversion:
        for S in seq[:3]:
            if S.density.n_intervals == 0:
                continue
            mS = MeasureSpec.from_density(S.density)
            for t in _inversion_points(S.density, INVERSION_EPS[0]):
                inv = stieltjes_invert(lambda w: cauchy_transform(mS, w), t, INVERSION_EPS)
                exact = float(S.density(t))
                C = 2.0 * _poisson_constant(S.density, t)
                errs = [abs(e - exact) for e in inv.estimates]
                name = f"{label}/p{S.order}/t={t:.6g}"
                rec.add(f"stieltjes_inversion/{name}", inv.value, exact,
                        scale=C * INVERSION_EPS[-1] + 1e-300)
                for i in range(len(errs) - 1):
                    ratio = (errs[i + 1] / (errs[i] / 2)) if errs[i] > 0 else 1.0
                    band = max(ratio, 1.0 / ratio) if ratio > 0 else math.inf
                    rec.add(f"stieltjes_halving/{name}/step{i}", ratio, 1.0, scale=0.0,
                            abs_error=band)
        for S in seq:
            if S.density.is_supported() and S.density.n_intervals:
                r = integration_by_parts_check(MeasureSpec.from_density(S.density), 2j)
                rec.add(f"integration_by_parts/{label}/p{S.order}", r.lhs, r.rhs,
                        scale=max(abs(r.lhs), 1e-300))


# ---------------------------------------------------------------------------
# spline, divided-difference and transform suites


def random_node_sets(rng, count, sizes=(2, 7), repeat_prob=0.3, span=4.0):
    """Random node multisets; a fraction get a forced repeated node."""
    out = []
    for _ in range(count):
        n = int(rng.integers(sizes[0], sizes[1] + 1))
        x = rng.uniform(-span, span, size=n)
        if n >= 2 and rng.random() < repeat_prob:
            k = int(rng.integers(2, n + 1))
            x[1:k] = x[0]
        out.append(np.sort(x))
    return out


def _left_derivatives(P, k, order):
    c = P.coefficients[k - 1]
    L = P.widths[k - 1]
    out = []
    for d in range(order + 1):
        cd = np.polynomial.polynomial.polyder(c, d) if d else c
        out.append(np.polynomial.polynomial.polyval(L, cd) if len(cd) else 0.0)
    return out


def spline_checks(rng, count, rec):
    for idx, x in enumerate(random_node_sets(rng, count)):
        nodes = NodeMultiset(x)
        label = f"set{idx:04d}"
        p = nodes.n
        C = spline_to_piecewise(nodes, "cumulative")
        lo, hi = nodes.distinct[0], nodes.distinct[-1]
        rec.add(f"cumulative_endpoints/{label}/left", C(lo - 1.0), 1.0)
        rec.add(f"cumulative_endpoints/{label}/right", abs(C(hi)) + abs(C(hi + 1.0)), 0.0, scale=0.0)
        ts = np.linspace(lo - 0.5, hi + 0.5, 101)
        vals = np.asarray(C(ts), dtype=float)
        rise = float(np.max(np.diff(vals), initial=0.0))
        rec.add(f"cumulative_monotonicity/{label}", max(rise, 0.0), 0.0, scale=0.0)
        if nodes.all_equal:
            continue
        B = spline_to_piecewise(nodes, "basic")
        rec.add(f"spline_integral/{label}", B.integral(), 1.0 / (p - 1))
        peak = float(np.max(np.abs(B.coefficients[:, 0]))) or 1.0
        samples = np.concatenate([np.linspace(a, b, 9, endpoint=False)
                                  for a, b in zip(B.breakpoints[:-1], B.breakpoints[1:])])
        neg = max(-float(np.min(B(samples))), 0.0)
        rec.add(f"spline_nonnegativity/{label}", neg, 0.0, scale=peak)
        outside = abs(B.left_tail) + abs(B.right_tail) + abs(B(lo - 0.5)) + abs(B(hi + 0.5))
        outside += float(np.sum(~((B.breakpoints >= lo) & (B.breakpoints <= hi))))
        rec.add(f"spline_support/{label}", outside, 0.0, scale=0.0)
        # cumulative kernel = (p - 1) int_t^inf B, compared coefficient by coefficient
        Bt = (p - 1) * (B.integral() - B.antiderivative())
        grid = np.union1d(C.breakpoints, Bt.breakpoints)
        a, b = C.refine(grid), Bt.refine(grid)
        ncol = max(a.coefficients.shape[1], b.coefficients.shape[1])
        ca = np.pad(a.coefficients, ((0, 0), (0, ncol - a.coefficients.shape[1])))
        cb = np.pad(b.coefficients, ((0, 0), (0, ncol - b.coefficients.shape[1])))
        diff = float(np.max(np.abs(ca - cb), initial=0.0))
        diff = max(diff, abs(a.left_tail - b.left_tail), abs(a.right_tail - b.right_tail))
        rec.add(f"cumulative_identity/{label}", diff, 0.0, scale=1.0)
        # smoothness C^(p-1-M) at every distinct node
        M = nodes.max_multiplicity
        smooth = p - 1 - M
        if smooth >= 0:
            worst = 0.0
            for k in range(1, C.n_intervals):
                left = _left_derivatives(C, k, smooth)
                right = [float(C(C.breakpoints[k], deriv=d)) for d in range(smooth + 1)]
                scale = [1.0 / (C.widths[k - 1] ** d) for d in range(smooth + 1)]
                worst = max(worst, max(abs(u - v) / s for u, v, s in zip(left, right, scale)))
            rec.add(f"cumulative_smoothness/{label}", worst, 0.0, scale=1.0)


def _mp_recursion(f, y):
    # the divided-difference table in extended precision; in double it loses
    # about log10(max|f| / prod of gaps) digits, too many for a 1e-12 check
    import mpmath
    with mpmath.workdps(EXTENDED_DPS):
        return complex(_mp_divided_difference(f, [mpmath.mpf(float(v)) for v in y]))


def _quad(f, a, b, **kw):
    # tight tolerances trip roundoff warnings near machine precision; the
    # checks compare against their own tolerance instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, a, b, **kw)


def divdiff_checks(rng, count, rec):
    for idx in range(count):
        label = f"set{idx:04d}"
        n = int(rng.integers(2, 7))
        x = rng.uniform(-3, 3, size=n)
        if rng.random() < 0.3:
            x[1] = x[0]
        z = complex(rng.uniform(-3, 3), rng.choice([-1, 1]) * rng.uniform(0.5, 2))
        f = ResolventPower(z, int(rng.integers(1, 4)))
        base = divided_difference(f, x, method="recursive")
        # run the raw table on a shuffled order (equal nodes kept adjacent)
        groups = [np.repeat(v, c) for v, c in zip(*np.unique(x, return_counts=True))]
        shuffled = np.concatenate([groups[i] for i in rng.permutation(len(groups))])
        rec.add(f"divdiff_symmetry/{label}", _recursive_rows(f, shuffled[None, :])[0], base)
        coef = np.concatenate([rng.uniform(-1, 1, size=n - 1), [1.0]])
        rec.add(f"divdiff_leading_coefficient/{label}",
                divided_difference(Polynomial(tuple(coef)), x), 1.0)
        # distinct nodes at separation >= 1e-2 for the closed form
        y = np.sort(rng.uniform(-3, 3, size=n))
        if np.min(np.diff(y)) >= 1e-2:
            rec.add(f"resolvent_closed_form/{label}",
                    divided_difference_resolvent(z, f.k, y), _mp_recursion(f, y))
        # Peano kernel against quadrature (p + 1 nodes, p >= 1)
        xs = np.sort(x)
        if np.ptp(xs) > 1e-6:
            p = n - 1
            g = Exponential(float(rng.choice([-1, 1]) * rng.uniform(0.5, 2)))
            B = spline_to_piecewise(xs, "basic")
            quad = 0j
            for a, b in zip(B.breakpoints[:-1], B.breakpoints[1:]):
                for part in (np.real, np.imag):
                    val = _quad(lambda t: part(g.derivative(t, p) * B(t)), a, b,
                                         epsabs=0.0, epsrel=1e-13, limit=200)[0]
                    quad += val if part is np.real else 1j * val
            if p > 1:
                quad /= math.factorial(p - 1)
            rec.add(f"peano_kernel/{label}", divided_difference(g, xs), quad)
    z = 0.5 + 1j
    fz = f_z(z)
    exact = divided_difference(fz, [0.0, 0.0])
    bound = 1.0 / abs(z.imag) ** 3
    for delta in (1e-3, 1e-4):
        err = abs(divided_difference(fz, [0.0, delta]) - exact)
        rec.add(f"confluent_limit/delta={delta:g}", err, 0.0, scale=delta * bound, abs_error=err)


def cauchy_checks(rng, count, rec):
    zs = [complex(a, b) for a in (-3.0, -0.5, 0.5, 2.0) for b in (0.05, 0.5, 2.0)]
    for idx, x in enumerate(random_node_sets(rng, count, sizes=(2, 5), repeat_prob=0.2)):
        nodes = NodeMultiset(x)
        if nodes.all_equal:
            continue
        label = f"set{idx:04d}"
        p = nodes.n
        # nonnegative measure: basic spline density plus a positive atom
        m = MeasureSpec(((float(rng.uniform(-3, 3)), float(rng.uniform(0.1, 1))),),
                        spline_to_piecewise(nodes, "basic"))
        worst = max(np.imag(cauchy_transform(m, z)) for z in zs)
        rec.add(f"herglotz_sign/{label}", max(worst, 0.0), 0.0, scale=0.0)
        r = integration_by_parts_check(m, 1j + float(rng.uniform(-2, 2)))
        rec.add(f"integration_by_parts/{label}", r.lhs, r.rhs, scale=max(abs(r.lhs), 1e-300))
        slopes = [abs(cauchy_transform(m, 1j * y) / (1j * y)) for y in (1e3, 1e4)]
        rec.add(f"growth_normalization/{label}", slopes[1], 0.0, scale=0.0,
                abs_error=slopes[1] if slopes[1] < slopes[0] else math.inf)
        # log transform boundary values at 20 points, Richardson in eps
        if p >= 2:
            lo, hi = nodes.distinct[0], nodes.distinct[-1]
            L = hi - lo
            worst = 0.0
            # the extrapolated error behaves like eps^3 / gap^2, so sample
            # points keep an absolute distance from every node
            cand = np.linspace(lo - 0.2 * L - 0.2, hi + 0.2 * L + 0.2, 800)
            gap = np.min(np.abs(cand[:, None] - nodes.distinct[None, :]), axis=1)
            cand = cand[gap >= max(0.02 * L, 0.05)]
            for t in cand[np.linspace(0, cand.size - 1, 20).round().astype(int)]:
                v = [log_boundary_value(nodes, t, e) for e in INVERSION_EPS]
                r1, r2 = 2 * v[1] - v[0], 2 * v[2] - v[1]
                est = (4 * r2 - r1) / 3
                ref = cumulative_spline_kernel(nodes, t) / (p - 1)
                worst = max(worst, abs(est - ref))
            rec.add(f"log_boundary/{label}", worst, 0.0, scale=0.0)


# ---------------------------------------------------------------------------
# driver


def run_verification(pairs=None, orders=(1, 2, 3, 4, 5), seed=0, count=10, dims=(2, 8),
                     wide_scale=None, tolerances=None, suite_count=200, fd=True,
                     progress=None):
    """Run every check family and return a :class:`VerificationReport`.

    Parameters
    ----------
    pairs : list of (H0, V), optional
        Explicit pairs; otherwise ``count`` seeded pairs are generated.
    wide_scale : float, optional
        Generate wide-spectrum pairs (spectrum spanning ``[-scale, scale]``)
        and relax the pair tolerances to ``WIDE_TOLERANCE``.
    suite_count : int
        Number of random node sets for the spline, divided-difference and
        transform suites.
    """
    orders = tuple(sorted(set(int(p) for p in orders)))
    if not orders or orders[0] < 1:
        raise DomainError("orders must be positive integers")
    rec = _Recorder(_tolerances(tolerances, wide=wide_scale is not None))
    if pairs is None:
        pairs = ensemble(count, dims, seed, wide_scale)
    for i, (H0, V) in enumerate(pairs):
        pair = H0 if isinstance(H0, Perturbation) else Perturbation(H0, V)
        pair_checks(pair, f"pair{i:03d}", orders, rec, fd=fd)
        if progress:
            progress(i)
    rng = np.random.default_rng(seed)
    spline_checks(rng, suite_count, rec)
    divdiff_checks(rng, suite_count, rec)
    cauchy_checks(rng, max(suite_count // 10, 1), rec)
    config = {"orders": list(orders), "seed": seed, "pairs": len(pairs),
              "wide_scale": wide_scale, "suite_count": suite_count,
              "tolerances": {k: rec.tol[k] for k in sorted(rec.tol)}}
    return VerificationReport(rec.records, config)
