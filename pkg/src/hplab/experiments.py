"""Named experiments behind the command line and manifest runner.

Each experiment is a pure function ``(params, ctx) -> Outcome``.  Parameters
are declared with converters so that flags, manifest values and defaults go
through one validation path before any heavy work starts.  The context
supplies the sieve table and an order-preserving ``map`` for fan-out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from . import equidist, gowers
from .errors import InvalidArgument, OutOfRange
from .ergodic import (
    ArcSet,
    HeisenbergOrbit,
    TorusRotation,
    UnipotentAffine,
    character,
    comparison_gap,
    constant,
    coordinate_character,
    multiple_average,
    nil_orbit_equidistribution,
    recurrence_experiment,
    short_interval_average,
    smoothed_arc,
)
from .ergodic.fixedpoint import FixedReal
from .hardy import parse
from .hardy.growth import select_k_and_L
from .hardy.taylor import taylor_model
from .numtheory import VonMangoldtTable, build_table, coprime_residues, primorial_trick
from .poly import RATIONAL, RealPoly

# ---------------------------------------------------------------------------
# converters


def to_int(v) -> int:
    if isinstance(v, bool):
        raise InvalidArgument(f"expected an integer, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, float) and v.is_integer():
        return int(v)
    try:
        return int(str(v).replace("_", ""))
    except ValueError:
        try:
            f = float(v)
        except ValueError:
            raise InvalidArgument(f"expected an integer, got {v!r}") from None
        if not f.is_integer():
            raise InvalidArgument(f"expected an integer, got {v!r}") from None
        return int(f)


def to_float(v) -> float:
    try:
        return float(v)
    except (TypeError, ValueError):
        raise InvalidArgument(f"expected a number, got {v!r}") from None


def to_str(v) -> str:
    return str(v)


def _split(v) -> list:
    if isinstance(v, (list, tuple)):
        return list(v)
    return [s for s in str(v).split(",") if s.strip()]


def to_int_list(v) -> list[int]:
    return [to_int(x) for x in _split(v)]


def to_float_list(v) -> list[float]:
    return [to_float(x) for x in _split(v)]


def to_str_list(v) -> list[str]:
    if isinstance(v, (list, tuple)):
        return [str(x) for x in v]
    return [s.strip() for s in str(v).split(";") if s.strip()]


def to_window(v) -> tuple[int, int]:
    """``"X:+H"`` means the interval ``(X, X+H]``."""
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return to_int(v[0]), to_int(v[1])
    text = str(v)
    if ":+" not in text:
        raise InvalidArgument(f"window must look like X:+H, got {v!r}")
    X, H = text.split(":+", 1)
    X, H = to_int(X), to_int(H)
    if X < 0 or H < 1:
        raise InvalidArgument(f"window needs X >= 0 and H >= 1, got {v!r}")
    return X, H


def to_intervals(v) -> list[tuple[float, float]]:
    """``"a:b,c:d"`` or a list of pairs."""
    out = []
    for item in _split(v) if not (isinstance(v, (list, tuple)) and v and isinstance(v[0], (list, tuple))) else v:
        if isinstance(item, (list, tuple)):
            a, b = item
        else:
            a, b = str(item).split(":")
        out.append((to_float(a), to_float(b)))
    return out


def to_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    text = str(v).lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise InvalidArgument(f"expected a boolean, got {v!r}")


@dataclass(frozen=True)
class Param:
    name: str
    convert: Callable[[Any], Any]
    default: Any = None
    required: bool = False
    help: str = ""


# ---------------------------------------------------------------------------
# specs of systems, observables, sequences


def parse_system(spec: str):
    """``rot:α[,α2,...]`` (one rotation of ``T^d``), ``rot:α|β`` (commuting
    rotations), ``affine:α`` or ``heis:a,b,c[@x1,x2,x3]``."""
    kind, _, rest = str(spec).partition(":")
    if not rest:
        raise InvalidArgument(f"system spec {spec!r} needs the form kind:parameters")
    if kind == "rot":
        maps = [[a.strip() for a in row.split(",")] for row in rest.split("|")]
        return TorusRotation.of(maps)
    if kind == "affine":
        return UnipotentAffine.of(rest.strip())
    if kind == "heis":
        coords, _, base = rest.partition("@")
        a, b, c = [x.strip() for x in coords.split(",")]
        point = tuple(to_float(x) for x in base.split(",")) if base else (0.0, 0.0, 0.0)
        return HeisenbergOrbit.of(a, b, c, point)
    raise InvalidArgument(f"unknown system kind {kind!r} (expected rot, affine or heis)")


def parse_observable(spec: str, dim: int):
    """``e(k1,...)``, ``arc:a:b[:K]`` (smoothed, on coordinate 0), ``const:c``."""
    spec = str(spec).strip()
    if spec.startswith("e(") and spec.endswith(")"):
        ks = [to_int(k) for k in spec[2:-1].split(",")]
        if len(ks) == 1 and dim > 1:
            ks = ks + [0] * (dim - 1)
        if len(ks) != dim:
            raise InvalidArgument(f"observable {spec!r} has {len(ks)} frequencies for a {dim}-dimensional system")
        return coordinate_character(*ks) if dim == 3 else character(*ks)
    if spec.startswith("arc:"):
        parts = spec.split(":")[1:]
        a, b = to_float(parts[0]), to_float(parts[1])
        K = to_int(parts[2]) if len(parts) > 2 else 16
        return smoothed_arc(a, b, K, dim)
    if spec.startswith("const:"):
        return constant(complex(spec.split(":", 1)[1]), dim)
    raise InvalidArgument(f"unknown observable {spec!r}")


def parse_iterate(spec: str):
    """``expr`` or ``expr@m`` for the multiple ``m·⌊expr⌋``."""
    spec = str(spec)
    if "@" in spec:
        expr, m = spec.rsplit("@", 1)
        return (expr.strip(), to_int(m))
    return spec.strip()


def parse_poly(spec: str) -> RealPoly:
    """Coefficients in ascending order separated by commas, each in the constant grammar."""
    from .hardy.parser import parse_constant

    coeffs, markers, exact = [], [], []
    for text in _split(spec):
        c = parse_constant(text.strip())
        coeffs.append(float(c.value))
        markers.append(RATIONAL if c.exact is not None else c.marker)
        exact.append(c.exact)
    return RealPoly(tuple(coeffs), tuple(markers), tuple(exact))


# ---------------------------------------------------------------------------
# context and outcome


@dataclass
class Context:
    """Execution context: sieve source and an order-preserving map."""

    table_path: Optional[str] = None
    limit: Optional[int] = None
    map: Callable = map
    _table: Optional[VonMangoldtTable] = None

    def table(self, needed: int) -> VonMangoldtTable:
        needed = max(int(needed), 2)
        if self._table is not None and self._table.limit >= needed:
            return self._table
        if self.table_path:
            self._table = VonMangoldtTable.load(self.table_path)
            if self._table.limit < needed:
                raise OutOfRange(f"sieve cache {self.table_path} covers {self._table.limit}, need {needed}")
            return self._table
        limit = max(needed, self.limit or 0)
        self._table = build_table(limit)
        return self._table


@dataclass
class Outcome:
    columns: tuple
    rows: list
    summary: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    value: Optional[float] = None


@dataclass(frozen=True)
class Experiment:
    name: str
    params: tuple
    run: Callable[[dict, Context], Outcome]
    help: str = ""

    def validate(self, raw: dict) -> dict:
        known = {p.name for p in self.params}
        unknown = set(raw) - known
        if unknown:
            raise InvalidArgument(f"{self.name}: unknown parameter(s) {sorted(unknown)}")
        out = {}
        for p in self.params:
            if raw.get(p.name) is None:
                if p.required:
                    raise InvalidArgument(f"{self.name}: missing required parameter {p.name!r}")
                out[p.name] = p.default
            else:
                out[p.name] = p.convert(raw[p.name])
        return out


# ---------------------------------------------------------------------------
# experiments


def _sieve(p: dict, ctx: Context) -> Outcome:
    limit = p["limit"]
    if limit < 2:
        raise InvalidArgument("sieve limit must be >= 2")
    table = build_table(limit)
    if p["out"]:
        table.save(p["out"])
    psi = table.psi(limit)
    row = {"limit": limit, "pi": table.pi(limit), "psi": psi, "psi_over_x": psi / limit}
    return Outcome(("limit", "pi", "psi", "psi_over_x"), [row], {"out": p["out"]}, value=psi / limit)


def _gowers(p: dict, ctx: Context) -> Outcome:
    X, H = p["window"]
    s, w, b = p["s"], p["w"], p["b"]
    I = gowers.Interval.half_open(X, H)
    if p["seq"] == "vmangoldt-w":
        trick = primorial_trick(w, b)
        table = ctx.table(trick.argument(I.hi))
        f = gowers.lambda_minus_one(table, trick, I)
    elif p["seq"] == "random":
        rng = np.random.default_rng(p["seed"])
        f = gowers.FiniteSequence(I.lo, rng.choice([-1.0, 1.0], size=H))
    else:
        raise InvalidArgument(f"unknown sequence {p['seq']!r} (expected vmangoldt-w or random)")
    norm = gowers.gowers_interval(f, I, s).value
    cross = None
    if p["cross_check"] and (s == 2 or H <= 128):
        direct, cross = gowers.cyclic_cross_check(f, I, s)
    row = {
        "seq": p["seq"],
        "w": w,
        "b": b,
        "X": X,
        "H": H,
        "s": s,
        "norm": norm,
        "cross_check": "" if cross is None else cross,
        "rel_diff": "" if cross is None else abs(norm - cross) / max(abs(norm), 1e-300),
    }
    asserts = []
    if cross is not None:
        asserts.append(("cyclic-cross-check", abs(norm - cross) <= 1e-9 * max(1.0, norm), f"{norm:.12g} vs {cross:.12g}"))
    return Outcome(tuple(row), [row], {}, asserts, norm)


def _sequence_values(spec: str, N: int) -> np.ndarray:
    n = np.arange(1, N + 1)
    if spec == "golden":
        return FixedReal.of("(sqrt5-1)/2").frac_mul(n)
    if spec.startswith("rot:"):
        return FixedReal.of(spec[4:]).frac_mul(n)
    if spec.startswith("fn:"):
        from .floors import floor_expr

        fv = floor_expr(parse(spec[3:]), n)
        return fv.frac
    raise InvalidArgument(f"unknown sequence {spec!r} (expected golden, rot:α or fn:expr)")


def _discrepancy(p: dict, ctx: Context) -> Outcome:
    x = _sequence_values(p["seq"], p["N"])
    intervals = p["intervals"]
    if not intervals:
        rng = np.random.default_rng(p["seed"])
        ab = np.sort(rng.random((p["random"], 2)), axis=1)
        intervals = [(float(a), float(b)) for a, b in ab]
    major = equidist.erdos_turan_majorant(x, p["M"], p["C"])
    rows = []
    for a, b in intervals:
        rep = equidist.discrepancy(x, a, b)
        rows.append(
            {"a": a, "b": b, "count_in": rep.count_in, "total": rep.total, "discrepancy": rep.discrepancy, "et_majorant": major, "M": p["M"]}
        )
    worst = max(r["discrepancy"] for r in rows)
    asserts = [("discrepancy<=majorant", worst <= major, f"{worst:.6g} <= {major:.6g}")]
    return Outcome(tuple(rows[0]), rows, {"worst": worst, "majorant": major}, asserts, worst)


def _taylor(p: dict, ctx: Context) -> Outcome:
    e = parse(p["fn"])
    L = p["L"] if p["L"] is not None else int(math.floor(p["N"] ** p["lam"]))
    m = taylor_model(e, p["N"], L, p["k"])
    hs = np.unique(np.linspace(0, L, min(L + 1, 200)).astype(int))
    err = max(m.error(int(h)) for h in hs)
    row = {"N": p["N"], "L": L, "k": p["k"], "theta": m.theta_float, "max_error": err}
    summary = {"coefficients": [float(c) for c in m.coefficients]}
    asserts = [("remainder<=theta", err <= m.theta_float * (1 + 1e-9) + 1e-30, f"{err:.6g} <= {m.theta_float:.6g}")]
    return Outcome(tuple(row), [row], summary, asserts, m.theta_float)


_FLOOR_COLUMNS = ("N", "L", "mismatch_count", "fraction", "bad_set_size", "weighted_mass")


def _floor_match(p: dict, ctx: Context) -> Outcome:
    regime = p["regime"]
    if regime == "fast":
        e = parse(p["fn"])
        Ns = p["N"]
        rows, reps = [], []
        for N in Ns:
            L = p["L"] if p["L"] is not None else int(math.floor(N ** p["lam"]))
            k = p["k"]
            if k is None:
                k = select_k_and_L([e], L=p["lam"]).ks[0]
            rep = equidist.floor_match_fast(e, N, L, k)
            reps.append(rep)
            rows.append(rep.csv_row())
        worst = max(r.mismatch_fraction for r in reps)
        bound = 1.0 / math.log(max(Ns)) ** 2
        asserts = [("outside-band-empty", all(r.outside_band == 0 for r in reps), "mismatches outside θ band")]
        return Outcome(_FLOOR_COLUMNS, rows, {"max_fraction": worst, "log2_bound": bound}, asserts, worst)
    if regime == "slow":
        e = parse(p["fn"])
        R = max(p["N"])
        rep = equidist.floor_match_slow(e, R, p["lam"])
        rows = []
        for N, L, good, excluded in rep.windows():
            if N % p["stride"] == 0 or N == R:
                rows.append(
                    {"N": N, "L": L, "mismatch_count": 0 if good else 1, "fraction": 0.0 if good else 1.0, "bad_set_size": "", "weighted_mass": ""}
                )
        summary = {"bad_fraction": rep.bad_fraction, "curve": [list(c) for c in rep.curve], "hypothesis_met": rep.hypothesis_met}
        return Outcome(_FLOOR_COLUMNS, rows, summary, [], rep.bad_fraction)
    if regime == "poly":
        poly = parse_poly(p["poly"])
        x = parse(p["fn"])
        r = max(p["N"])
        L = p["L"] if p["L"] is not None else int(math.floor(r ** p["lam"]))
        trick = primorial_trick(p["w"], p["b"])
        table = ctx.table(trick.argument(r + L))
        rep = equidist.poly_bad_set(poly, x, table, trick, r, L, p["epsilon"], p["check_precondition"])
        asserts = [("zero-mismatches-off-B", rep.mismatch_count == 0, f"{rep.mismatch_count} mismatches off B")]
        summary = {"bad_fraction": rep.bad_fraction, "drift": rep.theta}
        return Outcome(_FLOOR_COLUMNS, [rep.csv_row()], summary, asserts, rep.bad_fraction)
    raise InvalidArgument(f"unknown regime {regime!r} (expected fast, slow or poly)")


def _expsum(p: dict, ctx: Context) -> Outcome:
    poly = parse_poly(p["poly"])
    trick = primorial_trick(p["w"], p["b"])
    N, L = p["N"], p["L"]
    table = ctx.table(trick.argument(N + L))
    v = gowers.weighted_polynomial_expsum(table, trick, poly, N, L)
    row = {"N": N, "L": L, "w": trick.w, "b": trick.b, "value_re": v.real, "value_im": v.imag, "magnitude": abs(v)}
    return Outcome(tuple(row), [row], {}, [], abs(v))


_AVG_COLUMNS = ("scheme", "N", "w", "b", "value_re", "value_im", "norm")


def _table_for_scheme(scheme: str, N: int, trick, ctx: Context):
    if scheme == "cesaro":
        return None
    if scheme == "w_tricked":
        return ctx.table(trick.argument(N))
    return ctx.table(N)


def _average(p: dict, ctx: Context) -> Outcome:
    system = parse_system(p["system"])
    obs = [parse_observable(s, system.dim) for s in p["observables"]]
    its = [parse_iterate(s) for s in p["iterates"]]
    if len(its) == 1 and len(obs) > 1:
        its = its * len(obs)
    trick = primorial_trick(p["w"], p["b"]) if p["scheme"] == "w_tricked" else None
    N = max(p["N"])
    table = _table_for_scheme(p["scheme"], N, trick, ctx)
    series = multiple_average(system, obs, its, p["scheme"], table, trick, p["N"])
    rows = [
        {
            "scheme": p["scheme"],
            "N": c.N,
            "w": "" if trick is None else trick.w,
            "b": "" if trick is None else trick.b,
            "value_re": c.value.real,
            "value_im": c.value.imag,
            "norm": c.norm,
        }
        for c in series.checkpoints
    ]
    asserts = []
    if series.bound is not None:
        ok = all(abs(c.value) <= series.bound + 1e-12 for c in series.checkpoints)
        asserts.append(("checkpoint<=sup-bound", ok, f"bound {series.bound:.6g}"))
    return Outcome(_AVG_COLUMNS, rows, {"method": series.method, "ambiguous_floors": series.ambiguous_floors}, asserts, series.last.norm)


def _compare(p: dict, ctx: Context) -> Outcome:
    system = parse_system(p["system"])
    obs = [parse_observable(s, system.dim) for s in p["observables"]]
    its = [parse_iterate(p["fn"])] * len(obs) if p["iterates"] is None else [parse_iterate(s) for s in p["iterates"]]
    N = max(p["N"])
    tasks = [(w, b) for w in p["w"] for b in coprime_residues(w)]
    needed = max(primorial_trick(w, b).argument(N) for w, b in tasks)
    table = ctx.table(needed)
    from .ergodic.averages import check_iterate_conditions

    if p["check"]:
        check_iterate_conditions(its)

    def one(task):
        w, b = task
        return comparison_gap(system, obs, its, primorial_trick(w, b), table, N, check=False)

    gaps = list(ctx.map(one, tasks))
    rows = [
        {"scheme": "w_tricked", "N": N, "w": w, "b": b, "value_re": "", "value_im": "", "norm": g}
        for (w, b), g in zip(tasks, gaps)
    ]
    best = {}
    for (w, b), g in zip(tasks, gaps):
        best[w] = max(best.get(w, 0.0), g)
    return Outcome(_AVG_COLUMNS, rows, {"max_gap_by_w": {str(w): g for w, g in best.items()}}, [], best[p["w"][-1]])


def _recur(p: dict, ctx: Context) -> Outcome:
    system = parse_system(p["system"])
    if p["set"] is None:
        raise InvalidArgument("recur needs a set")
    arcs = ArcSet.of(p["set"])
    its = [parse_iterate(s) for s in p["iterates"]]
    trick = primorial_trick(p["w"], p["b"]) if p["scheme"] == "w_tricked" else None
    N = max(p["N"])
    table = _table_for_scheme(p["scheme"], N, trick, ctx)
    rep = recurrence_experiment(system, arcs, its, p["scheme"], table, N, trick)
    row = {"scheme": rep.scheme, "N": rep.N, "k": rep.k, "measure": rep.measure, "average": rep.average, "lower_bound": rep.lower_bound}
    return Outcome(tuple(row), [row], {"margin": rep.margin}, [], rep.average)


def _nil_equi(p: dict, ctx: Context) -> Outcome:
    system = parse_system(p["system"])
    obs = [parse_observable(s, system.dim) for s in p["observables"]]
    N = max(p["N"])
    table = ctx.table(N) if p["scheme"] == "prime" else None
    rep = nil_orbit_equidistribution(system, parse(p["fn"]), obs, N, table, p["scheme"])
    rows = [
        {
            "observable": name,
            "N": N,
            "average_re": v.real,
            "average_im": v.imag,
            "haar_re": h.real,
            "haar_im": h.imag,
            "residual": r,
        }
        for name, v, h, r in zip(rep.names, rep.averages, rep.haar, rep.residuals)
    ]
    return Outcome(tuple(rows[0]), rows, {"samples": rep.samples}, [], rep.max_residual)


def _short_interval(p: dict, ctx: Context) -> Outcome:
    spec = p["seq"]
    if spec == "zero":
        A = lambda n: np.zeros(len(n))  # noqa: E731
    elif spec == "one":
        A = lambda n: np.ones(len(n))  # noqa: E731
    elif spec.startswith("rot:"):
        alpha = FixedReal.of(spec[4:])
        A = lambda n: np.exp(2j * np.pi * alpha.frac_mul(n))  # noqa: E731
    else:
        raise InvalidArgument(f"unknown sequence {spec!r} (expected zero, one or rot:α)")
    R = max(p["N"])
    trick = primorial_trick(p["w"], p["b"])
    top = R + int(math.floor(R ** p["lam"])) + 1
    table = ctx.table(trick.argument(top))
    rep = short_interval_average(A, table, trick, p["lam"], R)
    row = {"R": R, "left": rep.left, "right": rep.right, "residual": rep.residual, "holds": int(rep.holds)}
    return Outcome(tuple(row), [row], {"slack": rep.slack}, [("short-interval-inequality", rep.holds, f"slack {rep.slack:.6g}")], rep.left)


_N = Param("N", to_int_list, None, True, "cutoff(s), comma separated")
_W = Param("w", to_int, 1, False, "W-trick parameter w")
_B = Param("b", to_int, 1, False, "residue b coprime to W")

EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in (
        Experiment(
            "sieve",
            (Param("limit", to_int, None, True, "largest n"), Param("out", to_str, None, False, "cache file to write")),
            _sieve,
            "build the von Mangoldt table and optionally write the binary cache",
        ),
        Experiment(
            "gowers",
            (
                Param("seq", to_str, "vmangoldt-w", False, "vmangoldt-w or random"),
                _W,
                _B,
                Param("window", to_window, None, True, "X:+H for the interval (X, X+H]"),
                Param("s", to_int, 2, False, "norm order"),
                Param("cross_check", to_bool, True, False, "compare with the cyclic route"),
                Param("seed", to_int, 0, False, "seed for random sequences"),
            ),
            _gowers,
            "Gowers norm of Λ_{w,b} − 1 on a window",
        ),
        Experiment(
            "discrepancy",
            (
                Param("seq", to_str, "golden", False, "golden, rot:α or fn:expr"),
                _N,
                Param("intervals", to_intervals, None, False, "a:b,c:d"),
                Param("random", to_int, 20, False, "number of random intervals if none given"),
                Param("seed", to_int, 0, False, "seed for random intervals"),
                Param("M", to_int, 100, False, "Erdős–Turán truncation"),
                Param("C", to_float, equidist.ET_C_PIN, False, "Erdős–Turán constant"),
            ),
            lambda p, ctx: _discrepancy({**p, "N": max(p["N"])}, ctx),
            "discrepancy of a sequence mod 1 against the Erdős–Turán majorant",
        ),
        Experiment(
            "taylor",
            (
                Param("fn", to_str, None, True, "function of t"),
                Param("N", to_int, None, True, "expansion point"),
                Param("L", to_int, None, False, "window length"),
                Param("lam", to_float, 0.65, False, "L = N^lam when L is not given"),
                Param("k", to_int, 4, False, "degree"),
            ),
            _taylor,
            "Taylor model on a short window with its remainder bound",
        ),
        Experiment(
            "floor-match",
            (
                Param("regime", to_str, "fast", False, "fast, slow or poly"),
                Param("fn", to_str, None, True, "function of t (the shift x for poly)"),
                _N,
                Param("L", to_int, None, False, "window length"),
                Param("lam", to_float, 0.65, False, "L = N^lam"),
                Param("k", to_int, None, False, "Taylor degree (selected if omitted)"),
                Param("poly", to_str, "0,irr(sqrt2)", False, "polynomial coefficients for poly"),
                Param("epsilon", to_float, 0.05, False, "bad-set width for poly"),
                Param("check_precondition", to_bool, True, False, "enforce L|x'(r)| < epsilon"),
                Param("stride", to_int, 100, False, "row stride for slow"),
                _W,
                _B,
            ),
            _floor_match,
            "floor-identity scans on short windows",
        ),
        Experiment(
            "expsum",
            (
                Param("poly", to_str, None, True, "ascending coefficients, e.g. 0,irr(sqrt2)"),
                Param("N", to_int, None, True, "window start"),
                Param("L", to_int, None, True, "window length"),
                _W,
                _B,
            ),
            _expsum,
            "(Λ_{w,b} − 1)-weighted polynomial exponential sum on [N, N+L]",
        ),
        Experiment(
            "average",
            (
                Param("system", to_str, "rot:sqrt2-1", False, "system spec"),
                Param("observables", to_str_list, ["e(1)"], False, "observables separated by ';'"),
                Param("iterates", to_str_list, ["t"], False, "iterates separated by ';' (expr or expr@m)"),
                Param("scheme", to_str, "cesaro", False, "cesaro, prime, lambda or w_tricked"),
                _N,
                _W,
                _B,
            ),
            _average,
            "multiple ergodic average at checkpoints",
        ),
        Experiment(
            "compare",
            (
                Param("fn", to_str, "t^1.5", False, "iterate"),
                Param("iterates", to_str_list, None, False, "iterates per observable (default fn)"),
                Param("system", to_str, "rot:sqrt2-1", False, "system spec"),
                Param("observables", to_str_list, ["e(1)"], False, "observables separated by ';'"),
                Param("w", to_int_list, [1, 2, 3], False, "w values"),
                _N,
                Param("check", to_bool, True, False, "check the growth conditions first"),
            ),
            _compare,
            "(Λ_{w,b} − 1)-weighted average norms for every b coprime to W",
        ),
        Experiment(
            "recur",
            (
                Param("system", to_str, "rot:sqrt3-1", False, "torus rotation spec"),
                Param("set", to_intervals, None, True, "arcs a:b,c:d"),
                Param("iterates", to_str_list, ["t^1.5", "t^1.5@2"], False, "one iterate per intersection"),
                Param("scheme", to_str, "prime", False, "scheme"),
                _N,
                _W,
                _B,
            ),
            _recur,
            "average intersection measure along the scheme",
        ),
        Experiment(
            "nil-equi",
            (
                Param("system", to_str, "heis:1,irr(sqrt2),0", False, "rot or heis system"),
                Param("fn", to_str, "t^(4/3)", False, "iterate"),
                Param("observables", to_str_list, ["e(1,0,0)", "e(0,1,0)", "e(0,0,1)"], False, "observables"),
                Param("scheme", to_str, "prime", False, "prime or cesaro"),
                _N,
            ),
            _nil_equi,
            "orbit averages along primes against Haar integrals",
        ),
        Experiment(
            "short-interval",
            (
                Param("seq", to_str, "rot:sqrt2", False, "zero, one or rot:α (A_n = e(nα))"),
                Param("lam", to_float, 0.7, False, "L = t^lam"),
                _N,
                _W,
                _B,
            ),
            _short_interval,
            "both sides of the short-interval inequality",
        ),
    )
}
