"""Expression trees for logarithmico-exponential functions of ``t``.

Nodes are immutable and hashable.  The smart constructors :func:`add`,
:func:`mul`, :func:`power`, :func:`log_` and :func:`exp_` perform light
normalization (flattening, constant folding, like-term collection, merging
of powers with equal bases) so that repeated differentiation of the
typical desk-scale functions, such as ``t^c·log^m t``, stays compact.

Constants carry a rationality marker.  Literal numbers are rational; the
``irr(...)`` wrapper of the text grammar marks a constant irrational; any
other constant (``pi`` without a marker, say) is *unmarked*.  Markers
propagate through arithmetic only where the answer is certain.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

import mpmath
import numpy as np

RATIONAL = "rational"
IRRATIONAL = "irrational"
WORK_DPS = 60


def _mpf(x) -> mpmath.mpf:
    with mpmath.workdps(WORK_DPS):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)


# --------------------------------------------------------------------------
# nodes


class Node:
    """Base class of expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Node):
    """A real constant.

    Attributes:
        value: high-precision value.
        exact: the exact rational value when known.
        marker: ``"rational"``, ``"irrational"`` or ``None`` (unmarked).
        label: text used when printing a non-rational constant.
    """

    value: mpmath.mpf = field(compare=False)
    exact: Optional[Fraction]
    marker: Optional[str]
    label: str = ""

    def __eq__(self, other):
        if not isinstance(other, Const):
            return NotImplemented
        if self.exact is not None or other.exact is not None:
            return self.exact == other.exact and self.marker == other.marker
        return self.label == other.label and self.marker == other.marker and self.value == other.value

    def __hash__(self):
        return hash(("C", self.exact, self.marker, self.label if self.exact is None else ""))

    @property
    def is_zero(self) -> bool:
        return self.exact == 0

    @property
    def is_one(self) -> bool:
        return self.exact == 1

    def is_integer(self) -> bool:
        return self.exact is not None and self.exact.denominator == 1


@dataclass(frozen=True)
class Var(Node):
    """The variable ``t``."""


@dataclass(frozen=True)
class Add(Node):
    terms: tuple


@dataclass(frozen=True)
class Mul(Node):
    factors: tuple


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: Const


@dataclass(frozen=True)
class Log(Node):
    arg: Node


@dataclass(frozen=True)
class Exp(Node):
    arg: Node


T = Var()


def rational(x: Union[int, str, Fraction]) -> Const:
    q = Fraction(x)
    return Const(_mpf(q), q, RATIONAL)


ZERO = rational(0)
ONE = rational(1)


def real_const(value, marker: Optional[str] = None, label: str = "") -> Const:
    """A constant given by a (high precision) value and an optional marker."""
    v = _mpf(value)
    if not label:
        label = mpmath.nstr(v, 17)
    return Const(v, None, marker, label)


def const(x, marker: Optional[str] = None) -> Const:
    """Coerce ``x`` (int, Fraction, float, mpf, Const) to a :class:`Const`.

    Python ints and Fractions become exact rationals.  Floats become exact
    rationals of their decimal representation unless ``marker`` says
    otherwise.
    """
    if isinstance(x, Const):
        return x
    if isinstance(x, (int, Fraction)) and marker in (None, RATIONAL):
        return rational(x)
    if isinstance(x, float) and marker in (None, RATIONAL):
        return rational(Fraction(repr(x)))
    return real_const(x, marker)


# --------------------------------------------------------------------------
# constant arithmetic with marker propagation


def _c_add(a: Const, b: Const) -> Const:
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    if a.exact is not None and b.exact is not None:
        return rational(a.exact + b.exact)
    markers = {a.marker, b.marker}
    marker = IRRATIONAL if markers == {RATIONAL, IRRATIONAL} else None
    with mpmath.workdps(WORK_DPS):
        v = a.value + b.value
    if b.exact is not None and b.exact < 0:
        label = f"({_c_text(a)} - {_c_text(rational(-b.exact))})"
    else:
        label = f"({_c_text(a)} + {_c_text(b)})"
    return Const(v, None, marker, label)


def _c_mul(a: Const, b: Const) -> Const:
    if a.is_zero or b.is_zero:
        return ZERO
    if a.is_one:
        return b
    if b.is_one:
        return a
    if a.exact is not None and b.exact is not None:
        return rational(a.exact * b.exact)
    markers = {a.marker, b.marker}
    marker = IRRATIONAL if markers == {RATIONAL, IRRATIONAL} else None
    with mpmath.workdps(WORK_DPS):
        v = a.value * b.value
    return Const(v, None, marker, f"{_c_text(a, True)}*{_c_text(b, True)}")


def _c_neg(a: Const) -> Const:
    return _c_mul(rational(-1), a)


def _c_pow(a: Const, b: Const) -> Const:
    if b.is_zero:
        return ONE
    if b.is_one:
        return a
    if a.exact is not None and b.is_integer():
        if a.exact == 0 and b.exact < 0:
            raise ZeroDivisionError("0 to a negative power")
        return rational(a.exact ** int(b.exact))
    with mpmath.workdps(WORK_DPS):
        v = mpmath.power(a.value, b.value)
    if isinstance(v, mpmath.mpc):
        raise ValueError("constant power is not real")
    return Const(v, None, None, f"{_c_text(a, True)}^{_c_text(b, True)}")


def _c_text(c: Const, atomic: bool = False) -> str:
    if c.exact is not None:
        q = c.exact
        s = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        if atomic and (q.denominator != 1 or q < 0):
            s = f"({s})"
        return s
    s = c.label
    if c.marker == IRRATIONAL and not s.startswith("irr("):
        s = f"irr({s})"
    return s


# --------------------------------------------------------------------------
# smart constructors


def _split_coeff(node: Node) -> tuple[Const, Node]:
    """Write ``node = c·rest`` with ``c`` constant."""
    if isinstance(node, Const):
        return node, ONE
    if isinstance(node, Mul) and isinstance(node.factors[0], Const):
        rest = node.factors[1:]
        return node.factors[0], rest[0] if len(rest) == 1 else Mul(rest)
    return ONE, node


def add(*terms: Node) -> Node:
    flat: list[Node] = []
    for t in terms:
        if isinstance(t, Add):
            flat.extend(t.terms)
        else:
            flat.append(t)
    constant = ZERO
    collected: dict[Node, Const] = {}
    for t in flat:
        if isinstance(t, Const):
            constant = _c_add(constant, t)
            continue
        c, rest = _split_coeff(t)
        collected[rest] = _c_add(collected[rest], c) if rest in collected else c
    out: list[Node] = []
    for rest, c in collected.items():
        if c.is_zero:
            continue
        out.append(rest if c.is_one else mul(c, rest))
    if not constant.is_zero:
        out.append(constant)
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(tuple(out))


def _base_exp(node: Node) -> tuple[Node, Const]:
    if isinstance(node, Pow):
        return node.base, node.exponent
    return node, ONE


def mul(*factors: Node) -> Node:
    flat: list[Node] = []
    for f in factors:
        if isinstance(f, Mul):
            flat.extend(f.factors)
        else:
            flat.append(f)
    coeff = ONE
    powers: dict[Node, Const] = {}
    exp_args: list[Node] = []
    for f in flat:
        if isinstance(f, Const):
            coeff = _c_mul(coeff, f)
            continue
        if isinstance(f, Exp):
            exp_args.append(f.arg)
            continue
        base, e = _base_exp(f)
        powers[base] = _c_add(powers[base], e) if base in powers else e
    if coeff.is_zero:
        return ZERO
    out: list[Node] = []
    for base, e in powers.items():
        if e.is_zero:
            continue
        out.append(base if e.is_one else Pow(base, e))
    if exp_args:
        out.append(exp_(add(*exp_args)))
    out = [o for o in out if not (isinstance(o, Const) and o.is_one)]
    # exp_ may have folded to a constant
    consts = [o for o in out if isinstance(o, Const)]
    for c in consts:
        coeff = _c_mul(coeff, c)
    out = [o for o in out if not isinstance(o, Const)]
    if not out:
        return coeff
    if coeff.is_one and len(out) == 1:
        return out[0]
    return Mul(((coeff,) if not coeff.is_one else ()) + tuple(out))


def power(base: Node, e) -> Node:
    e = const(e)
    if e.is_zero:
        return ONE
    if e.is_one:
        return base
    if isinstance(base, Const):
        return _c_pow(base, e)
    if isinstance(base, Pow) and (isinstance(base.base, Var) or e.is_integer()):
        return power(base.base, _c_mul(base.exponent, e))
    if isinstance(base, Exp):
        return exp_(mul(e, base.arg))
    if isinstance(base, Mul) and e.is_integer():
        return mul(*(power(f, e) for f in base.factors))
    return Pow(base, e)


def log_(arg: Node) -> Node:
    if isinstance(arg, Const):
        with mpmath.workdps(WORK_DPS):
            if arg.value <= 0:
                raise ValueError("log of a non-positive constant")
            if arg.is_one:
                return ZERO
            return Const(mpmath.log(arg.value), None, None, f"log({_c_text(arg)})")
    if isinstance(arg, Exp):
        return arg.arg
    if isinstance(arg, Pow) and isinstance(arg.base, Var):
        return mul(arg.exponent, Log(T))
    return Log(arg)


def exp_(arg: Node) -> Node:
    if isinstance(arg, Const):
        if arg.is_zero:
            return ONE
        with mpmath.workdps(WORK_DPS):
            return Const(mpmath.exp(arg.value), None, None, f"exp({_c_text(arg)})")
    if isinstance(arg, Log):
        return arg.arg
    return Exp(arg)


def neg(x: Node) -> Node:
    return mul(rational(-1), x)


def sub(a: Node, b: Node) -> Node:
    return add(a, neg(b))


def div(a: Node, b: Node) -> Node:
    return mul(a, power(b, -1))


# --------------------------------------------------------------------------
# differentiation


def diff(node: Node) -> Node:
    """Exact first derivative with respect to ``t``."""
    if isinstance(node, Const):
        return ZERO
    if isinstance(node, Var):
        return ONE
    if isinstance(node, Add):
        return add(*(diff(t) for t in node.terms))
    if isinstance(node, Mul):
        fs = node.factors
        parts = []
        for i, f in enumerate(fs):
            d = diff(f)
            if isinstance(d, Const) and d.is_zero:
                continue
            parts.append(mul(*fs[:i], d, *fs[i + 1 :]))
        return add(*parts)
    if isinstance(node, Pow):
        return mul(node.exponent, power(node.base, _c_add(node.exponent, rational(-1))), diff(node.base))
    if isinstance(node, Log):
        return div(diff(node.arg), node.arg)
    if isinstance(node, Exp):
        return mul(node, diff(node.arg))
    raise TypeError(f"unknown node {node!r}")


# --------------------------------------------------------------------------
# evaluation


def eval_mp(node: Node, t) -> mpmath.mpf:
    """Evaluate at ``t`` with the current mpmath precision."""
    if isinstance(node, Const):
        return +node.value
    if isinstance(node, Var):
        return t
    if isinstance(node, Add):
        return mpmath.fsum(eval_mp(x, t) for x in node.terms)
    if isinstance(node, Mul):
        return mpmath.fprod(eval_mp(x, t) for x in node.factors)
    if isinstance(node, Pow):
        b = eval_mp(node.base, t)
        if node.exponent.is_integer():
            return b ** int(node.exponent.exact)
        return mpmath.power(b, node.exponent.value)
    if isinstance(node, Log):
        return mpmath.log(eval_mp(node.arg, t))
    if isinstance(node, Exp):
        return mpmath.exp(eval_mp(node.arg, t))
    raise TypeError(f"unknown node {node!r}")


def eval_np(node: Node, t: np.ndarray) -> np.ndarray:
    """Vectorized double precision evaluation."""
    if isinstance(node, Const):
        return np.full(np.shape(t), float(node.value))
    if isinstance(node, Var):
        return np.asarray(t, dtype=np.float64)
    if isinstance(node, Add):
        out = eval_np(node.terms[0], t)
        for x in node.terms[1:]:
            out = out + eval_np(x, t)
        return out
    if isinstance(node, Mul):
        out = eval_np(node.factors[0], t)
        for x in node.factors[1:]:
            out = out * eval_np(x, t)
        return out
    if isinstance(node, Pow):
        b = eval_np(node.base, t)
        if node.exponent.is_integer():
            return b ** int(node.exponent.exact) if node.exponent.exact >= 0 else 1.0 / b ** int(-node.exponent.exact)
        with np.errstate(invalid="ignore"):
            return np.power(b, float(node.exponent.value))
    if isinstance(node, Log):
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.log(eval_np(node.arg, t))
    if isinstance(node, Exp):
        return np.exp(eval_np(node.arg, t))
    raise TypeError(f"unknown node {node!r}")


# --------------------------------------------------------------------------
# printing (round-trips through the parser)


def to_text(node: Node) -> str:
    return _text(node, 0)


def _text(node: Node, prec: int) -> str:
    # prec: 0 sum context, 1 product context, 2 power base context
    if isinstance(node, Const):
        s = _c_text(node, atomic=prec >= 1)
        if prec >= 2 and not s.startswith("(") and (s.startswith("-") or "/" in s or " " in s):
            s = f"({s})"
        return s
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Add):
        parts = [_text(node.terms[0], 0)]
        for x in node.terms[1:]:
            c, rest = _split_coeff(x)
            if c.exact is not None and c.exact < 0:
                parts.append("- " + _text(mul(_c_neg(c), rest), 0))
            else:
                parts.append("+ " + _text(x, 0))
        s = " ".join(parts)
        return f"({s})" if prec >= 1 else s
    if isinstance(node, Mul):
        s = "*".join(_text(f, 1) for f in node.factors)
        return f"({s})" if prec >= 2 else s
    if isinstance(node, Pow):
        return f"{_text(node.base, 2)}^{_c_text(node.exponent, atomic=True)}"
    if isinstance(node, Log):
        return f"log({_text(node.arg, 0)})"
    if isinstance(node, Exp):
        return f"exp({_text(node.arg, 0)})"
    raise TypeError(f"unknown node {node!r}")


# --------------------------------------------------------------------------
# public wrapper


def _as_node(x) -> Node:
    if isinstance(x, HardyExpr):
        return x.node
    if isinstance(x, Node):
        return x
    return const(x)


_LADDER = tuple(2.0**j for j in range(0, 41))


class HardyExpr:
    """An immutable function of ``t`` with a cached symbolic derivative tower.

    Build with :func:`hplab.hardy.parse` or with the operators on
    :data:`t` (``t**1.5 + irr(sqrt2) * t``, ``log(t)**2``).
    """

    __slots__ = ("node", "_derivs", "_lock", "_t0")

    def __init__(self, node: Node):
        self.node = node
        self._derivs: list[HardyExpr] = [self]
        self._lock = threading.Lock()
        self._t0: Optional[float] = None

    # construction ------------------------------------------------------
    def __add__(self, other):
        return HardyExpr(add(self.node, _as_node(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return HardyExpr(sub(self.node, _as_node(other)))

    def __rsub__(self, other):
        return HardyExpr(sub(_as_node(other), self.node))

    def __mul__(self, other):
        return HardyExpr(mul(self.node, _as_node(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return HardyExpr(div(self.node, _as_node(other)))

    def __rtruediv__(self, other):
        return HardyExpr(div(_as_node(other), self.node))

    def __neg__(self):
        return HardyExpr(neg(self.node))

    def __pow__(self, e):
        e = e.node if isinstance(e, HardyExpr) else e
        if not isinstance(e, (Const, int, float, Fraction)):
            raise TypeError("exponents must be constants")
        return HardyExpr(power(self.node, e))

    def __eq__(self, other):
        return isinstance(other, HardyExpr) and other.node == self.node

    def __hash__(self):
        return hash(self.node)

    def __repr__(self):
        return f"HardyExpr({self.text!r})"

    def __str__(self):
        return self.text

    @property
    def text(self) -> str:
        return to_text(self.node)

    def is_constant(self) -> bool:
        return isinstance(self.node, Const)

    # derivatives -------------------------------------------------------
    def derivative(self, order: int = 1) -> "HardyExpr":
        """The ``order``-th derivative (cached; ``order = 0`` is ``self``)."""
        if order < 0:
            raise ValueError("order must be >= 0")
        with self._lock:
            while len(self._derivs) <= order:
                self._derivs.append(HardyExpr(diff(self._derivs[-1].node)))
            return self._derivs[order]

    # evaluation --------------------------------------------------------
    def mp(self, t, dps: int = 40) -> mpmath.mpf:
        """High precision value at ``t``."""
        with mpmath.workdps(dps):
            return eval_mp(self.node, mpmath.mpf(t))

    def __call__(self, t):
        """Double precision value(s); accepts scalars and arrays."""
        out = eval_np(self.node, np.asarray(t, dtype=np.float64))
        return float(out) if np.ndim(out) == 0 else out

    def log_abs(self, t, dps: int = 40) -> float:
        """``log|e(t)|`` computed without overflow (``-inf`` at zeros)."""
        with mpmath.workdps(dps):
            v = eval_mp(self.node, mpmath.mpf(t))
            if isinstance(v, mpmath.mpc):
                raise ValueError(f"{self.text} is not real at t={t}")
            if v == 0:
                return -math.inf
            return float(mpmath.log(abs(v)))

    @property
    def t0(self) -> float:
        """Validity threshold: the value is real and finite on the ladder ``2^j >= t0``."""
        if self._t0 is None:
            ok = []
            for x in _LADDER:
                try:
                    with mpmath.workdps(30):
                        v = eval_mp(self.node, mpmath.mpf(x))
                    ok.append(not isinstance(v, mpmath.mpc) and mpmath.isfinite(v))
                except (ValueError, ZeroDivisionError):
                    ok.append(False)
            t0 = math.inf
            for x, good in zip(reversed(_LADDER), reversed(ok)):
                if not good:
                    break
                t0 = x
            self._t0 = t0
        return self._t0


def as_expr(x) -> HardyExpr:
    if isinstance(x, HardyExpr):
        return x
    return HardyExpr(_as_node(x))


t = HardyExpr(T)


def log(x) -> HardyExpr:
    return HardyExpr(log_(_as_node(x)))


def exp(x) -> HardyExpr:
    return HardyExpr(exp_(_as_node(x)))


def irr(x, label: str = "") -> HardyExpr:
    """Mark a constant as irrational."""
    c = _as_node(x)
    if not isinstance(c, Const):
        raise ValueError("irr() applies to constants only")
    return HardyExpr(Const(c.value, None, IRRATIONAL, label or _c_text(c)))


def differentiate(e: HardyExpr, order: int) -> HardyExpr:
    """Exact symbolic derivative of order ``order`` (cached on ``e``)."""
    return as_expr(e).derivative(order)


def terms_of(node: Node) -> Iterable[Node]:
    return node.terms if isinstance(node, Add) else (node,)
