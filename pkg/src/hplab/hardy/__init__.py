"""Hardy-field functions: expressions, growth classification, Taylor models."""

from .expr import HardyExpr, as_expr, differentiate, exp, irr, log, t
from .parser import parse, parse_constant

__all__ = ["HardyExpr", "as_expr", "differentiate", "exp", "irr", "log", "parse", "parse_constant", "t"]
