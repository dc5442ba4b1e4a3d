"""Miniature computer-algebra kernel used by every solver."""
from .expr import (ONE, PI, ZERO, Acos, Add, Asin, Atan2, Cos, Expr, Kind, Mul,
                   Num, PiConst, Pow, Sin, Sqrt, Sym, Tan, as_expr, canonicalize,
                   sort_key)
from .evaluate import DomainError, DomainKind, UnboundSymbol, eval_numeric
from .match import (depends_on, free_symbols, free_unknowns, match_linear,
                    match_trig_linear, replace_symbols, size, substitute, terms)
from .trig import contract_angle_sums

__all__ = [
    "ONE", "PI", "ZERO", "Acos", "Add", "Asin", "Atan2", "Cos", "Expr", "Kind",
    "Mul", "Num", "PiConst", "Pow", "Sin", "Sqrt", "Sym", "Tan", "as_expr",
    "canonicalize", "sort_key", "DomainError", "DomainKind", "UnboundSymbol",
    "eval_numeric", "depends_on", "free_symbols", "free_unknowns",
    "match_linear", "match_trig_linear", "replace_symbols", "size",
    "substitute", "terms", "contract_angle_sums",
]
