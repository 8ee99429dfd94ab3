"""Regular bag expressions: intervals, syntax trees, textual syntax, core analyses."""

from .ast import (
    EPSILON,
    Concat,
    Disj,
    Epsilon,
    Isect,
    Plus,
    Rbe,
    Star,
    Symbol,
    concat,
    disj,
    isect,
    opt,
    plus,
    split_symbol,
    star,
    sym,
    typed_symbol,
)
from .bags import Bag, BagKey, bag, bag_from_key, bag_key, bag_sum
from .intervals import (
    ANY,
    EMPTY,
    ONCE,
    OPT,
    SOME,
    Interval,
    interval_add,
    interval_intersect,
)
from .ops import (
    EnumerationLimit,
    alphabet,
    choice_groups,
    enumerate_language,
    is_sorbe,
    is_symbol_product,
    normalize_product,
    nullable,
    project_sigma,
)
from .parse import ParseError, format_rbe, parse_rbe

__all__ = [
    "Interval",
    "interval_intersect",
    "interval_add",
    "EMPTY",
    "ONCE",
    "OPT",
    "ANY",
    "SOME",
    "Bag",
    "BagKey",
    "bag",
    "bag_key",
    "bag_from_key",
    "bag_sum",
    "Rbe",
    "Epsilon",
    "Symbol",
    "Disj",
    "Concat",
    "Star",
    "Plus",
    "Isect",
    "EPSILON",
    "sym",
    "disj",
    "concat",
    "star",
    "plus",
    "opt",
    "isect",
    "typed_symbol",
    "split_symbol",
    "EnumerationLimit",
    "nullable",
    "alphabet",
    "is_sorbe",
    "is_symbol_product",
    "choice_groups",
    "project_sigma",
    "enumerate_language",
    "normalize_product",
    "ParseError",
    "parse_rbe",
    "format_rbe",
]
