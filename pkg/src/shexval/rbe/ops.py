"""Structural analyses and bounded language operations for bag expressions."""

from __future__ import annotations

from collections import Counter

from .ast import Concat, Disj, Epsilon, Isect, Plus, Rbe, Star, Symbol, split_symbol
from .bags import BagKey, bag_from_key, bag_key, bag_sum
from .intervals import ONCE, Interval, interval_add

__all__ = [
    "EnumerationLimit",
    "nullable",
    "alphabet",
    "is_sorbe",
    "is_symbol_product",
    "choice_groups",
    "project_sigma",
    "enumerate_language",
    "normalize_product",
]


class EnumerationLimit(Exception):
    """Raised when language enumeration exceeds its bag budget."""


def nullable(e: Rbe) -> bool:
    """Whether the empty bag belongs to the language."""
    match e:
        case Epsilon():
            return True
        case Symbol(_, bounds):
            return 0 in bounds
        case Disj(left, right):
            return nullable(left) or nullable(right)
        case Concat(left, right):
            return nullable(left) and nullable(right)
        case Star(_):
            return True
        case Plus(body):
            return nullable(body)
        case Isect(left, right):
            return nullable(left) and nullable(right)
    raise TypeError(f"not an expression node: {e!r}")


def alphabet(e: Rbe) -> frozenset[str]:
    """All symbol names occurring in the expression."""
    match e:
        case Epsilon():
            return frozenset()
        case Symbol(name, _):
            return frozenset((name,))
        case Disj(left, right) | Concat(left, right) | Isect(left, right):
            return alphabet(left) | alphabet(right)
        case Star(body) | Plus(body):
            return alphabet(body)
    raise TypeError(f"not an expression node: {e!r}")


def is_sorbe(e: Rbe) -> bool:
    """Single-occurrence check: no symbol appears twice, no intersection nodes."""
    names: list[str] = []

    def walk(node: Rbe) -> bool:
        match node:
            case Epsilon():
                return True
            case Symbol(name, _):
                names.append(name)
                return True
            case Disj(left, right) | Concat(left, right):
                return walk(left) and walk(right)
            case Star(body) | Plus(body):
                return walk(body)
            case Isect(_, _):
                return False
        raise TypeError(f"not an expression node: {node!r}")

    return walk(e) and max(Counter(names).values(), default=0) <= 1


def is_symbol_product(e: Rbe) -> bool:
    """Whether e is built from eps, symbols, and unordered concatenation only."""
    match e:
        case Epsilon() | Symbol(_, _):
            return True
        case Concat(left, right):
            return is_symbol_product(left) and is_symbol_product(right)
        case _:
            return False


def choice_groups(e: Rbe) -> list[frozenset[str]] | None:
    """Decompose a concatenation of symbol-choice groups.

    When e has the shape ``(a1|...|an), (b1|...|bm), ...`` with every symbol
    required exactly once, returns the symbol set of each group; every member
    bag then picks exactly one symbol per group.  Returns None for any other
    shape.
    """
    groups: list[frozenset[str]] = []

    def group(node: Rbe) -> frozenset[str] | None:
        match node:
            case Symbol(name, bounds) if bounds == ONCE:
                return frozenset((name,))
            case Disj(left, right):
                gl, gr = group(left), group(right)
                if gl is None or gr is None:
                    return None
                return gl | gr
            case _:
                return None

    def walk(node: Rbe) -> bool:
        if isinstance(node, Concat):
            return walk(node.left) and walk(node.right)
        g = group(node)
        if g is None:
            return False
        groups.append(g)
        return True

    return groups if walk(e) else None


def project_sigma(e: Rbe) -> Rbe:
    """Erase the type part of every ``label::type`` symbol, keeping intervals."""
    match e:
        case Epsilon():
            return e
        case Symbol(name, bounds):
            label, _ = split_symbol(name)
            return Symbol(label, bounds)
        case Disj(left, right):
            return Disj(project_sigma(left), project_sigma(right))
        case Concat(left, right):
            return Concat(project_sigma(left), project_sigma(right))
        case Star(body):
            return Star(project_sigma(body))
        case Plus(body):
            return Plus(project_sigma(body))
        case Isect(left, right):
            return Isect(project_sigma(left), project_sigma(right))
    raise TypeError(f"not an expression node: {e!r}")


def enumerate_language(e: Rbe, max_size: int, limit: int = 1_000_000) -> set[BagKey]:
    """All bags of the language with at most ``max_size`` total occurrences.

    Raises EnumerationLimit when any intermediate result holds more than
    ``limit`` bags.
    """

    def guard(bags: set[BagKey]) -> set[BagKey]:
        if len(bags) > limit:
            raise EnumerationLimit(f"more than {limit} bags of size <= {max_size}")
        return bags

    def sums(xs: set[BagKey], ys: set[BagKey]) -> set[BagKey]:
        out: set[BagKey] = set()
        for kx in xs:
            sx = sum(c for _, c in kx)
            bx = bag_from_key(kx)
            for ky in ys:
                if sx + sum(c for _, c in ky) <= max_size:
                    out.add(bag_key(bag_sum(bx, bag_from_key(ky))))
        return guard(out)

    def closure(base: set[BagKey]) -> set[BagKey]:
        acc: set[BagKey] = {()}
        frontier: set[BagKey] = {()}
        while frontier:
            frontier = sums(frontier, base) - acc
            acc = guard(acc | frontier)
        return acc

    def go(node: Rbe) -> set[BagKey]:
        match node:
            case Epsilon():
                return {()}
            case Symbol(name, bounds):
                if bounds.is_empty:
                    return set()
                hi = max_size if bounds.hi is None else min(bounds.hi, max_size)
                return guard(
                    {((name, c),) if c else () for c in range(bounds.lo, hi + 1)}
                )
            case Disj(left, right):
                return guard(go(left) | go(right))
            case Concat(left, right):
                return sums(go(left), go(right))
            case Star(body):
                return closure(go(body))
            case Plus(body):
                return sums(go(body), closure(go(body)))
            case Isect(left, right):
                return go(left) & go(right)
        raise TypeError(f"not an expression node: {node!r}")

    return go(e)


def normalize_product(e: Rbe) -> dict[str, Interval] | None:
    """Canonical per-symbol intervals for a concatenation of symbols.

    Repeated symbols merge by interval addition.  Returns None when some
    merged interval is empty, which makes the whole language empty.  Raises
    ValueError for shapes outside the symbol-product fragment.
    """
    acc: dict[str, Interval] = {}

    def walk(node: Rbe) -> None:
        match node:
            case Epsilon():
                pass
            case Symbol(name, bounds):
                acc[name] = interval_add(acc[name], bounds) if name in acc else bounds
            case Concat(left, right):
                walk(left)
                walk(right)
            case _:
                raise ValueError("not a concatenation of symbols")

    walk(e)
    if any(iv.is_empty for iv in acc.values()):
        return None
    return acc
