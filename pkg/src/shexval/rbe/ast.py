"""Syntax trees for regular bag expressions.

A regular bag expression denotes a set of finite multisets ("bags") of
symbols.  Concatenation is unordered: the bag of ``E1, E2`` is the multiset
sum of a bag of ``E1`` and a bag of ``E2``, so ``a,b`` and ``b,a`` denote the
same language.  Symbols carry multiplicity intervals; ``a`` alone means
exactly one occurrence.

Symbols are opaque strings.  A symbol of the form ``label::type`` pairs an
edge label with the shape type required of the edge's target; helpers below
split and join that form.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intervals import ONCE, Interval

__all__ = [
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
]


class Rbe:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Epsilon(Rbe):
    """Only the empty bag."""


@dataclass(frozen=True)
class Symbol(Rbe):
    """A single symbol with a multiplicity interval; ``a^[2;3]`` is Symbol("a", [2;3])."""

    name: str
    bounds: Interval = ONCE


@dataclass(frozen=True)
class Disj(Rbe):
    """Union of the two operand languages."""

    left: Rbe
    right: Rbe


@dataclass(frozen=True)
class Concat(Rbe):
    """Multiset sums of one bag from each operand (unordered concatenation)."""

    left: Rbe
    right: Rbe


@dataclass(frozen=True)
class Star(Rbe):
    """Multiset sums of any number of bags of the body, including none."""

    body: Rbe


@dataclass(frozen=True)
class Plus(Rbe):
    """Multiset sums of one or more bags of the body."""

    body: Rbe


@dataclass(frozen=True)
class Isect(Rbe):
    """Bags belonging to both operand languages.

    Not part of the content-model grammar; used to pose satisfiability
    questions about language intersections.
    """

    left: Rbe
    right: Rbe


EPSILON = Epsilon()


def sym(name: str, bounds: Interval = ONCE) -> Symbol:
    return Symbol(name, bounds)


def disj(left: Rbe, right: Rbe) -> Disj:
    return Disj(left, right)


def concat(left: Rbe, right: Rbe) -> Concat:
    return Concat(left, right)


def star(body: Rbe) -> Star:
    return Star(body)


def plus(body: Rbe) -> Rbe:
    """One-or-more repetition.

    When the body accepts the empty bag the language equals the body's star,
    and downstream interval reasoning assumes repeated parts are non-empty,
    so that case is rewritten to Star here.
    """
    from .ops import nullable

    if nullable(body):
        return Star(body)
    return Plus(body)


def opt(body: Rbe) -> Rbe:
    """Zero-or-one: sugar for ``eps | body``."""
    return Disj(EPSILON, body)


def isect(left: Rbe, right: Rbe) -> Isect:
    return Isect(left, right)


def typed_symbol(label: str, type_name: str) -> str:
    return f"{label}::{type_name}"


def split_symbol(name: str) -> tuple[str, str | None]:
    """Split ``label::type`` into its parts; a plain label yields (label, None)."""
    label, sep, type_name = name.partition("::")
    if not sep:
        return name, None
    return label, type_name
