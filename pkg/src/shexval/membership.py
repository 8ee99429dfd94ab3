"""Bag membership: the single-occurrence interval algorithm and a general
linear-system fallback.

For single-occurrence expressions the decision is polynomial: a bottom-up
pass computes, for each subexpression, the interval of repetition counts
under which the relevant slice of the bag could have been produced.  The
bag belongs to the language exactly when that interval admits one
repetition and no stray symbols remain.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .rbe import (
    ANY,
    Bag,
    Concat,
    Disj,
    EMPTY,
    Epsilon,
    Interval,
    Plus,
    Rbe,
    SOME,
    Star,
    Symbol,
    alphabet,
    interval_add,
    interval_intersect,
    is_sorbe,
    nullable,
)
from .sat import LinearSystem, SolverCapped, encode_phi, ilp_feasible

__all__ = [
    "MembershipWitness",
    "sorbe_interval",
    "sorbe_member",
    "member_general",
    "member",
]


@dataclass
class MembershipWitness:
    verdict: bool
    interval: Interval | None
    algorithm: str  # "sorbe-interval" | "ilp"


def sorbe_interval(w: Bag, e: Rbe) -> Interval:
    """Repetition counts i such that the bag, restricted to the alphabet of
    ``e``, splits into i member bags of ``e``."""
    if not is_sorbe(e):
        raise ValueError("expression is not single-occurrence")
    return _tile(Counter(w), e)


def _tile(w: Counter[str], e: Rbe) -> Interval:
    match e:
        case Epsilon():
            return ANY
        case Symbol(name, bounds):
            return _symbol_tiling(w[name], bounds)
        case Disj(left, right):
            return interval_add(_tile(w, left), _tile(w, right))
        case Concat(left, right):
            return interval_intersect(_tile(w, left), _tile(w, right))
        case Star(body):
            if not _touches(w, body):
                return ANY
            return EMPTY if _tile(w, body).is_empty else SOME
        case Plus(body):
            if nullable(body):
                # One-or-more over a nullable body repeats like a star.
                if not _touches(w, body):
                    return ANY
                return EMPTY if _tile(w, body).is_empty else SOME
            if not _touches(w, body):
                return Interval(0, 0)
            inner = _tile(w, body)
            return EMPTY if inner.is_empty else Interval(1, inner.hi)
    raise TypeError(f"not an expression node: {e!r}")


def _symbol_tiling(count: int, bounds: Interval) -> Interval:
    # Splitting `count` copies into i runs of length lo..hi requires
    # i*lo <= count <= i*hi; divisors 0 and infinity follow the natural
    # limit reading (count/inf is 0 or 1, positive/0 is unattainable).
    if bounds.hi is None:
        lo = 0 if count == 0 else 1
    elif bounds.hi == 0:
        if count:
            return EMPTY
        lo = 0
    else:
        lo = -(-count // bounds.hi)
    hi = None if bounds.lo == 0 else count // bounds.lo
    return Interval(lo, hi)


def _touches(w: Counter[str], e: Rbe) -> bool:
    return any(w[a] for a in alphabet(e))


def sorbe_member(w: Bag, e: Rbe) -> bool:
    """Membership for single-occurrence expressions, in polynomial time."""
    bag = Counter(w)
    names = alphabet(e)
    if any(count and s not in names for s, count in bag.items()):
        return False
    return 1 in sorbe_interval(bag, e)


def member_general(w: Bag, e: Rbe) -> bool:
    """Exact membership for any expression via the arithmetic encoding.

    Every unknown in the encoding is dominated by the bag size plus one, so
    the bounded search is complete.
    """
    bag = Counter(w)
    system = LinearSystem()
    xvars = encode_phi(e, system)
    if any(count and s not in xvars for s, count in bag.items()):
        return False
    for s, x in xvars.items():
        system.eq({x: 1}, bag.get(s, 0))
    result = ilp_feasible(system, bound=sum(bag.values()) + 1)
    if result.status == "unknown":
        raise SolverCapped("membership search was cut off below its completeness bound")
    return result.status == "sat"


def member(w: Bag, e: Rbe) -> MembershipWitness:
    """Decide membership, preferring the interval algorithm when it applies."""
    if is_sorbe(e):
        bag = Counter(w)
        interval = sorbe_interval(bag, e)
        names = alphabet(e)
        verdict = 1 in interval and not any(
            count and s not in names for s, count in bag.items()
        )
        return MembershipWitness(verdict, interval, "sorbe-interval")
    return MembershipWitness(member_general(w, e), None, "ilp")
