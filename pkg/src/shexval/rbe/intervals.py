"""Closed intervals over the non-negative integers, with an optional unbounded top."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "Interval",
    "EMPTY",
    "ONCE",
    "OPT",
    "ANY",
    "SOME",
    "interval_intersect",
    "interval_add",
]


@dataclass(frozen=True)
class Interval:
    """Multiplicity constraint ``[lo; hi]``; ``hi=None`` means unbounded above.

    The empty interval is canonical: any pair with ``lo > hi`` normalizes to
    ``(1, 0)``, so ``==`` behaves as set equality.
    """

    lo: int = 0
    hi: int | None = None

    def __post_init__(self) -> None:
        if self.lo < 0 or (self.hi is not None and self.hi < 0):
            raise ValueError(f"negative interval bound: [{self.lo}; {self.hi}]")
        if self.hi is not None and self.lo > self.hi and (self.lo, self.hi) != (1, 0):
            object.__setattr__(self, "lo", 1)
            object.__setattr__(self, "hi", 0)

    @property
    def is_empty(self) -> bool:
        return self.hi == 0 and self.lo == 1

    def __contains__(self, count: int) -> bool:
        return self.lo <= count and (self.hi is None or count <= self.hi)

    def __str__(self) -> str:
        if self.is_empty:
            return "[empty]"
        return f"[{self.lo};{'*' if self.hi is None else self.hi}]"


EMPTY = Interval(1, 0)
ONCE = Interval(1, 1)
OPT = Interval(0, 1)
ANY = Interval(0, None)
SOME = Interval(1, None)


def interval_intersect(a: Interval, b: Interval) -> Interval:
    """Set intersection of two intervals; inverted results collapse to EMPTY."""
    if a.is_empty or b.is_empty:
        return EMPTY
    lo = max(a.lo, b.lo)
    if a.hi is None:
        hi = b.hi
    elif b.hi is None:
        hi = a.hi
    else:
        hi = min(a.hi, b.hi)
    return Interval(lo, hi)


def interval_add(a: Interval, b: Interval) -> Interval:
    """Pointwise sum ``{n + m : n in a, m in b}``; EMPTY absorbs."""
    if a.is_empty or b.is_empty:
        return EMPTY
    hi = None if a.hi is None or b.hi is None else a.hi + b.hi
    return Interval(a.lo + b.lo, hi)
