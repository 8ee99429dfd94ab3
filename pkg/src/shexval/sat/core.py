"""Satisfiability, intersection nonemptiness, and ambiguity analysis.

The workhorse is an arithmetic encoding of bag membership: an expression
holding a bag is described by one count unknown per alphabet symbol plus a
repetition unknown per subexpression, linked by linear equations.  A bag
belongs to the language exactly when the system has a solution with the
top-level repetition count pinned to one.  Expressions built from interval
symbols, unordered concatenation, and intersection alone skip the solver:
their languages collapse to one interval per symbol.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..rbe import (
    Concat,
    Disj,
    Epsilon,
    Interval,
    Isect,
    Plus,
    Rbe,
    Star,
    Symbol,
    alphabet,
    choice_groups,
    interval_add,
    interval_intersect,
    normalize_product,
    split_symbol,
)
from .flow import build_flow_network, circulation_exists
from .ilp import IlpResult, LinearSystem, SolverCapped, ilp_feasible

__all__ = [
    "encode_phi",
    "inter1",
    "inter1_groups",
    "SatResult",
    "rbe_satisfiable",
    "normal_form_isect",
    "AmbiguityResult",
    "is_unambiguous",
]


def encode_phi(e: Rbe, system: LinearSystem) -> dict[str, str]:
    """Append membership constraints for ``e`` and return its count unknowns.

    The returned map sends each alphabet symbol to the unknown holding its
    multiplicity in the candidate bag; the top-level repetition count is
    fixed at one.  Callers pin the count unknowns for membership queries or
    leave them free for satisfiability.

    Intersection nodes are rejected under Star or Plus: with a repetition
    count above one the two operands could split the bag differently, so the
    conjunction of their constraints would overapproximate the language.
    """
    xvars = {a: system.fresh_var("x") for a in sorted(alphabet(e))}
    root = system.fresh_var("n")
    system.eq({root: 1}, 1)
    _phi(e, xvars, root, system, under_repeat=False)
    return xvars


def _phi(
    e: Rbe,
    xvars: dict[str, str],
    n: str,
    system: LinearSystem,
    under_repeat: bool,
) -> None:
    match e:
        case Epsilon():
            return
        case Symbol(name, bounds):
            x = xvars[name]
            if bounds.is_empty:
                # Empty language: only zero copies, consuming nothing.
                system.eq({n: 1}, 0)
                system.eq({x: 1}, 0)
                return
            if bounds.lo > 0:
                system.ge({x: 1, n: -bounds.lo}, 0)
            if bounds.hi is not None:
                system.le({x: 1, n: -bounds.hi}, 0)
            else:
                # Nothing bounds x from above, so zero copies must be forced
                # to consume nothing explicitly.
                system.case(
                    [system.make_eq({n: 1}, 0), system.make_eq({x: 1}, 0)],
                    [system.make_ge({n: 1}, 1)],
                )
            return
        case Disj(left, right):
            nl = system.fresh_var("n")
            nr = system.fresh_var("n")
            system.eq({nl: 1, nr: 1, n: -1}, 0)
            lx, rx = _split(xvars, alphabet(left), alphabet(right), system)
            _phi(left, lx, nl, system, under_repeat)
            _phi(right, rx, nr, system, under_repeat)
            return
        case Concat(left, right):
            lx, rx = _split(xvars, alphabet(left), alphabet(right), system)
            _phi(left, lx, n, system, under_repeat)
            _phi(right, rx, n, system, under_repeat)
            return
        case Star(body):
            zero = [system.make_eq({n: 1}, 0)]
            zero.extend(system.make_eq({x: 1}, 0) for x in xvars.values())
            system.case(zero, [system.make_ge({n: 1}, 1)])
            inner = system.fresh_var("n")
            _phi(body, xvars, inner, system, under_repeat=True)
            return
        case Plus(body):
            _phi(Concat(body, Star(body)), xvars, n, system, under_repeat)
            return
        case Isect(left, right):
            if under_repeat:
                raise ValueError(
                    "intersection under a repetition operator is not supported"
                )
            la, ra = alphabet(left), alphabet(right)
            for a, x in xvars.items():
                if a not in la or a not in ra:
                    system.eq({x: 1}, 0)
            _phi(left, {a: xvars[a] for a in la}, n, system, under_repeat)
            _phi(right, {a: xvars[a] for a in ra}, n, system, under_repeat)
            return
    raise TypeError(f"not an expression node: {e!r}")


def _split(
    xvars: dict[str, str],
    left_alpha: frozenset[str],
    right_alpha: frozenset[str],
    system: LinearSystem,
) -> tuple[dict[str, str], dict[str, str]]:
    """Divide the parent's counts between two children by alphabet."""
    left: dict[str, str] = {}
    right: dict[str, str] = {}
    for a, x in xvars.items():
        if a in left_alpha and a in right_alpha:
            xl = system.fresh_var("x")
            xr = system.fresh_var("x")
            system.eq({xl: 1, xr: 1, x: -1}, 0)
            left[a] = xl
            right[a] = xr
        elif a in left_alpha:
            left[a] = x
        elif a in right_alpha:
            right[a] = x
    return left, right


def inter1_groups(
    groups: list[frozenset[str] | set[str]], intervals: dict[str, Interval]
) -> bool:
    """Nonemptiness of {bags picking one symbol per group} ∩ {per-symbol intervals}."""
    return circulation_exists(build_flow_network(groups, intervals))


def inter1(choice_expr: Rbe, other: Rbe) -> bool:
    """Decide whether a choice-group language meets another language.

    ``choice_expr`` must be an unordered concatenation of single-occurrence
    disjunction groups.  When ``other`` reduces to per-symbol intervals the
    question becomes a circulation problem; otherwise both expressions are
    encoded arithmetically over shared count unknowns.  Since every member
    of the left language has exactly one symbol per group, the search is
    complete at bag size plus one.
    """
    if isinstance(choice_expr, Epsilon):
        groups: list[frozenset[str]] = []
    else:
        decomposed = choice_groups(choice_expr)
        if decomposed is None:
            raise ValueError("left operand is not a concatenation of choice groups")
        groups = decomposed
    try:
        intervals = normalize_product(other)
    except ValueError:
        return _inter1_ilp(choice_expr, other, len(groups))
    if intervals is None:
        return False
    return inter1_groups(groups, intervals)


def _inter1_ilp(choice_expr: Rbe, other: Rbe, k: int) -> bool:
    system = LinearSystem()
    left = encode_phi(choice_expr, system)
    right = encode_phi(other, system)
    for a in sorted(set(left) | set(right)):
        if a in left and a in right:
            system.eq({left[a]: 1, right[a]: -1}, 0)
        else:
            system.eq({left.get(a, right.get(a)): 1}, 0)
    result = ilp_feasible(system, bound=k + 1)
    if result.status == "unknown":
        raise SolverCapped(f"intersection test capped at bound {k + 1}")
    return result.status == "sat"


@dataclass
class SatResult:
    status: str  # "sat" | "unsat" | "unknown"
    witness: Counter[str] | None


class _NotProductClass(Exception):
    pass


def _product_form(e: Rbe) -> dict[str, Interval] | None:
    """Per-symbol intervals for expressions over interval symbols, unordered
    concatenation, and intersection; None when the language is empty."""
    match e:
        case Epsilon():
            return {}
        case Symbol(name, bounds):
            if bounds.is_empty:
                return None
            return {name: bounds}
        case Concat(left, right):
            lf, rf = _product_form(left), _product_form(right)
            if lf is None or rf is None:
                return None
            merged = dict(lf)
            for a, iv in rf.items():
                merged[a] = interval_add(merged[a], iv) if a in merged else iv
            return merged
        case Isect(left, right):
            lf, rf = _product_form(left), _product_form(right)
            if lf is None or rf is None:
                return None
            zero = Interval(0, 0)
            merged = {}
            for a in sorted(set(lf) | set(rf)):
                iv = interval_intersect(lf.get(a, zero), rf.get(a, zero))
                if iv.is_empty:
                    return None
                merged[a] = iv
            return merged
    raise _NotProductClass


def normal_form_isect(e1: Rbe, e2: Rbe) -> dict[str, Interval] | None:
    """Per-symbol intervals of the intersection of two interval-product
    languages; None when the intersection is empty.

    A symbol missing on one side is constrained to zero occurrences there.
    """
    try:
        return _product_form(Isect(e1, e2))
    except _NotProductClass:
        raise ValueError(
            "operands are not built from interval symbols, unordered "
            "concatenation, and intersection"
        ) from None


def _structurally_nonempty(e: Rbe) -> Counter[str] | None:
    """A smallest member of an intersection-free expression, or None."""
    match e:
        case Epsilon() | Star(_):
            return Counter()
        case Symbol(name, bounds):
            if bounds.is_empty:
                return None
            return Counter({name: bounds.lo}) if bounds.lo else Counter()
        case Disj(left, right):
            w = _structurally_nonempty(left)
            return w if w is not None else _structurally_nonempty(right)
        case Concat(left, right):
            wl = _structurally_nonempty(left)
            wr = _structurally_nonempty(right)
            if wl is None or wr is None:
                return None
            wl.update(wr)
            return wl
        case Plus(body):
            return _structurally_nonempty(body)
    raise TypeError(f"not an expression node: {e!r}")


def _has_isect(e: Rbe) -> bool:
    match e:
        case Isect(_, _):
            return True
        case Disj(left, right) | Concat(left, right):
            return _has_isect(left) or _has_isect(right)
        case Star(body) | Plus(body):
            return _has_isect(body)
        case _:
            return False


def rbe_satisfiable(e: Rbe, *, cap: int | None = None) -> SatResult:
    """Decide language nonemptiness, producing a witness bag when satisfiable.

    Intersection-free expressions and interval-product expressions (with
    intersection) are decided structurally; the rest goes through the
    arithmetic encoding with ``cap`` limiting the search.
    """
    if not _has_isect(e):
        witness = _structurally_nonempty(e)
        if witness is None:
            return SatResult("unsat", None)
        return SatResult("sat", witness)
    try:
        merged = _product_form(e)
    except _NotProductClass:
        pass
    else:
        if merged is None:
            return SatResult("unsat", None)
        return SatResult(
            "sat", Counter({a: iv.lo for a, iv in merged.items() if iv.lo})
        )
    system = LinearSystem()
    xvars = encode_phi(e, system)
    result = ilp_feasible(system, cap=cap)
    return SatResult(result.status, _decode(result, xvars))


def _decode(result: IlpResult, xvars: dict[str, str]) -> Counter[str] | None:
    if result.model is None:
        return None
    return Counter(
        {a: result.model[v] for a, v in xvars.items() if result.model.get(v)}
    )


@dataclass
class AmbiguityResult:
    status: str  # "unambiguous" | "ambiguous"
    witness: tuple[Counter[str], Counter[str]] | None


def is_unambiguous(e: Rbe, *, cap: int | None = None) -> AmbiguityResult:
    """Whether no member bag uses one label with two types and no two members
    with equal label projections swap types on a shared label.

    Expressions using every label with a single type are unambiguous
    outright.  Otherwise each clashing (label, type, type) pair is probed
    with two systems: one member containing both typed symbols, or two
    members with equal label projections where one counts the label under
    the first type exactly as the other counts it under the second, at
    least once.  Raises SolverCapped when a probe is inconclusive.
    """
    if _has_isect(e):
        raise ValueError("ambiguity analysis requires an intersection-free expression")
    by_label: dict[str, set[str | None]] = {}
    for symbol in sorted(alphabet(e)):
        label, type_name = split_symbol(symbol)
        by_label.setdefault(label, set()).add(type_name)
    pairs = [
        (label, t1, t2)
        for label, types in sorted(by_label.items())
        if len(types) > 1
        for t1 in sorted(types, key=str)
        for t2 in sorted(types, key=str)
        if str(t1) < str(t2)
    ]
    if not pairs:
        return AmbiguityResult("unambiguous", None)

    saw_unknown = False
    for label, t1, t2 in pairs:
        s1 = _rejoin(label, t1)
        s2 = _rejoin(label, t2)
        # One member using the label with both types.
        system = LinearSystem()
        xvars = encode_phi(e, system)
        system.ge({xvars[s1]: 1}, 1)
        system.ge({xvars[s2]: 1}, 1)
        result = ilp_feasible(system, cap=cap)
        if result.status == "sat":
            w = _decode(result, xvars)
            return AmbiguityResult("ambiguous", (w, w))
        saw_unknown = saw_unknown or result.status == "unknown"
        # Two members, equal label projections, the clashing label counted
        # equally often under the two types, at least once.
        system = LinearSystem()
        xvars = encode_phi(e, system)
        yvars = encode_phi(e, system)
        for lab, types in by_label.items():
            coeffs: dict[str, int] = {}
            for t in types:
                coeffs[xvars[_rejoin(lab, t)]] = 1
                coeffs[yvars[_rejoin(lab, t)]] = -1
            system.eq(coeffs, 0)
        system.eq({xvars[s1]: 1, yvars[s2]: -1}, 0)
        system.ge({xvars[s1]: 1}, 1)
        result = ilp_feasible(system, cap=cap)
        if result.status == "sat":
            return AmbiguityResult(
                "ambiguous", (_decode(result, xvars), _decode(result, yvars))
            )
        saw_unknown = saw_unknown or result.status == "unknown"
    if saw_unknown:
        raise SolverCapped("ambiguity probes exhausted the search cap")
    return AmbiguityResult("unambiguous", None)


def _rejoin(label: str, type_name: str | None) -> str:
    return label if type_name is None else f"{label}::{type_name}"
