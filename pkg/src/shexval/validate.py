"""Validation of graphs against shape schemas.

Two semantics are implemented.  Under single-type semantics every node
carries exactly one type and its outbound neighborhood, with targets
replaced by their types, must belong to that type's bag language.  Under
multi-type semantics every node carries a non-empty set of types and, for
each of them, some flattening of the neighborhood (one type picked per
edge from the target's set) must belong to the language.

The workhorses are:

* refinement — start from a candidate m-typing and repeatedly delete
  locally unsatisfiable types; the fixpoint from the full typing is the
  unique maximal valid m-typing (when non-empty everywhere),
* flooding — extend a partial pre-typing along edges, computing the
  minimal valid extension instead of the maximal typing,
* brute force — enumerate assignments outright, as a reference oracle.

Refinement supports interchangeable per-node tests: a general
intersection-nonemptiness test that works for every schema, a circulation
test for schemas whose rules are symbol products, and two shortcuts for
deterministic single-occurrence schemas.  All of them compute the same
fixpoint on schemas where their preconditions hold.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, replace

from .graph import Graph
from .membership import member
from .rbe import (
    Bag,
    Concat,
    Disj,
    EPSILON,
    Epsilon,
    ParseError,
    Rbe,
    Symbol,
    alphabet,
    normalize_product,
    project_sigma,
    split_symbol,
    typed_symbol,
)
from .sat import inter1, inter1_groups
from .schema import (
    TOP,
    Schema,
    SemanticLanguage,
    check_deterministic,
    rule_member,
    universal_language_member,
)

__all__ = [
    "ALGORITHMS",
    "BRUTE_CAP",
    "BruteCapExceeded",
    "INITS",
    "STRATEGIES",
    "ValidationReport",
    "out_lab_type_s",
    "out_lab_type_m",
    "flatten",
    "check_s_typing",
    "check_m_typing",
    "m_typing_leq",
    "refine_step",
    "structure_filtered_init",
    "refine_fixpoint",
    "infer_types",
    "validate_multi",
    "flood_extension",
    "brute_force_single",
    "brute_force_multi",
    "remaining_edges",
    "format_pretyping",
    "parse_pretyping",
    "report_lines",
]

STRATEGIES = ("general", "rbe0-flow", "det-membership", "structure-filtered")
INITS = ("full-gamma", "structure-filtered")
ALGORITHMS = ("refine", "s-refine", "rbe0-refine", "flood", "brute")

# Bound on the number of assignments the brute-force searches may visit.
BRUTE_CAP = 2_000_000


class BruteCapExceeded(ValueError):
    """The brute-force assignment space is too large to sweep."""


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a validation run.

    ``typing`` maps nodes either to a single type (single-type modes) or
    to a frozenset of types; nodes never reached by flooding are absent.
    ``failures`` holds (node, type, reason) triples and is empty exactly
    when ``valid`` is true.  ``iterations`` counts refinement rounds or
    processed flooding obligations.  ``edges_examined`` counts outbound
    neighborhood scans during flooding, including repeats on backtracking.
    """

    valid: bool
    typing: Mapping[str, object]
    failures: tuple[tuple[str, str, str], ...] = ()
    remaining_edges: frozenset[tuple[str, str, str]] = frozenset()
    iterations: int = 0
    algorithm: str = ""
    edges_examined: int = 0


def out_lab_type_s(g: Graph, typing: Mapping[str, str], n: str) -> Bag:
    """The outbound neighborhood of ``n`` with targets replaced by their
    assigned single type: the bag of ``label::type`` symbols."""
    return Counter(typed_symbol(a, typing[m]) for a, m in g.out_lab_node(n))


def out_lab_type_m(
    g: Graph, typing: Mapping[str, Iterable[str]], n: str
) -> Counter[tuple[str, frozenset[str]]]:
    """Like :func:`out_lab_type_s` but for set-valued typings: a bag of
    (label, type set) pairs."""
    return Counter((a, frozenset(typing[m])) for a, m in g.out_lab_node(n))


def _neighborhood_key(neighborhood: Counter) -> tuple:
    return tuple(
        sorted((a, tuple(sorted(types)), c) for (a, types), c in neighborhood.items())
    )


def flatten(neighborhood: Counter[tuple[str, frozenset[str]]]) -> Rbe:
    """The choice-group expression of a bag of labeled type sets.

    Every occurrence of (a, T) contributes one group ``(a::t1 | ... | a::tk)``
    over the types of T, so the language of the result is exactly the set of
    flattenings: bags obtained by picking one type per occurrence.  The empty
    bag yields the empty-product expression whose language is {empty bag}.
    """
    expr: Rbe = EPSILON
    for (a, types), count in sorted(neighborhood.items(), key=_flatten_key):
        if not types:
            raise ValueError(f"empty type set under label {a!r}")
        group: Rbe | None = None
        for t in sorted(types):
            choice = Symbol(typed_symbol(a, t))
            group = choice if group is None else Disj(group, choice)
        for _ in range(count):
            expr = group if isinstance(expr, Epsilon) else Concat(expr, group)
    return expr


def _flatten_key(item: tuple[tuple[str, frozenset[str]], int]) -> tuple:
    (a, types), _ = item
    return (a, sorted(types))


def check_s_typing(g: Graph, s: Schema, typing: Mapping[str, str]) -> bool:
    """Whether a total single-type assignment is valid: every node's typed
    neighborhood belongs to its type's language."""
    missing = g.nodes - typing.keys()
    if missing:
        raise ValueError(f"typing assigns no type to node {min(missing)!r}")
    return all(
        rule_member(s, out_lab_type_s(g, typing, n), typing[n]) for n in g.nodes
    )


def check_m_typing(g: Graph, s: Schema, typing: Mapping[str, Iterable[str]]) -> bool:
    """Whether a set-valued assignment is valid: total, nowhere empty, and
    each assigned type matched by some flattening of the neighborhood."""
    if g.nodes - typing.keys() or not all(typing[n] for n in g.nodes):
        return False
    return all(
        _some_flattening_member(s, out_lab_type_m(g, typing, n), t)
        for n in g.nodes
        for t in typing[n]
    )


def m_typing_leq(first: Mapping[str, Iterable[str]], second: Mapping[str, Iterable[str]]) -> bool:
    """Pointwise containment of set-valued typings (absent nodes are empty)."""
    return all(set(ts) <= set(second.get(n, ())) for n, ts in first.items())


def _some_flattening_member(
    s: Schema, neighborhood: Counter[tuple[str, frozenset[str]]], t: str
) -> bool:
    """Whether some flattening of the neighborhood satisfies ``t``'s rule."""
    rule = s.delta[t]
    if isinstance(rule, SemanticLanguage):
        if rule.member is universal_language_member:
            return True
        return _enumerate_flattenings(neighborhood, rule)
    if any(not types for (_, types) in neighborhood):
        return False
    return inter1(flatten(neighborhood), rule)


def _enumerate_flattenings(
    neighborhood: Counter[tuple[str, frozenset[str]]], rule: SemanticLanguage
) -> bool:
    # Opaque languages admit no intersection test; try the flattenings
    # one by one.  Occurrences of the same (label, set) pair are
    # interchangeable, so unordered picks suffice.
    per_item: list[list[Counter[str]]] = []
    for (a, types), count in sorted(neighborhood.items(), key=_flatten_key):
        if not types:
            return False
        per_item.append(
            [
                Counter(typed_symbol(a, pick) for pick in picks)
                for picks in itertools.combinations_with_replacement(
                    sorted(types), count
                )
            ]
        )
    for assignment in itertools.product(*per_item):
        w: Counter[str] = Counter()
        for part in assignment:
            w.update(part)
        if rule.member(w):
            return True
    return False


class _RefineEngine:
    """One refinement round against a fixed graph and schema.

    Schema analyses (successor maps, label projections, interval products)
    happen once at construction; per-node verdicts for the general strategy
    are memoized by neighborhood shape, which collapses the many
    identically-shaped nodes of large graphs into a handful of tests.
    """

    def __init__(self, g: Graph, s: Schema, strategy: str):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.g = g
        self.s = s
        self.strategy = strategy
        flags = s.class_flags
        if strategy == "rbe0-flow":
            if not flags.rbe0:
                raise ValueError(
                    "the rbe0-flow strategy needs a schema of symbol products"
                )
            self.products = s._derived.get("refine:products")
            if self.products is None:
                self.products = {
                    t: normalize_product(rule)
                    for t, rule in _expression_rules(s).items()
                }
                s._derived["refine:products"] = self.products
        if strategy in ("det-membership", "structure-filtered"):
            if not (flags.deterministic and flags.sorbe):
                raise ValueError(
                    f"the {strategy} strategy needs a deterministic "
                    "single-occurrence schema"
                )
            _, succ = check_deterministic(s)
            self.succ = succ
            self.projected = _projected_rules(s)
        # Verdict memos depend only on the schema, so engines over the same
        # schema share them; repeat validations start warm.
        self._memo: dict[tuple, bool] = s._derived.setdefault(
            f"refine:memo:{strategy}", {}
        )

    def step(self, typing: Mapping[str, frozenset[str]]) -> dict[str, frozenset[str]]:
        """All nodes re-tested against the previous round's typing."""
        out: dict[str, frozenset[str]] = {}
        for n in self.g.nodes:
            out[n] = frozenset(
                t for t in typing[n] if t == TOP or self._survives(n, t, typing)
            )
        return out

    def _survives(
        self, n: str, t: str, typing: Mapping[str, frozenset[str]]
    ) -> bool:
        if self.strategy == "general":
            neighborhood = out_lab_type_m(self.g, typing, n)
            key = (t, _neighborhood_key(neighborhood))
            if key not in self._memo:
                self._memo[key] = _some_flattening_member(self.s, neighborhood, t)
            return self._memo[key]
        if self.strategy == "rbe0-flow":
            rule = self.s.delta[t]
            if isinstance(rule, SemanticLanguage):
                return rule.member is universal_language_member
            intervals = self.products[t]
            if intervals is None:
                return False
            groups = []
            for a, m in self.g.out_lab_node(n):
                groups.append(
                    frozenset(typed_symbol(a, u) for u in typing[m])
                )
            return inter1_groups(groups, intervals)
        # det-membership and structure-filtered: the rule uses each label
        # with one target type, so a flattening exists exactly when every
        # successor still carries the required type and (checked here only
        # by det-membership, once by the filtered init otherwise) the label
        # bag fits the projected rule.
        rule = self.s.delta[t]
        if isinstance(rule, SemanticLanguage):
            return rule.member is universal_language_member
        for a, m in self.g.out_lab_node(n):
            u = self.succ.get((t, a))
            if u is None or u not in typing[m]:
                return False
        if self.strategy == "det-membership":
            # The projected test depends only on the label bag, which the
            # typing cannot change; cache it across rounds and nodes.
            key = (t, tuple(sorted(self.g.out_lab(n).items())))
            if key not in self._memo:
                self._memo[key] = member(self.g.out_lab(n), self.projected[t]).verdict
            return self._memo[key]
        return True


def _expression_rules(s: Schema) -> dict[str, Rbe]:
    return {
        t: rule
        for t, rule in s.delta.items()
        if t != TOP and not isinstance(rule, SemanticLanguage)
    }


def _projected_rules(s: Schema) -> dict[str, Rbe]:
    projected = s._derived.get("refine:projected")
    if projected is None:
        projected = {
            t: project_sigma(rule) for t, rule in _expression_rules(s).items()
        }
        s._derived["refine:projected"] = projected
    return projected


def _as_m_typing(g: Graph, typing: Mapping[str, Iterable[str]]) -> dict[str, frozenset[str]]:
    missing = g.nodes - typing.keys()
    if missing:
        raise ValueError(f"typing assigns no set to node {min(missing)!r}")
    return {n: frozenset(typing[n]) for n in g.nodes}


def refine_step(
    g: Graph,
    s: Schema,
    typing: Mapping[str, Iterable[str]],
    strategy: str = "general",
) -> dict[str, frozenset[str]]:
    """One refinement round: delete every locally unsatisfiable type.

    A type survives at a node when some flattening of the node's
    neighborhood under the *current* typing belongs to its language; the
    universal type always survives.  The result is pointwise contained in
    the input.
    """
    return _RefineEngine(g, s, strategy).step(_as_m_typing(g, typing))


def structure_filtered_init(g: Graph, s: Schema) -> dict[str, frozenset[str]]:
    """Initial typing keeping only types whose label-projected rule admits
    the node's outbound label bag.

    Types dropped here could never survive a refinement round, so starting
    from this typing reaches the same fixpoint as starting from the full
    one.  Verdicts are cached per label bag; graphs with many
    identically-shaped nodes test each shape once.
    """
    projected = _projected_rules(s)
    cache: dict[tuple, frozenset[str]] = s._derived.setdefault("refine:init", {})
    out: dict[str, frozenset[str]] = {}
    for n in g.nodes:
        w = g.out_lab(n)
        key = tuple(sorted(w.items()))
        if key not in cache:
            cache[key] = frozenset(
                t
                for t in s.gamma
                if t not in projected or member(w, projected[t]).verdict
            )
        out[n] = cache[key]
    return out


def _run_refinement(
    g: Graph, s: Schema, init: str, strategy: str
) -> tuple[dict[str, frozenset[str]], int]:
    engine = _RefineEngine(g, s, strategy)
    if init == "full-gamma":
        current = {n: frozenset(s.gamma) for n in g.nodes}
    elif init == "structure-filtered":
        current = structure_filtered_init(g, s)
    else:
        raise ValueError(f"unknown initial typing {init!r}")
    # Every round before the last removes at least one (node, type) pair.
    limit = len(g.nodes) * max(len(s.gamma), 1) + 1
    rounds = 0
    while True:
        rounds += 1
        if rounds > limit:
            raise AssertionError("refinement failed to reach a fixpoint")
        following = engine.step(current)
        if following == current:
            return current, rounds
        current = following


def refine_fixpoint(
    g: Graph, s: Schema, init: str = "full-gamma", strategy: str = "general"
) -> dict[str, frozenset[str]]:
    """Refine until nothing changes; at most |nodes|·|types| + 1 rounds."""
    typing, _ = _run_refinement(g, s, init, strategy)
    return typing


def infer_types(g: Graph, s: Schema) -> dict[str, frozenset[str]]:
    """The refinement fixpoint from the full typing: per node, every type
    it can carry in some valid m-typing.  Empty sets mark nodes that can
    carry none; they are returned rather than raised."""
    return refine_fixpoint(g, s, "full-gamma", _auto_strategy(s))


def _auto_strategy(s: Schema) -> str:
    flags = s.class_flags
    if flags.deterministic and flags.sorbe:
        return "det-membership"
    return "general"


def _types_of(value) -> frozenset[str]:
    if isinstance(value, str):
        return frozenset((value,))
    return frozenset(value)


def _remaining(g: Graph, typing: Mapping[str, object]) -> frozenset:
    covered = {
        n
        for n, value in typing.items()
        if any(t != TOP for t in _types_of(value))
    }
    return frozenset(e for e in g.edges if e[0] not in covered)


def remaining_edges(g: Graph, report: ValidationReport) -> frozenset:
    """Edges whose source node received no type other than the universal
    one — the part of the graph the typing says nothing about."""
    return _remaining(g, report.typing)


def validate_multi(
    g: Graph,
    s: Schema,
    algo: str = "refine",
    pre: Mapping[str, Iterable[str]] | None = None,
    cap: int = BRUTE_CAP,
) -> ValidationReport:
    """Multi-type validation: is there a valid m-typing assigning at least
    one type to every node?

    The refine family reports the maximal m-typing.  ``flood`` requires a
    pre-typing (or a schema with the universal type) and is valid only
    when the flood succeeds and reaches every node.  ``brute`` defers to
    the enumeration search and is capped.
    """
    if algo in ("refine", "s-refine", "rbe0-refine"):
        if algo == "refine":
            init, strategy = "full-gamma", _auto_strategy(s)
        elif algo == "s-refine":
            init, strategy = "structure-filtered", "structure-filtered"
        else:
            init, strategy = "full-gamma", "rbe0-flow"
        typing, rounds = _run_refinement(g, s, init, strategy)
        failures = tuple(
            (n, "-", "no type survives refinement")
            for n in sorted(typing)
            if not typing[n]
        )
        return ValidationReport(
            valid=not failures,
            typing=typing,
            failures=failures,
            remaining_edges=_remaining(g, typing),
            iterations=rounds,
            algorithm=algo,
        )
    if algo == "flood":
        if pre is None:
            if TOP not in s.gamma:
                raise ValueError(
                    "flooding needs a pre-typing or a universal type in the schema"
                )
            pre = {}
        report = replace(flood_extension(g, s, pre, mode="multi"), algorithm="flood")
        unreached = sorted(n for n in g.nodes if not report.typing.get(n))
        if report.valid and unreached:
            failures = tuple(
                (n, "-", "not reached from the pre-typing") for n in unreached
            )
            report = replace(report, valid=False, failures=failures)
        return report
    if algo == "brute":
        found = brute_force_multi(g, s, cap=cap)
        if found is None:
            return ValidationReport(
                valid=False,
                typing={},
                failures=(("-", "-", "no valid m-typing exists"),),
                remaining_edges=frozenset(g.edges),
                algorithm="brute",
            )
        return ValidationReport(
            valid=True,
            typing=found,
            remaining_edges=_remaining(g, found),
            algorithm="brute",
        )
    raise ValueError(f"unknown algorithm {algo!r}")


def _check_pre_typing(
    g: Graph, s: Schema, pre: Mapping[str, Iterable[str]]
) -> dict[str, frozenset[str]]:
    out: dict[str, frozenset[str]] = {}
    for n in pre:
        if n not in g.nodes:
            raise ValueError(f"pre-typing names unknown node {n!r}")
        types = frozenset(pre[n])
        stray = types - set(s.gamma)
        if stray:
            raise ValueError(f"pre-typing names unknown type {min(stray)!r}")
        if types:
            out[n] = types
    return out


def flood_extension(
    g: Graph,
    s: Schema,
    pre: Mapping[str, Iterable[str]],
    mode: str = "multi",
) -> ValidationReport:
    """Extend a partial node-to-types requirement along edges.

    In multi mode (deterministic schemas) the minimal valid extension is
    unique: each processed (node, type) pair forces one type per outgoing
    edge, and the extension fails exactly when some forced membership
    fails.  In single mode (any single-occurrence schema) labels may be
    used with several target types, so the search backtracks over the
    per-edge choices; success yields one valid single-type assignment of
    the reached nodes.
    """
    pre_map = _check_pre_typing(g, s, pre)
    if mode == "multi":
        ok, succ = check_deterministic(s)
        if not ok:
            raise ValueError("multi-mode flooding needs a deterministic schema")
        return _flood_multi(g, s, pre_map, succ)
    if mode == "single":
        if not s.class_flags.sorbe:
            raise ValueError(
                "single-mode flooding needs a single-occurrence schema"
            )
        return _flood_single(g, s, pre_map)
    raise ValueError(f"unknown mode {mode!r}")


def _freeze(typing: Mapping[str, set[str]]) -> dict[str, frozenset[str]]:
    return {n: frozenset(ts) for n, ts in typing.items()}


def _flood_multi(
    g: Graph,
    s: Schema,
    pre: Mapping[str, frozenset[str]],
    succ: Mapping[tuple[str, str], str],
) -> ValidationReport:
    typing: dict[str, set[str]] = {}
    queue: deque[tuple[str, str]] = deque()
    seen: set[tuple[str, str]] = set()
    for n in sorted(pre):
        for t in sorted(pre[n]):
            queue.append((n, t))
            seen.add((n, t))
    examined = 0
    processed = 0
    while queue:
        n, t = queue.popleft()
        processed += 1
        if t == TOP:
            typing.setdefault(n, set()).add(t)
            continue
        neighborhood = sorted(g.out_lab_node(n))
        examined += len(neighborhood)
        w: Counter[str] = Counter()
        obligations: list[tuple[str, str]] = []
        failure = None
        for a, m in neighborhood:
            u = succ.get((t, a))
            if u is None:
                failure = (n, t, f"the rule uses no symbol with label {a}")
                break
            w[typed_symbol(a, u)] += 1
            obligations.append((m, u))
        if failure is None and not rule_member(s, w, t):
            failure = (n, t, "outbound neighborhood does not match the rule")
        if failure is not None:
            return ValidationReport(
                valid=False,
                typing=_freeze(typing),
                failures=(failure,),
                remaining_edges=_remaining(g, typing),
                iterations=processed,
                algorithm="flood-multi",
                edges_examined=examined,
            )
        typing.setdefault(n, set()).add(t)
        for m, u in obligations:
            if u != TOP and (m, u) not in seen:
                seen.add((m, u))
                queue.append((m, u))
    frozen = _freeze(typing)
    return ValidationReport(
        valid=True,
        typing=frozen,
        remaining_edges=_remaining(g, frozen),
        iterations=processed,
        algorithm="flood-multi",
        edges_examined=examined,
    )


def _flood_single(
    g: Graph, s: Schema, pre: Mapping[str, frozenset[str]]
) -> ValidationReport:
    # Per-rule successor choices; deterministic rules make these singletons
    # and the search straight-line.
    choices: dict[tuple[str, str], tuple[str, ...]] = {}
    for t, rule in s.delta.items():
        if t == TOP or isinstance(rule, SemanticLanguage):
            continue
        per_label: dict[str, set[str]] = {}
        for symbol in alphabet(rule):
            a, u = split_symbol(symbol)
            per_label.setdefault(a, set()).add(u)
        for a, targets in per_label.items():
            choices[(t, a)] = tuple(sorted(targets))

    agenda: list[tuple[str, str]] = [
        (n, t) for n in sorted(pre) for t in sorted(pre[n])
    ]
    examined = 0
    processed = 0
    first_failure: list[tuple[str, str, str]] = []
    failure_typing: dict[str, str] = {}

    def fail(n: str, t: str, reason: str, lam: dict[str, str]) -> None:
        if not first_failure:
            first_failure.append((n, t, reason))
            failure_typing.update(lam)

    def settle(i: int, lam: dict[str, str]) -> dict[str, str] | None:
        nonlocal examined, processed
        if i == len(agenda):
            return dict(lam)
        n, t = agenda[i]
        processed += 1
        if n in lam:
            if lam[n] == t:
                return settle(i + 1, lam)
            fail(n, t, f"node already typed {lam[n]}", lam)
            return None
        if t == TOP:
            lam[n] = t
            result = settle(i + 1, lam)
            if result is None:
                del lam[n]
            return result
        neighborhood = sorted(g.out_lab_node(n))
        examined += len(neighborhood)
        per_edge: list[tuple[str, ...]] = []
        for a, _ in neighborhood:
            options = choices.get((t, a))
            if options is None:
                fail(n, t, f"the rule uses no symbol with label {a}", lam)
                return None
            per_edge.append(options)
        lam[n] = t
        matched = False
        for picks in itertools.product(*per_edge):
            w = Counter(
                typed_symbol(a, u) for (a, _), u in zip(neighborhood, picks)
            )
            if not rule_member(s, w, t):
                continue
            matched = True
            base = len(agenda)
            agenda.extend(
                (m, u) for (_, m), u in zip(neighborhood, picks) if u != TOP
            )
            result = settle(i + 1, lam)
            if result is not None:
                return result
            del agenda[base:]
        del lam[n]
        if matched:
            fail(n, t, "no consistent typing of the successors", lam)
        else:
            fail(n, t, "outbound neighborhood does not match the rule", lam)
        return None

    lam = settle(0, {})
    if lam is None:
        return ValidationReport(
            valid=False,
            typing=dict(failure_typing),
            failures=tuple(first_failure),
            remaining_edges=_remaining(g, failure_typing),
            iterations=processed,
            algorithm="flood-single",
            edges_examined=examined,
        )
    return ValidationReport(
        valid=True,
        typing=lam,
        remaining_edges=_remaining(g, lam),
        iterations=processed,
        algorithm="flood-single",
        edges_examined=examined,
    )


def brute_force_single(
    g: Graph, s: Schema, cap: int = BRUTE_CAP
) -> dict[str, str] | None:
    """First valid single-type assignment in lexicographic order, if any.

    Raises when the assignment space exceeds ``cap``.
    """
    nodes = sorted(g.nodes)
    types = sorted(s.gamma)
    space = len(types) ** len(nodes)
    if space > cap:
        raise BruteCapExceeded(f"{space} assignments exceed the cap of {cap}")
    memo: dict[tuple[str, tuple], bool] = {}
    for combo in itertools.product(types, repeat=len(nodes)):
        typing = dict(zip(nodes, combo))
        for n in nodes:
            w = out_lab_type_s(g, typing, n)
            key = (typing[n], tuple(sorted(w.items())))
            if key not in memo:
                memo[key] = rule_member(s, w, typing[n])
            if not memo[key]:
                break
        else:
            return typing
    return None


def brute_force_multi(
    g: Graph, s: Schema, cap: int = BRUTE_CAP
) -> dict[str, frozenset[str]] | None:
    """First valid set-valued assignment over non-empty type sets, if any.

    Validity of each candidate is decided per (node, type) through the
    flattening intersection test.  Raises when the assignment space
    exceeds ``cap``.
    """
    nodes = sorted(g.nodes)
    subsets = [
        frozenset(combo)
        for size in range(1, len(s.gamma) + 1)
        for combo in itertools.combinations(sorted(s.gamma), size)
    ]
    space = len(subsets) ** len(nodes)
    if space > cap:
        raise BruteCapExceeded(f"{space} assignments exceed the cap of {cap}")
    memo: dict[tuple[str, tuple], bool] = {}
    for combo in itertools.product(subsets, repeat=len(nodes)):
        typing = dict(zip(nodes, combo))
        ok = True
        for n in nodes:
            neighborhood = out_lab_type_m(g, typing, n)
            key_base = _neighborhood_key(neighborhood)
            for t in typing[n]:
                key = (t, key_base)
                if key not in memo:
                    memo[key] = _some_flattening_member(s, neighborhood, t)
                if not memo[key]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return typing
    return None


def parse_pretyping(text: str) -> dict[str, set[str]]:
    """Read pre-typing lines of the form ``node<TAB>type``; repeated nodes
    accumulate types.  ``#`` starts a comment."""
    out: dict[str, set[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("\t")]
        if len(fields) != 2 or not all(fields):
            raise ParseError(f"line {lineno}: expected node<TAB>type")
        node, type_name = fields
        out.setdefault(node, set()).add(type_name)
    return out


def format_pretyping(pre: Mapping[str, Iterable[str]]) -> str:
    """Serialize a pre-typing; ``parse_pretyping`` reads the result back."""
    lines = [
        f"{node}\t{t}"
        for node in sorted(pre)
        for t in sorted(_types_of(pre[node]))
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def report_lines(report: ValidationReport) -> list[str]:
    """Machine-readable report: one TYPED line per (node, type) pair, one
    FAILED line per recorded failure, one REMAINING line per untyped edge.
    Fields are tab-separated because node names may contain spaces."""
    lines = []
    for n in sorted(report.typing):
        for t in sorted(_types_of(report.typing[n])):
            lines.append(f"TYPED\t{n}\t{t}")
    for n, t, reason in report.failures:
        lines.append(f"FAILED\t{n}\t{t}\t{reason}")
    for sbj, prd, obj in sorted(report.remaining_edges):
        lines.append(f"REMAINING\t{sbj}\t{prd}\t{obj}")
    return lines
