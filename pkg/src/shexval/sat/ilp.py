"""Integer feasibility solver for small systems of linear equations.

Unknowns range over the non-negative integers.  Systems are conjunctions of
equations plus optional case splits (pick one alternative block per split).
Inequalities are expressed through internal slack unknowns, one per
inequality, named with a ``_`` prefix.

The solver interleaves bounds propagation with value branching.  Propagation
uses exact arithmetic with an explicit "unbounded" marker, so any
infeasibility it derives holds unconditionally.  Branching on an unknown
whose domain is still unbounded requires clamping it; when the caller has
supplied a completeness bound (a value B such that a solution exists only if
one exists with every non-slack unknown at most B) and B fits under the cap,
the clamp loses nothing.  Otherwise the clamp is artificial and an exhausted
search yields "unknown" rather than "unsat".
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import count, product
from math import gcd

__all__ = [
    "Eq",
    "LinearSystem",
    "IlpResult",
    "SolverCapped",
    "ilp_feasible",
    "solver_cap",
    "DEFAULT_CAP",
]

# (coefficients, right-hand side): sum of coeff*var equals rhs.
Eq = tuple[dict[str, int], int]

DEFAULT_CAP = 1_000_000
_PROPAGATION_ROUNDS = 100


class SolverCapped(Exception):
    """An exact answer was required but the search hit its cap."""


def solver_cap() -> int:
    """Branching cap for unbounded unknowns; SHEX_ILP_CAP overrides the default."""
    raw = os.environ.get("SHEX_ILP_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_CAP
    return value if value > 0 else DEFAULT_CAP


class LinearSystem:
    """A conjunction of equations plus case splits over alternative blocks."""

    def __init__(self) -> None:
        self.equations: list[Eq] = []
        self.cases: list[list[list[Eq]]] = []
        self._counter = count()

    def fresh_var(self, prefix: str = "_s") -> str:
        return f"{prefix}{next(self._counter)}"

    def make_eq(self, coeffs: dict[str, int], rhs: int) -> Eq:
        return ({v: c for v, c in coeffs.items() if c}, rhs)

    def make_le(self, coeffs: dict[str, int], rhs: int) -> Eq:
        c = {v: c for v, c in coeffs.items() if c}
        c[self.fresh_var()] = 1
        return (c, rhs)

    def make_ge(self, coeffs: dict[str, int], rhs: int) -> Eq:
        c = {v: c for v, c in coeffs.items() if c}
        c[self.fresh_var()] = -1
        return (c, rhs)

    def eq(self, coeffs: dict[str, int], rhs: int) -> None:
        self.equations.append(self.make_eq(coeffs, rhs))

    def le(self, coeffs: dict[str, int], rhs: int) -> None:
        self.equations.append(self.make_le(coeffs, rhs))

    def ge(self, coeffs: dict[str, int], rhs: int) -> None:
        self.equations.append(self.make_ge(coeffs, rhs))

    def case(self, *alternatives: list[Eq]) -> None:
        """Add a split: exactly one alternative block of equations must hold."""
        self.cases.append([list(block) for block in alternatives])


@dataclass
class IlpResult:
    status: str  # "sat" | "unsat" | "unknown"
    model: dict[str, int] | None
    capped: bool


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class _Budget(Exception):
    pass


class _Search:
    def __init__(
        self,
        equations: list[Eq],
        clamp: int,
        slack_clamp: int,
        artificial: bool,
        budget: int,
    ):
        self.equations = equations
        self.clamp = clamp
        self.slack_clamp = slack_clamp
        self.artificial = artificial
        self.budget = budget
        self.capped = False
        order: dict[str, None] = {}
        for coeffs, _ in equations:
            for v in coeffs:
                order.setdefault(v)
        self.variables = list(order)

    def run(self) -> dict[str, int] | None:
        domains = {v: (0, None) for v in self.variables}
        return self._solve(domains)

    def _solve(self, domains: dict[str, tuple[int, int | None]]):
        self.budget -= 1
        if self.budget <= 0:
            raise _Budget
        domains = self._propagate(domains)
        if domains is None:
            return None
        open_vars = [v for v in self.variables if not self._fixed(domains[v])]
        if not open_vars:
            model = {v: domains[v][0] for v in self.variables}
            if all(
                sum(c * model[v] for v, c in coeffs.items()) == rhs
                for coeffs, rhs in self.equations
            ):
                return model
            return None
        var = self._pick(open_vars, domains)
        lo, hi = domains[var]
        if hi is None:
            if var.startswith("_"):
                # Slack unknowns sit outside the caller's completeness promise.
                self.capped = True
                hi = self.slack_clamp
            else:
                if self.artificial:
                    self.capped = True
                hi = self.clamp
        for value in range(lo, hi + 1):
            child = dict(domains)
            child[var] = (value, value)
            model = self._solve(child)
            if model is not None:
                return model
        return None

    @staticmethod
    def _fixed(dom: tuple[int, int | None]) -> bool:
        return dom[1] is not None and dom[0] == dom[1]

    def _pick(self, open_vars, domains) -> str:
        # Non-slack unknowns first: slack domains resolve by propagation once
        # the unknowns they track are fixed.
        def width(v: str):
            lo, hi = domains[v]
            slack = v.startswith("_")
            return (slack, float("inf") if hi is None else hi - lo)

        return min(open_vars, key=width)

    def _propagate(self, domains):
        for _ in range(_PROPAGATION_ROUNDS):
            changed = False
            for coeffs, rhs in self.equations:
                if not coeffs:
                    if rhs != 0:
                        return None
                    continue
                g = 0
                for c in coeffs.values():
                    g = gcd(g, c)
                if rhs % g:
                    return None
                # Per-term bounds; None marks an unbounded end.
                terms = []
                lo_sum = hi_sum = 0
                lo_open = hi_open = 0
                for v, c in coeffs.items():
                    dlo, dhi = domains[v]
                    if c > 0:
                        tlo = c * dlo
                        thi = None if dhi is None else c * dhi
                    else:
                        tlo = None if dhi is None else c * dhi
                        thi = c * dlo
                    terms.append((v, c, tlo, thi))
                    if tlo is None:
                        lo_open += 1
                    else:
                        lo_sum += tlo
                    if thi is None:
                        hi_open += 1
                    else:
                        hi_sum += thi
                for v, c, tlo, thi in terms:
                    rest_lo_open = lo_open - (tlo is None)
                    rest_hi_open = hi_open - (thi is None)
                    rest_lo = None if rest_lo_open else lo_sum - (tlo or 0)
                    rest_hi = None if rest_hi_open else hi_sum - (thi or 0)
                    # c*v must land in [rhs - rest_hi, rhs - rest_lo]
                    rlo = None if rest_hi is None else rhs - rest_hi
                    rhi = None if rest_lo is None else rhs - rest_lo
                    dlo, dhi = domains[v]
                    if c > 0:
                        if rlo is not None:
                            dlo = max(dlo, _ceil_div(rlo, c))
                        if rhi is not None:
                            bound = rhi // c
                            dhi = bound if dhi is None else min(dhi, bound)
                    else:
                        if rhi is not None:
                            dlo = max(dlo, _ceil_div(-rhi, -c))
                        if rlo is not None:
                            bound = (-rlo) // (-c)
                            dhi = bound if dhi is None else min(dhi, bound)
                    if dhi is not None and dlo > dhi:
                        return None
                    if (dlo, dhi) != domains[v]:
                        domains[v] = (dlo, dhi)
                        changed = True
            if not changed:
                break
        return domains


def ilp_feasible(
    system: LinearSystem,
    *,
    bound: int | None = None,
    cap: int | None = None,
    budget: int = 200_000,
) -> IlpResult:
    """Decide feasibility of the system over non-negative integer unknowns.

    ``bound`` is the caller's completeness bound: a promise that feasibility
    implies a solution with every non-slack unknown at most ``bound``.  With
    it (and bound <= cap) every verdict is exact; without it an exhausted
    capped search reports "unknown".
    """
    effective_cap = solver_cap() if cap is None else cap
    complete = bound is not None and bound <= effective_cap
    clamp = bound if complete else effective_cap
    any_capped = False
    selections = product(*system.cases) if system.cases else [()]
    for selection in selections:
        equations = list(system.equations)
        for block in selection:
            equations.extend(block)
        search = _Search(equations, clamp, effective_cap, not complete, budget)
        try:
            model = search.run()
        except _Budget:
            return IlpResult("unknown", None, True)
        if model is not None:
            public = {v: x for v, x in model.items() if not v.startswith("_")}
            return IlpResult("sat", public, search.capped)
        any_capped = any_capped or search.capped
    return IlpResult("unknown" if any_capped else "unsat", None, any_capped)
