"""Exact optimal solvers, a committing-order brute force, and a QBF oracle.

The main solver runs expectimin over belief states, organized by knowledge
stratum: within a fixed set of revealed statuses the walk is a deterministic
shortest-path problem, and every step that would reveal something jumps to a
deeper stratum whose value is computed recursively (knowledge only grows, so
the recursion is well founded). Within a stratum, values come from a reverse
Dijkstra seeded at the target and at every revealing step, which is sound
because all costs are nonnegative.

Branch probabilities always condition on everything revealed so far, so the
same engine is exact for independent, dependent, and sensing instances; the
sensing variant just adds stay-in-place revealing steps priced by the
sensing map. No pruning beyond the memoization: this module is an oracle,
and exactness wins over speed.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .model import (
    Belief,
    Cost,
    CtpInstance,
    EnumerationCapError,
    InvalidInstanceError,
    Variant,
)
from .policy import (
    Action,
    DecisionTreePolicy,
    EvalResult,
    Policy,
    belief_key,
    export_decision_tree,
)


@dataclass(frozen=True)
class SolveStats:
    beliefs_expanded: int


@dataclass(frozen=True)
class OptResult:
    """An exact optimum with the decision tree that achieves it.

    `optimal_first_action` is None when edges are already visible at the
    start, so the first decision depends on what they show and no single
    action describes it.
    """

    optimal_cost: Cost
    optimal_first_action: Action | None
    policy: DecisionTreePolicy
    stats: SolveStats


@dataclass
class _Region:
    """Values and best actions for one knowledge stratum's reachable patch."""

    values: dict[str, Cost]
    choices: dict[str, Action]


_KindKey = tuple[tuple[str, bool], ...]


class _Solver:
    def __init__(self, instance: CtpInstance, belief_cap: int):
        self.instance = instance
        self.joint = instance.joint
        self.belief_cap = belief_cap
        self.expanded = 0
        self._regions: dict[tuple[_KindKey, frozenset[str]], _Region] = {}
        self._patches: dict[tuple[_KindKey, str], frozenset[str]] = {}
        senses: dict[str, list[tuple[str, Cost]]] = {}
        if instance.variant is Variant.SENSING and instance.sensing:
            for entry in instance.sensing.entries:
                senses.setdefault(entry.vertex, []).append(
                    (entry.edge, entry.cost))
        self._senses = {v: tuple(sorted(pairs)) for v, pairs in senses.items()}

    # -- structure ---------------------------------------------------------

    def fresh_at(self, vertex: str, known: Mapping[str, bool]) -> list[str]:
        """Unrevealed statuses that arriving at `vertex` would expose."""
        if vertex == self.instance.t:
            return []
        return [e.id for e in self.instance.visible_from(vertex)
                if e.id not in known]

    def _passable(self, edge, known: Mapping[str, bool]) -> bool:
        if edge.cost.is_infinite:
            return False
        return not edge.uncertain or known.get(edge.id) is True

    def patch(self, key: _KindKey, start: str) -> frozenset[str]:
        """Positions reachable from `start` without revealing anything."""
        cached = self._patches.get((key, start))
        if cached is not None:
            return cached
        known = dict(key)
        seen = {start}
        queue = [start]
        while queue:
            u = queue.pop()
            if u == self.instance.t:
                continue
            for edge, far in self.instance.moves_from(u):
                if far in seen or not self._passable(edge, known):
                    continue
                if self.fresh_at(far, known):
                    continue
                seen.add(far)
                queue.append(far)
        patch = frozenset(seen)
        for v in patch:
            self._patches[(key, v)] = patch
        return patch

    # -- values ------------------------------------------------------------

    def value_at(self, key: _KindKey, position: str) -> Cost:
        region = self.region(key, position)
        return region.values.get(position, Cost.infinite())

    def branch_value(self, known: Mapping[str, bool], fresh: Sequence[str],
                     position: str) -> Cost:
        """Expected value after `fresh` get revealed on arrival."""
        total = Cost.zero()
        for assignment, prob in self.joint.branch(known, fresh):
            grown = dict(known)
            grown.update(assignment)
            deeper = tuple(sorted(grown.items()))
            total = total + self.value_at(deeper, position).scale(prob)
        return total

    def region(self, key: _KindKey, start: str) -> _Region:
        patch = self.patch(key, start)
        cached = self._regions.get((key, patch))
        if cached is not None:
            return cached
        known = dict(key)
        t = self.instance.t
        seq = itertools.count()
        # heap entries: cost, action-rank, edge id, tiebreak, vertex, action
        heap: list[tuple[Cost, int, str, int, str, Action]] = []
        radj: dict[str, list[tuple[str, Cost, str]]] = {}
        if t in patch:
            heapq.heappush(heap, (Cost.zero(), 0, "", next(seq), t,
                                  Action.halt()))
        for u in sorted(patch):
            if u == t:
                continue
            for edge, far in self.instance.moves_from(u):
                if not self._passable(edge, known):
                    continue
                fresh = self.fresh_at(far, known)
                if fresh:
                    value = edge.cost + self.branch_value(known, fresh, far)
                    if not value.is_infinite:
                        heapq.heappush(heap, (value, 0, edge.id, next(seq),
                                              u, Action.move(edge.id)))
                else:
                    radj.setdefault(far, []).append((u, edge.cost, edge.id))
            for edge_id, fee in self._senses.get(u, ()):
                if edge_id in known:
                    continue
                value = fee + self.branch_value(known, [edge_id], u)
                if not value.is_infinite:
                    heapq.heappush(heap, (value, 1, edge_id, next(seq),
                                          u, Action.sense(edge_id)))
        values: dict[str, Cost] = {}
        choices: dict[str, Action] = {}
        while heap:
            cost, rank, edge_id, _, vertex, action = heapq.heappop(heap)
            if vertex in values:
                continue
            values[vertex] = cost
            choices[vertex] = action
            for u, step, via in radj.get(vertex, ()):
                if u in values:
                    continue
                heapq.heappush(heap, (step + cost, 0, via, next(seq),
                                      u, Action.move(via)))
        region = _Region(values, choices)
        self._regions[(key, patch)] = region
        self.expanded += len(patch)
        if self.expanded > self.belief_cap:
            raise EnumerationCapError(
                f"{self.expanded} beliefs exceed the cap of {self.belief_cap}")
        return region


class _SolvedPolicy(Policy):
    """Replays a finished solve as a plain policy."""

    def __init__(self, solver: _Solver):
        self._solver = solver

    def decide(self, instance: CtpInstance, belief: Belief) -> Action | None:
        if belief.position == instance.t:
            return Action.halt()
        region = self._solver.region(belief.known, belief.position)
        return region.choices.get(belief.position)


def _first_action(tree: DecisionTreePolicy) -> Action | None:
    if tree.root is None:
        return None
    node = tree.nodes.get(tree.root)
    if node is None:
        return None
    if node.action is not None:
        return node.action
    # chance root: a single first action exists only if all outcomes agree
    seen = {tree.nodes[child].action for _, child in node.children}
    if len(seen) == 1:
        return seen.pop()
    return None


def _solve(instance: CtpInstance, belief_cap: int) -> OptResult:
    solver = _Solver(instance, belief_cap)
    fresh = solver.fresh_at(instance.s, {})
    if fresh:
        expected = solver.branch_value({}, fresh, instance.s)
    else:
        expected = solver.value_at((), instance.s)
    result, tree = export_decision_tree(instance, _SolvedPolicy(solver))
    assert result.expected_cost == expected
    return OptResult(expected, _first_action(tree), tree,
                     SolveStats(solver.expanded))


def _require_variant(instance: CtpInstance, variant: Variant) -> None:
    if instance.variant is not variant:
        raise InvalidInstanceError(
            f"expected a {variant.value} instance, got {instance.variant.value}")


def solve_independent(instance: CtpInstance,
                      belief_cap: int = 200_000) -> OptResult:
    """Exact optimum for independently blocked edges."""
    _require_variant(instance, Variant.INDEPENDENT)
    return _solve(instance, belief_cap)


def solve_dependent(instance: CtpInstance,
                    belief_cap: int = 200_000) -> OptResult:
    """Exact optimum when edge statuses are correlated through a net."""
    _require_variant(instance, Variant.DEPENDENT)
    return _solve(instance, belief_cap)


def solve_sensing(instance: CtpInstance,
                  belief_cap: int = 200_000) -> OptResult:
    """Exact optimum when statuses can also be bought via the sensing map."""
    _require_variant(instance, Variant.SENSING)
    return _solve(instance, belief_cap)


def solve(instance: CtpInstance, belief_cap: int = 200_000) -> OptResult:
    """Variant-dispatching front door used by the command line."""
    return _solve(instance, belief_cap)


# ---------------------------------------------------------------------------
# committing brute force on disjoint-path graphs

@dataclass(frozen=True)
class PathInfo:
    vertices: tuple[str, ...]
    edges: tuple[str, ...]

    @cached_property
    def interior(self) -> frozenset[str]:
        return frozenset(self.vertices[1:-1])


@dataclass(frozen=True)
class CommittingPolicy(Policy):
    """Try paths in a fixed order, backtracking only off dead paths."""

    paths: tuple[PathInfo, ...]
    order: tuple[int, ...]

    def _current(self, belief: Belief) -> PathInfo | None:
        for idx in self.order:
            path = self.paths[idx]
            if not any(belief.status(e) is False for e in path.edges):
                return path
        return None

    def decide(self, instance: CtpInstance, belief: Belief) -> Action | None:
        pos = belief.position
        if pos == instance.t:
            return Action.halt()
        current = self._current(belief)
        if pos == instance.s:
            if current is None:
                return None
            return Action.move(current.edges[0])
        for path in self.paths:
            if pos in path.interior:
                i = path.vertices.index(pos)
                if path == current:
                    return Action.move(path.edges[i])
                return Action.move(path.edges[i - 1])
        return None


def decompose_into_paths(instance: CtpInstance) -> tuple[PathInfo, ...]:
    """Split the graph into internally disjoint s-t paths, or fail loudly."""
    if any(e.directed for e in instance.edges):
        raise InvalidInstanceError(
            "path decomposition needs an undirected graph")
    by_vertex: dict[str, list] = {v: [] for v in instance.vertices}
    for e in instance.edges:
        by_vertex[e.tail].append(e)
        by_vertex[e.head].append(e)
    for v in instance.vertices:
        if v in (instance.s, instance.t):
            continue
        if len(by_vertex[v]) not in (0, 2):
            raise InvalidInstanceError(
                f"vertex {v} has degree {len(by_vertex[v])}; "
                "not a union of disjoint s-t paths")
    paths = []
    used: set[str] = set()
    for first in sorted(by_vertex[instance.s], key=lambda e: e.id):
        vertices = [instance.s]
        edges = []
        cur, via = first.other_end(instance.s), first
        while True:
            vertices.append(cur)
            edges.append(via.id)
            used.add(via.id)
            if cur == instance.t:
                break
            if cur == instance.s:
                raise InvalidInstanceError("a path loops back to the source")
            step = [e for e in by_vertex[cur] if e.id != via.id]
            if len(step) != 1:
                raise InvalidInstanceError(
                    f"vertex {cur} does not continue a single path")
            via = step[0]
            cur = via.other_end(cur)
        paths.append(PathInfo(tuple(vertices), tuple(edges)))
    if used != {e.id for e in instance.edges}:
        raise InvalidInstanceError(
            "some edges lie on no s-t path; not a disjoint-path graph")
    interiors = [p.interior for p in paths]
    for i, a in enumerate(interiors):
        for b in interiors[i + 1:]:
            if a & b:
                raise InvalidInstanceError("paths share an interior vertex")
    return tuple(paths)


def solve_disjoint_bruteforce(instance: CtpInstance,
                              max_paths: int = 6) -> OptResult:
    """Best committing policy, found by trying every path ordering."""
    from .policy import evaluate_exact

    paths = decompose_into_paths(instance)
    if len(paths) > max_paths:
        raise EnumerationCapError(
            f"{len(paths)} paths exceed the ordering cap of {max_paths}")
    best: tuple[Cost, CommittingPolicy, EvalResult] | None = None
    for order in itertools.permutations(range(len(paths))):
        policy = CommittingPolicy(paths, order)
        result = evaluate_exact(instance, policy, mode="tree")
        if best is None or result.expected_cost < best[0]:
            best = (result.expected_cost, policy, result)
    assert best is not None
    _, policy, result = best
    checked, tree = export_decision_tree(instance, policy)
    assert checked.expected_cost == result.expected_cost
    return OptResult(result.expected_cost, _first_action(tree), tree,
                     SolveStats(len(tree.nodes)))


# ---------------------------------------------------------------------------
# QBF oracle

@dataclass(frozen=True)
class QbfFormula:
    """Alternating-prefix quantified 3-CNF, universals first.

    Variables are 1..n; a literal is +i or -i. The prefix strictly
    alternates starting with a universal, so it is fully determined by n,
    but it is stored for readability and checked.
    """

    n: int
    quantifiers: tuple[str, ...]
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one variable")
        want = tuple("A" if i % 2 == 0 else "E" for i in range(self.n))
        if self.quantifiers != want:
            raise ValueError(
                "prefix must strictly alternate starting universal, "
                f"expected {want}, got {self.quantifiers}")
        for clause in self.clauses:
            if not 1 <= len(clause) <= 3:
                raise ValueError(f"clause {clause} must have 1 to 3 literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.n:
                    raise ValueError(f"literal {lit} out of range")

    @staticmethod
    def of(n: int, clauses: Sequence[Sequence[int]]) -> QbfFormula:
        quantifiers = tuple("A" if i % 2 == 0 else "E" for i in range(n))
        return QbfFormula(n, quantifiers,
                          tuple(tuple(c) for c in clauses))

    @property
    def m(self) -> int:
        return len(self.clauses)


def _cnf_value(formula: QbfFormula, assignment: list[bool]) -> bool:
    return all(
        any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause)
        for clause in formula.clauses)


def qbf_eval(formula: QbfFormula, cap: int = 24) -> bool:
    """Game-tree truth value: AND at universals, OR at existentials."""
    if formula.n > cap:
        raise EnumerationCapError(
            f"{formula.n} variables exceed the evaluation cap of {cap}")
    assignment: list[bool] = [False] * formula.n

    def play(i: int) -> bool:
        if i == formula.n:
            return _cnf_value(formula, assignment)
        results = []
        for value in (False, True):
            assignment[i] = value
            results.append(play(i + 1))
        if formula.quantifiers[i] == "A":
            return results[0] and results[1]
        return results[0] or results[1]

    return play(0)


def qbf_strategy(formula: QbfFormula,
                 cap: int = 24) -> dict[tuple[bool, ...], bool] | None:
    """Winning existential strategy, or None if there is none.

    Maps each reachable prefix of earlier variable values (as a tuple,
    one entry per preceding variable) to the winning choice for the
    existential variable that comes next. Universal prefixes enumerate
    both branches; when both choices win, False is recorded.
    """
    if formula.n > cap:
        raise EnumerationCapError(
            f"{formula.n} variables exceed the evaluation cap of {cap}")
    assignment: list[bool] = [False] * formula.n
    plan: dict[tuple[bool, ...], bool] = {}
    memo: dict[tuple[bool, ...], bool] = {}

    def wins(i: int) -> bool:
        if i == formula.n:
            return _cnf_value(formula, assignment)
        key = tuple(assignment[:i])
        cached = memo.get(key)
        if cached is not None:
            return cached
        results = []
        for value in (False, True):
            assignment[i] = value
            results.append(wins(i + 1))
        out = (results[0] and results[1]) if formula.quantifiers[i] == "A" \
            else (results[0] or results[1])
        memo[key] = out
        return out

    def record(i: int) -> None:
        """Walk the winning subtree; preferring False keeps it canonical."""
        if i == formula.n:
            return
        if formula.quantifiers[i] == "A":
            for value in (False, True):
                assignment[i] = value
                record(i + 1)
            return
        for value in (False, True):
            assignment[i] = value
            if wins(i + 1):
                plan[tuple(assignment[:i])] = value
                record(i + 1)
                return

    if not wins(0):
        return None
    record(0)
    return plan


def parse_qdimacs(text: str) -> QbfFormula:
    """Read the QDIMACS subset: p-header, one variable per quantifier line.

    Quantifier lines must strictly alternate a/e starting with a, covering
    variables 1..n in order; clauses hold at most three literals each.
    Errors carry the offending line number.
    """
    n = None
    m = None
    quantifiers: list[str] = []
    clauses: list[tuple[int, ...]] = []

    def fail(line_no: int, message: str) -> ValueError:
        return ValueError(f"line {line_no}: {message}")

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if n is not None:
                raise fail(line_no, "duplicate header")
            parts = line.split()
            if len(parts) != 4 or parts[:2] != ["p", "cnf"]:
                raise fail(line_no, f"malformed header {line!r}")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise fail(line_no, f"malformed header {line!r}") from None
            continue
        if n is None:
            raise fail(line_no, "content before the p cnf header")
        if line[0] in "ae":
            if clauses:
                raise fail(line_no, "quantifier line after clauses")
            parts = line.split()
            if len(parts) != 3 or parts[2] != "0":
                raise fail(line_no,
                           "quantifier lines declare one variable then 0")
            expected = "a" if len(quantifiers) % 2 == 0 else "e"
            if parts[0] != expected:
                raise fail(line_no,
                           f"expected a {expected!r} line here; the prefix "
                           "alternates starting universal")
            try:
                var = int(parts[1])
            except ValueError:
                raise fail(line_no, f"bad variable {parts[1]!r}") from None
            if var != len(quantifiers) + 1:
                raise fail(line_no,
                           f"variables must appear in order; expected "
                           f"{len(quantifiers) + 1}, got {var}")
            quantifiers.append(parts[0].upper())
            continue
        try:
            lits = [int(p) for p in line.split()]
        except ValueError:
            raise fail(line_no, f"unreadable clause {line!r}") from None
        if not lits or lits[-1] != 0:
            raise fail(line_no, "clause lines end with 0")
        lits = lits[:-1]
        if not 1 <= len(lits) <= 3:
            raise fail(line_no, "clauses carry 1 to 3 literals")
        for lit in lits:
            if lit == 0 or abs(lit) > n:
                raise fail(line_no, f"literal {lit} out of range")
        clauses.append(tuple(lits))
    if n is None:
        raise ValueError("line 0: missing p cnf header")
    if len(quantifiers) != n:
        raise ValueError(
            f"line 0: {len(quantifiers)} quantifier lines for {n} variables")
    if m is not None and m != len(clauses):
        raise ValueError(
            f"line 0: header promised {m} clauses, found {len(clauses)}")
    return QbfFormula(n, tuple(quantifiers), tuple(clauses))


__all__ = [
    "CommittingPolicy",
    "OptResult",
    "PathInfo",
    "QbfFormula",
    "SolveStats",
    "decompose_into_paths",
    "parse_qdimacs",
    "qbf_eval",
    "qbf_strategy",
    "solve",
    "solve_dependent",
    "solve_disjoint_bruteforce",
    "solve_independent",
    "solve_sensing",
]
