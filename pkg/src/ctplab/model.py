"""Exact data model for Canadian Traveler instances.

Instances are finite graphs whose edges are either surely traversable or
carry a blocking probability. A weather fixes every uncertain edge at once.
A walker standing at a vertex sees the true status of every uncertain edge
touching that vertex; direction restricts travel, never sight. That split
lets a directed construction expose status signals through edges that point
into a reachable vertex from an unreachable one.

Dependent instances replace the independent coin flips with a small Bayes
net over binary variables. A variable named after an edge drives that edge,
value 1 meaning blocked; variables with other names are auxiliary coins.

All arithmetic is `fractions.Fraction`. Costs that may diverge are `Cost`,
a nonnegative rational with a single absorbing infinity.
"""

from __future__ import annotations

import json
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property, total_ordering
from pathlib import Path


class InvalidInstanceError(ValueError):
    """A structural rule of the instance format was violated."""


class EnumerationCapError(RuntimeError):
    """An exact enumeration would exceed its configured cap."""


# ---------------------------------------------------------------------------
# rationals

def as_fraction(value: Fraction | int | str) -> Fraction:
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value)


_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_rational(text: str) -> Fraction:
    """Parse "num/den" (or a bare integer) into an exact fraction."""
    if not isinstance(text, str):
        raise InvalidInstanceError(
            f"rational must be a string, got {type(text).__name__}")
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise InvalidInstanceError(f"bad rational {text!r}")
    num, den = match.groups()
    try:
        return Fraction(int(num), int(den)) if den else Fraction(int(num))
    except ZeroDivisionError as exc:
        raise InvalidInstanceError(f"bad rational {text!r}") from exc


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_probability(text: str) -> Fraction:
    p = parse_rational(text)
    if not 0 <= p <= 1:
        raise InvalidInstanceError(f"probability {text!r} outside [0, 1]")
    return p


# ---------------------------------------------------------------------------
# cost

@total_ordering
@dataclass(frozen=True)
class Cost:
    """Nonnegative travel cost, possibly infinite.

    Infinity absorbs addition and dominates every finite value, so the
    expected cost of a policy that can strand the walker propagates on its
    own instead of through sentinels.
    """

    _value: Fraction | None

    @staticmethod
    def of(value: Cost | Fraction | int | str) -> Cost:
        if isinstance(value, Cost):
            return value
        if isinstance(value, str):
            if value == "inf":
                return _INFINITE
            frac = parse_rational(value)
        else:
            frac = Fraction(value)
        if frac < 0:
            raise InvalidInstanceError(f"cost must be nonnegative, got {frac}")
        return Cost(frac)

    @staticmethod
    def zero() -> Cost:
        return _ZERO

    @staticmethod
    def infinite() -> Cost:
        return _INFINITE

    @property
    def is_infinite(self) -> bool:
        return self._value is None

    @property
    def fraction(self) -> Fraction:
        if self._value is None:
            raise ValueError("infinite cost has no finite value")
        return self._value

    def __add__(self, other: Cost) -> Cost:
        if not isinstance(other, Cost):
            return NotImplemented
        if self._value is None or other._value is None:
            return _INFINITE
        return Cost(self._value + other._value)

    def scale(self, weight: Fraction) -> Cost:
        """Multiply by a positive probability weight."""
        if weight <= 0:
            raise ValueError(f"scale weight must be positive, got {weight}")
        if self._value is None:
            return _INFINITE
        return Cost(self._value * weight)

    def __lt__(self, other: Cost) -> bool:
        if not isinstance(other, Cost):
            return NotImplemented
        if self._value is None:
            return False
        if other._value is None:
            return True
        return self._value < other._value

    def __str__(self) -> str:
        return "inf" if self._value is None else format_rational(self._value)

    def __repr__(self) -> str:
        return f"Cost({self})"


_ZERO = Cost(Fraction(0))
_INFINITE = Cost(None)


def format_cost(cost: Cost) -> str:
    return str(cost)


def parse_cost(text: str) -> Cost:
    if text == "inf":
        return _INFINITE
    return Cost(parse_rational(text))


# ---------------------------------------------------------------------------
# deterministic randomness

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STREAM_SALT = 0xD1B54A32D192ED03


def _mix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class SplitMix64:
    """Counter-based 64-bit generator with exact rational Bernoulli draws."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def uniform_below(self, n: int) -> int:
        """Uniform integer in [0, n), exact via rejection."""
        if n <= 0:
            raise ValueError("need a positive bound")
        if n == 1:
            return 0
        span = 1 << 64
        words = 1
        while span < n:
            span <<= 64
            words += 1
        limit = span - span % n
        while True:
            value = 0
            for _ in range(words):
                value = (value << 64) | self.next64()
            if value < limit:
                return value % n

    def bernoulli(self, p: Fraction) -> bool:
        """True with probability exactly p."""
        if p == 0:
            return False
        if p == 1:
            return True
        return self.uniform_below(p.denominator) < p.numerator


def trial_stream(seed: int, trial: int) -> SplitMix64:
    """Stable independent stream for one Monte Carlo trial."""
    return SplitMix64(_mix64(_mix64(seed) + _STREAM_SALT * trial))


# ---------------------------------------------------------------------------
# structure

class Variant(Enum):
    INDEPENDENT = "independent"
    DEPENDENT = "dependent"
    SENSING = "sensing"


@dataclass(frozen=True)
class EdgeSpec:
    """One edge; `block_p` is the marginal blocking probability.

    Zero `block_p` means surely traversable. In a dependent instance the
    stored value must agree with the marginal the net induces.
    """

    id: str
    tail: str
    head: str
    cost: Cost
    directed: bool = False
    block_p: Fraction = Fraction(0)

    @property
    def uncertain(self) -> bool:
        return self.block_p != 0

    def other_end(self, vertex: str) -> str:
        if vertex == self.tail:
            return self.head
        if vertex == self.head:
            return self.tail
        raise ValueError(f"{vertex} is not an endpoint of edge {self.id}")


@dataclass(frozen=True)
class NetVariable:
    """Binary variable of a dependency net.

    `cpt[r]` is P(value = 1) for parent row r, where bit j of r holds the
    value of `parents[j]`.
    """

    id: str
    parents: tuple[str, ...]
    cpt: tuple[Fraction, ...]


@dataclass(frozen=True)
class DependencyNet:
    """Bayes net over edge and auxiliary variables, listed parents first."""

    variables: tuple[NetVariable, ...]
    max_in_degree: int = 2

    @cached_property
    def variable_map(self) -> dict[str, NetVariable]:
        return {v.id: v for v in self.variables}

    @cached_property
    def moral_components(self) -> tuple[tuple[NetVariable, ...], ...]:
        """Connected components of the moralized graph, in listing order."""
        neighbors: dict[str, set[str]] = {v.id: set() for v in self.variables}
        for v in self.variables:
            for p in v.parents:
                neighbors[v.id].add(p)
                neighbors[p].add(v.id)
            for a in v.parents:
                for b in v.parents:
                    if a != b:
                        neighbors[a].add(b)
        seen: set[str] = set()
        groups: list[tuple[NetVariable, ...]] = []
        for v in self.variables:
            if v.id in seen:
                continue
            stack, members = [v.id], set()
            while stack:
                cur = stack.pop()
                if cur in members:
                    continue
                members.add(cur)
                stack.extend(neighbors[cur] - members)
            seen |= members
            groups.append(tuple(x for x in self.variables if x.id in members))
        return tuple(groups)


@dataclass(frozen=True)
class SensingEntry:
    vertex: str
    edge: str
    cost: Cost


@dataclass(frozen=True)
class SensingSpec:
    """Partial map from (vertex, edge) to the price of remote inspection."""

    entries: tuple[SensingEntry, ...]

    @cached_property
    def _table(self) -> dict[tuple[str, str], Cost]:
        return {(e.vertex, e.edge): e.cost for e in self.entries}

    def cost(self, vertex: str, edge: str) -> Cost | None:
        """Price of sensing `edge` from `vertex`, None when unavailable."""
        return self._table.get((vertex, edge))


@dataclass(frozen=True)
class Weather:
    """Full realization of the uncertain edges, stored as the blocked set."""

    blocked: frozenset[str]

    def is_open(self, edge_id: str) -> bool:
        return edge_id not in self.blocked


@dataclass(frozen=True)
class Belief:
    """What the walker knows: its position and every revealed status."""

    position: str
    known: tuple[tuple[str, bool], ...]

    @staticmethod
    def make(position: str, known: Mapping[str, bool]) -> Belief:
        return Belief(position, tuple(sorted(known.items())))

    @cached_property
    def known_map(self) -> dict[str, bool]:
        return dict(self.known)

    def status(self, edge_id: str) -> bool | None:
        """True open, False blocked, None still unknown."""
        return self.known_map.get(edge_id)


# ---------------------------------------------------------------------------
# joint distribution over uncertain edges

@dataclass(frozen=True)
class ComponentTable:
    """Joint support of one dependency component, projected onto its edges.

    Rows pair a tuple of open flags (aligned with `edge_ids`) with the prior
    probability of that projection; auxiliary variables are summed out.
    """

    edge_ids: tuple[str, ...]
    rows: tuple[tuple[tuple[bool, ...], Fraction], ...]

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.edge_ids)}


@dataclass(frozen=True)
class JointModel:
    """Factored distribution over edge statuses, one table per component."""

    components: tuple[ComponentTable, ...]

    @cached_property
    def component_of(self) -> dict[str, int]:
        table: dict[str, int] = {}
        for i, comp in enumerate(self.components):
            for e in comp.edge_ids:
                table[e] = i
        return table

    def surviving_rows(self, component: int,
                       known: Mapping[str, bool]) -> tuple[int, ...]:
        """Indices of component rows consistent with the revealed statuses."""
        comp = self.components[component]
        checks = [(i, known[e]) for i, e in enumerate(comp.edge_ids)
                  if e in known]
        if not checks:
            return tuple(range(len(comp.rows)))
        out = []
        for r, (statuses, _) in enumerate(comp.rows):
            if all(statuses[i] == want for i, want in checks):
                out.append(r)
        return tuple(out)

    def branch(self, known: Mapping[str, bool],
               targets: Sequence[str]) -> list[tuple[dict[str, bool], Fraction]]:
        """Joint outcomes over `targets` given the revealed statuses.

        Probabilities are exact, positive, and sum to one.
        """
        wanted = list(dict.fromkeys(targets))
        by_comp: dict[int, list[str]] = {}
        for e in wanted:
            by_comp.setdefault(self.component_of[e], []).append(e)
        partial: list[tuple[dict[str, bool], Fraction]] = [({}, Fraction(1))]
        for ci in sorted(by_comp):
            comp = self.components[ci]
            rows = self.surviving_rows(ci, known)
            total = sum((comp.rows[r][1] for r in rows), Fraction(0))
            if total == 0:
                raise ValueError(
                    f"revealed statuses are inconsistent in component {ci}")
            picks = [comp.edge_index[e] for e in by_comp[ci]]
            proj: dict[tuple[bool, ...], Fraction] = {}
            for r in rows:
                statuses, prob = comp.rows[r]
                key = tuple(statuses[i] for i in picks)
                proj[key] = proj.get(key, Fraction(0)) + prob
            outcomes = [(dict(zip(by_comp[ci], key)), p / total)
                        for key, p in sorted(proj.items())]
            partial = [({**got, **add}, pa * pb)
                       for got, pa in partial for add, pb in outcomes]
        assert sum(p for _, p in partial) == 1
        return partial

    def deduced(self, known: Mapping[str, bool]) -> dict[str, bool]:
        """Unrevealed edges whose status the evidence already forces."""
        out: dict[str, bool] = {}
        for ci, comp in enumerate(self.components):
            if len(comp.edge_ids) == 1 and len(comp.rows) == 2:
                continue
            rows = self.surviving_rows(ci, known)
            for i, e in enumerate(comp.edge_ids):
                if e in known:
                    continue
                values = {comp.rows[r][0][i] for r in rows}
                if len(values) == 1:
                    out[e] = values.pop()
        return out

    def open_probability(self, known: Mapping[str, bool],
                         edge_id: str) -> Fraction:
        ci = self.component_of[edge_id]
        comp = self.components[ci]
        rows = self.surviving_rows(ci, known)
        total = sum((comp.rows[r][1] for r in rows), Fraction(0))
        if total == 0:
            raise ValueError("revealed statuses are inconsistent")
        i = comp.edge_index[edge_id]
        hit = sum((comp.rows[r][1] for r in rows if comp.rows[r][0][i]),
                  Fraction(0))
        return hit / total


def _component_table(variables: Sequence[NetVariable],
                     edge_ids: Sequence[str], leaf_cap: int) -> ComponentTable:
    ordered_edges = tuple(sorted(edge_ids))
    rows: dict[tuple[bool, ...], Fraction] = {}
    assign: dict[str, int] = {}
    leaves = 0

    def descend(i: int, prob: Fraction) -> None:
        nonlocal leaves
        if i == len(variables):
            leaves += 1
            if leaves > leaf_cap:
                raise EnumerationCapError(
                    f"dependency component support exceeds {leaf_cap} rows")
            key = tuple(assign[e] == 0 for e in ordered_edges)
            rows[key] = rows.get(key, Fraction(0)) + prob
            return
        var = variables[i]
        row = 0
        for j, parent in enumerate(var.parents):
            row |= assign[parent] << j
        p_one = var.cpt[row]
        for value, p in ((0, 1 - p_one), (1, p_one)):
            if p == 0:
                continue
            assign[var.id] = value
            descend(i + 1, prob * p)
        assign.pop(var.id, None)

    descend(0, Fraction(1))
    return ComponentTable(ordered_edges, tuple(sorted(rows.items())))


def build_joint(instance: CtpInstance, leaf_cap: int = 1 << 22) -> JointModel:
    """Factor the instance's edge-status distribution into component tables."""
    uncertain = {e.id for e in instance.uncertain_edges}
    if instance.dependency is None:
        comps = []
        for e in instance.uncertain_edges:
            rows = (((False,), e.block_p), ((True,), 1 - e.block_p))
            comps.append(ComponentTable((e.id,), rows))
        return JointModel(tuple(comps))
    comps = []
    for group in instance.dependency.moral_components:
        edge_ids = [v.id for v in group if v.id in uncertain]
        if not edge_ids:
            continue
        comps.append(_component_table(group, edge_ids, leaf_cap))
    return JointModel(tuple(comps))


# ---------------------------------------------------------------------------
# instance

@dataclass(frozen=True)
class CtpInstance:
    variant: Variant
    vertices: tuple[str, ...]
    edges: tuple[EdgeSpec, ...]
    s: str
    t: str
    dependency: DependencyNet | None = None
    sensing: SensingSpec | None = None

    @cached_property
    def edge_map(self) -> dict[str, EdgeSpec]:
        return {e.id: e for e in self.edges}

    @cached_property
    def uncertain_edges(self) -> tuple[EdgeSpec, ...]:
        return tuple(e for e in self.edges if e.uncertain)

    @cached_property
    def _moves(self) -> dict[str, tuple[tuple[EdgeSpec, str], ...]]:
        table: dict[str, list[tuple[EdgeSpec, str]]] = {
            v: [] for v in self.vertices}
        for e in self.edges:
            table[e.tail].append((e, e.head))
            if not e.directed:
                table[e.head].append((e, e.tail))
        return {v: tuple(moves) for v, moves in table.items()}

    def moves_from(self, vertex: str) -> tuple[tuple[EdgeSpec, str], ...]:
        """Edges traversable out of `vertex`, paired with their far ends."""
        return self._moves[vertex]

    @cached_property
    def _incident_uncertain(self) -> dict[str, tuple[EdgeSpec, ...]]:
        table: dict[str, list[EdgeSpec]] = {v: [] for v in self.vertices}
        for e in self.edges:
            if e.uncertain:
                table[e.tail].append(e)
                table[e.head].append(e)
        return {v: tuple(edges) for v, edges in table.items()}

    def visible_from(self, vertex: str) -> tuple[EdgeSpec, ...]:
        return self._incident_uncertain[vertex]

    def observe(self, weather: Weather, vertex: str) -> tuple[tuple[str, bool], ...]:
        """Statuses revealed on arrival at `vertex`.

        Every uncertain edge incident on `vertex` shows its true status,
        whichever endpoint the walker stands at; nothing else does. No
        deduction happens here.
        """
        pairs = [(e.id, weather.is_open(e.id))
                 for e in self.visible_from(vertex)]
        return tuple(sorted(pairs))

    @cached_property
    def joint(self) -> JointModel:
        return build_joint(self)


# ---------------------------------------------------------------------------
# validation

def _validate_net(instance: CtpInstance) -> None:
    net = instance.dependency
    assert net is not None
    seen: set[str] = set()
    for var in net.variables:
        if var.id in seen:
            raise InvalidInstanceError(f"duplicate net variable {var.id!r}")
        if len(var.parents) > net.max_in_degree:
            raise InvalidInstanceError(
                f"variable {var.id!r} has in-degree {len(var.parents)}, "
                f"cap is {net.max_in_degree}")
        if len(set(var.parents)) != len(var.parents):
            raise InvalidInstanceError(
                f"variable {var.id!r} repeats a parent")
        for p in var.parents:
            if p not in seen:
                raise InvalidInstanceError(
                    f"variable {var.id!r} uses parent {p!r} that is not "
                    f"listed before it")
        if len(var.cpt) != 1 << len(var.parents):
            raise InvalidInstanceError(
                f"variable {var.id!r} needs {1 << len(var.parents)} rows, "
                f"got {len(var.cpt)}")
        for p in var.cpt:
            if not 0 <= p <= 1:
                raise InvalidInstanceError(
                    f"variable {var.id!r} has probability {p} outside [0, 1]")
        seen.add(var.id)

    uncertain = {e.id: e for e in instance.uncertain_edges}
    for eid in uncertain:
        if eid not in net.variable_map:
            raise InvalidInstanceError(
                f"uncertain edge {eid!r} has no dependency variable")
    for var in net.variables:
        if var.id in instance.edge_map and var.id not in uncertain:
            raise InvalidInstanceError(
                f"variable {var.id!r} names a sure edge")

    # Stored marginals must match what the net induces.
    joint = instance.joint
    for eid, edge in uncertain.items():
        marginal = 1 - joint.open_probability({}, eid)
        if marginal != edge.block_p:
            raise InvalidInstanceError(
                f"edge {eid!r} stores block_p {edge.block_p} but the net "
                f"gives {marginal}")


def validate_instance(instance: CtpInstance) -> None:
    """Raise InvalidInstanceError if any structural rule fails."""
    if len(set(instance.vertices)) != len(instance.vertices):
        raise InvalidInstanceError("duplicate vertex name")
    vertex_set = set(instance.vertices)
    if not all(isinstance(v, str) and v for v in instance.vertices):
        raise InvalidInstanceError("vertex names must be nonempty strings")
    for endpoint in (instance.s, instance.t):
        if endpoint not in vertex_set:
            raise InvalidInstanceError(f"endpoint {endpoint!r} is not a vertex")
    if instance.s == instance.t:
        raise InvalidInstanceError("s and t must differ")

    seen_edges: set[str] = set()
    for e in instance.edges:
        if e.id in seen_edges:
            raise InvalidInstanceError(f"duplicate edge id {e.id!r}")
        seen_edges.add(e.id)
        if e.tail not in vertex_set or e.head not in vertex_set:
            raise InvalidInstanceError(f"edge {e.id!r} leaves the vertex set")
        if e.tail == e.head:
            raise InvalidInstanceError(f"edge {e.id!r} is a loop")
        if not 0 <= e.block_p < 1:
            raise InvalidInstanceError(
                f"edge {e.id!r} has block_p {e.block_p}, need [0, 1)")
        if e.uncertain and e.cost.is_infinite:
            raise InvalidInstanceError(
                f"edge {e.id!r} is uncertain and infinite")

    if instance.variant is Variant.DEPENDENT:
        if instance.dependency is None:
            raise InvalidInstanceError("dependent instance without a net")
        if instance.sensing is not None:
            raise InvalidInstanceError("dependent instance with sensing costs")
        _validate_net(instance)
    elif instance.variant is Variant.SENSING:
        if instance.sensing is None:
            raise InvalidInstanceError("sensing instance without sensing costs")
        if instance.dependency is not None:
            raise InvalidInstanceError("sensing instance with a dependency net")
    else:
        if instance.dependency is not None or instance.sensing is not None:
            raise InvalidInstanceError(
                "independent instance with extra sections")

    if instance.sensing is not None:
        seen_pairs: set[tuple[str, str]] = set()
        for entry in instance.sensing.entries:
            if entry.vertex not in vertex_set:
                raise InvalidInstanceError(
                    f"sensing vertex {entry.vertex!r} is not a vertex")
            edge = instance.edge_map.get(entry.edge)
            if edge is None or not edge.uncertain:
                raise InvalidInstanceError(
                    f"sensing entry targets {entry.edge!r}, which is not an "
                    f"uncertain edge")
            if entry.cost.is_infinite:
                raise InvalidInstanceError("sensing costs must be finite")
            pair = (entry.vertex, entry.edge)
            if pair in seen_pairs:
                raise InvalidInstanceError(f"duplicate sensing entry {pair}")
            seen_pairs.add(pair)


# ---------------------------------------------------------------------------
# building

class InstanceBuilder:
    """Mutable assembly surface; `build` validates and freezes."""

    def __init__(self, variant: Variant):
        self.variant = variant
        self._vertices: dict[str, None] = {}
        self._edges: dict[str, EdgeSpec] = {}
        self._variables: list[NetVariable] = []
        self._sensing: list[SensingEntry] = []
        self._max_in_degree = 2
        self.s: str | None = None
        self.t: str | None = None

    @classmethod
    def from_instance(cls, instance: CtpInstance) -> InstanceBuilder:
        builder = cls(instance.variant)
        for v in instance.vertices:
            builder.add_vertex(v)
        for e in instance.edges:
            builder._edges[e.id] = e
        if instance.dependency is not None:
            builder._variables = list(instance.dependency.variables)
            builder._max_in_degree = instance.dependency.max_in_degree
        if instance.sensing is not None:
            builder._sensing = list(instance.sensing.entries)
        builder.s = instance.s
        builder.t = instance.t
        return builder

    def add_vertex(self, vertex: str) -> str:
        self._vertices.setdefault(vertex, None)
        return vertex

    def add_edge(self, tail: str, head: str, cost: Cost | Fraction | int | str,
                 *, id: str | None = None, directed: bool = False,
                 block_p: Fraction | int | str = 0) -> str:
        if id is None:
            id = f"e{len(self._edges):04d}"
        if id in self._edges:
            raise InvalidInstanceError(f"duplicate edge id {id!r}")
        self.add_vertex(tail)
        self.add_vertex(head)
        spec = EdgeSpec(id, tail, head, Cost.of(cost), directed,
                        as_fraction(block_p))
        self._edges[id] = spec
        return id

    def add_variable(self, id: str, parents: Sequence[str] = (),
                     p_one: Sequence[Fraction | int | str] = ()) -> str:
        self._variables.append(NetVariable(
            id, tuple(parents), tuple(as_fraction(p) for p in p_one)))
        return id

    def add_sensing(self, vertex: str, edge: str,
                    cost: Cost | Fraction | int | str) -> None:
        self._sensing.append(SensingEntry(vertex, edge, Cost.of(cost)))

    def set_endpoints(self, s: str, t: str) -> None:
        self.s = self.add_vertex(s)
        self.t = self.add_vertex(t)

    def has_edge(self, id: str) -> bool:
        return id in self._edges

    def merge(self, keep: str, drop: str) -> None:
        """Redirect every edge touching `drop` onto `keep`, delete `drop`."""
        if keep == drop:
            raise InvalidInstanceError("cannot merge a vertex with itself")
        for name in (keep, drop):
            if name not in self._vertices:
                raise InvalidInstanceError(f"unknown vertex {name!r}")
        for eid, e in list(self._edges.items()):
            tail = keep if e.tail == drop else e.tail
            head = keep if e.head == drop else e.head
            if tail == head:
                raise InvalidInstanceError(
                    f"merging {drop!r} into {keep!r} would turn edge "
                    f"{eid!r} into a loop")
            if (tail, head) != (e.tail, e.head):
                self._edges[eid] = replace(e, tail=tail, head=head)
        del self._vertices[drop]
        if self.s == drop:
            self.s = keep
        if self.t == drop:
            self.t = keep
        self._sensing = [
            replace(entry, vertex=keep) if entry.vertex == drop else entry
            for entry in self._sensing]

    def build(self) -> CtpInstance:
        if self.s is None or self.t is None:
            raise InvalidInstanceError("endpoints are not set")
        dependency = None
        if self.variant is Variant.DEPENDENT:
            dependency = DependencyNet(tuple(self._variables),
                                       self._max_in_degree)
        sensing = None
        if self.variant is Variant.SENSING:
            sensing = SensingSpec(tuple(self._sensing))
        instance = CtpInstance(
            variant=self.variant,
            vertices=tuple(self._vertices),
            edges=tuple(self._edges.values()),
            s=self.s,
            t=self.t,
            dependency=dependency,
            sensing=sensing,
        )
        validate_instance(instance)
        return instance


def merge_vertices(instance: CtpInstance, keep: str, drop: str) -> CtpInstance:
    """Pure form of `InstanceBuilder.merge` on a frozen instance."""
    builder = InstanceBuilder.from_instance(instance)
    builder.merge(keep, drop)
    return builder.build()


# ---------------------------------------------------------------------------
# weathers

def weather_support(instance: CtpInstance,
                    cap: int = 1 << 20) -> list[tuple[Weather, Fraction]]:
    """Every positive-probability weather with its exact probability."""
    joint = instance.joint
    count = 1
    for comp in joint.components:
        count *= len(comp.rows)
    if count > cap:
        raise EnumerationCapError(
            f"{count} weathers exceed the cap of {cap}")
    acc: list[tuple[frozenset[str], Fraction]] = [(frozenset(), Fraction(1))]
    for comp in joint.components:
        step = []
        for blocked, p in acc:
            for statuses, rp in comp.rows:
                extra = {e for e, is_open in zip(comp.edge_ids, statuses)
                         if not is_open}
                step.append((blocked | extra, p * rp))
        acc = step
    return [(Weather(blocked), p) for blocked, p in acc]


def sample_weather(instance: CtpInstance, stream: SplitMix64) -> Weather:
    """Draw one weather; dependent nets sample in listed (ancestral) order."""
    if instance.dependency is None:
        blocked = {e.id for e in instance.uncertain_edges
                   if stream.bernoulli(e.block_p)}
        return Weather(frozenset(blocked))
    uncertain = {e.id for e in instance.uncertain_edges}
    values: dict[str, int] = {}
    blocked = set()
    for var in instance.dependency.variables:
        row = 0
        for j, parent in enumerate(var.parents):
            row |= values[parent] << j
        value = 1 if stream.bernoulli(var.cpt[row]) else 0
        values[var.id] = value
        if value and var.id in uncertain:
            blocked.add(var.id)
    return Weather(frozenset(blocked))


# ---------------------------------------------------------------------------
# serialization

_EDGE_KEYS = {"id", "tail", "head", "directed", "cost", "block_p"}
_TOP_KEYS = {"variant", "s", "t", "vertices", "edges", "dependency", "sensing"}


def instance_to_dict(instance: CtpInstance) -> dict:
    data: dict = {
        "variant": instance.variant.value,
        "s": instance.s,
        "t": instance.t,
        "vertices": list(instance.vertices),
        "edges": [
            {
                "id": e.id,
                "tail": e.tail,
                "head": e.head,
                "directed": e.directed,
                "cost": format_cost(e.cost),
                "block_p": format_rational(e.block_p),
            }
            for e in instance.edges
        ],
    }
    if instance.dependency is not None:
        data["dependency"] = {
            "max_in_degree": instance.dependency.max_in_degree,
            "variables": [
                {
                    "id": v.id,
                    "parents": list(v.parents),
                    "cpt": [[format_rational(1 - p), format_rational(p)]
                            for p in v.cpt],
                }
                for v in instance.dependency.variables
            ],
        }
    if instance.sensing is not None:
        data["sensing"] = {
            "entries": [
                {"vertex": x.vertex, "edge": x.edge,
                 "cost": format_cost(x.cost)}
                for x in instance.sensing.entries
            ],
        }
    return data


def _require_keys(obj: dict, allowed: set[str], where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise InvalidInstanceError(
            f"unknown keys {sorted(extra)} in {where}")


def instance_from_dict(data: dict) -> CtpInstance:
    if not isinstance(data, dict):
        raise InvalidInstanceError("instance document must be an object")
    _require_keys(data, _TOP_KEYS, "instance")
    try:
        variant = Variant(data["variant"])
    except (KeyError, ValueError) as exc:
        raise InvalidInstanceError(f"bad variant: {exc}") from exc
    for key in ("s", "t", "vertices", "edges"):
        if key not in data:
            raise InvalidInstanceError(f"missing key {key!r}")
    edges = []
    for i, item in enumerate(data["edges"]):
        _require_keys(item, _EDGE_KEYS, f"edge #{i}")
        try:
            edges.append(EdgeSpec(
                id=item["id"],
                tail=item["tail"],
                head=item["head"],
                cost=parse_cost(item["cost"]),
                directed=bool(item.get("directed", False)),
                block_p=parse_probability(item.get("block_p", "0/1")),
            ))
        except KeyError as exc:
            raise InvalidInstanceError(
                f"edge #{i} is missing {exc}") from exc
    dependency = None
    if "dependency" in data:
        dep = data["dependency"]
        _require_keys(dep, {"max_in_degree", "variables"}, "dependency")
        variables = []
        for item in dep.get("variables", ()):
            _require_keys(item, {"id", "parents", "cpt"}, "net variable")
            cpt = []
            for row in item["cpt"]:
                p0, p1 = (parse_probability(x) for x in row)
                if p0 + p1 != 1:
                    raise InvalidInstanceError(
                        f"cpt row {row} of {item['id']!r} does not sum to 1")
                cpt.append(p1)
            variables.append(NetVariable(
                item["id"], tuple(item.get("parents", ())), tuple(cpt)))
        dependency = DependencyNet(
            tuple(variables), int(dep.get("max_in_degree", 2)))
    sensing = None
    if "sensing" in data:
        sec = data["sensing"]
        _require_keys(sec, {"entries"}, "sensing")
        entries = []
        for item in sec.get("entries", ()):
            _require_keys(item, {"vertex", "edge", "cost"}, "sensing entry")
            entries.append(SensingEntry(
                item["vertex"], item["edge"], parse_cost(item["cost"])))
        sensing = SensingSpec(tuple(entries))
    instance = CtpInstance(
        variant=variant,
        vertices=tuple(data["vertices"]),
        edges=tuple(edges),
        s=data["s"],
        t=data["t"],
        dependency=dependency,
        sensing=sensing,
    )
    validate_instance(instance)
    return instance


def instance_to_json(instance: CtpInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def instance_from_json(text: str) -> CtpInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"not valid JSON: {exc}") from exc
    return instance_from_dict(data)


def save_instance(instance: CtpInstance, path: str | Path) -> None:
    Path(path).write_text(instance_to_json(instance), encoding="utf-8")


def load_instance(path: str | Path) -> CtpInstance:
    return instance_from_json(Path(path).read_text(encoding="utf-8"))


__all__ = [
    "Belief",
    "ComponentTable",
    "Cost",
    "CtpInstance",
    "DependencyNet",
    "EdgeSpec",
    "EnumerationCapError",
    "InstanceBuilder",
    "InvalidInstanceError",
    "JointModel",
    "NetVariable",
    "SensingEntry",
    "SensingSpec",
    "SplitMix64",
    "Variant",
    "Weather",
    "as_fraction",
    "build_joint",
    "format_cost",
    "format_rational",
    "instance_from_dict",
    "instance_from_json",
    "instance_to_dict",
    "instance_to_json",
    "load_instance",
    "merge_vertices",
    "parse_cost",
    "parse_probability",
    "parse_rational",
    "sample_weather",
    "save_instance",
    "trial_stream",
    "validate_instance",
    "weather_support",
]
