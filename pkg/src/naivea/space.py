"""Finite metric spaces with exact rational distances.

Three backends: an explicit symmetric matrix, the shortest-path metric of a
weighted undirected graph, and points embedded on the rational line. All
distance comparisons are exact; nothing here ever touches a float.
"""
from __future__ import annotations

import heapq
from bisect import bisect_left, bisect_right
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InternalInvariantError, MalformedInputError, UnknownPointError
from .rational import parse_rational

PointId = str

# Exhaustive triangle-inequality validation is cubic; beyond this many points
# a matrix source is accepted on symmetry/positivity alone.
TRIANGLE_CHECK_LIMIT = 200

ZERO = Fraction(0)


class MatrixMetric:
    """Distance lookup backed by a full symmetric matrix of rationals."""

    kind = "matrix"

    def __init__(self, rows: dict[str, dict[str, Fraction]]):
        self.rows = rows

    def dist(self, x, y):
        return self.rows[x][y]

    def neighbors_within(self, x, r):
        row = self.rows[x]
        return [y for y, d in row.items() if d <= r]


class GraphMetric:
    """Shortest-path metric of a connected positive-weight graph.

    Rows are computed by Dijkstra on demand and cached, so distance queries
    stay exact (Fraction weights) without materializing all pairs up front.
    """

    kind = "graph"

    def __init__(self, adjacency: dict[str, list[tuple[str, Fraction]]]):
        self.adjacency = adjacency
        self._rows: dict[str, dict[str, Fraction]] = {}

    def row(self, x):
        cached = self._rows.get(x)
        if cached is None:
            cached = self._rows[x] = self._dijkstra(x)
        return cached

    def _dijkstra(self, source):
        dist = {source: ZERO}
        done = set()
        heap = [(ZERO, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v, w in self.adjacency[u]:
                nd = d + w
                if v not in dist or nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        return dist

    def dist(self, x, y):
        return self.row(x)[y]

    def neighbors_within(self, x, r):
        row = self.row(x)
        return [y for y, d in row.items() if d <= r]


class PositionMetric:
    """|p(x) - p(y)| for points embedded on the rational line.

    neighbors_within is a bisect over the sorted embedding, which keeps the
    pair scans on long lines linear instead of quadratic.
    """

    kind = "positions"

    def __init__(self, positions: dict[str, Fraction]):
        self.positions = positions
        self._order = sorted((q, pid) for pid, q in positions.items())
        self._keys = [q for q, _ in self._order]

    def dist(self, x, y):
        return abs(self.positions[x] - self.positions[y])

    def neighbors_within(self, x, r):
        q = self.positions[x]
        lo = bisect_left(self._keys, q - r)
        hi = bisect_right(self._keys, q + r)
        return [pid for _, pid in self._order[lo:hi]]


@dataclass(frozen=True)
class UnboundedHint:
    """Marks one component as a finite window onto an unbounded space.

    ``ray`` is an ordered simple path (consecutive distances <= S) whose first
    vertex becomes the component's basepoint; the flow escapes along it.
    """

    component_of: PointId
    ray: tuple[PointId, ...]


@dataclass(frozen=True)
class Space:
    points: tuple[PointId, ...]
    metric: MatrixMetric | GraphMetric | PositionMetric
    hints: tuple[UnboundedHint, ...] = ()
    metric_spec: dict | None = None
    point_set: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "point_set", frozenset(self.points))

    def dist(self, x, y) -> Fraction:
        return self.metric.dist(x, y)

    def has(self, x) -> bool:
        return x in self.point_set

    def require(self, x):
        if x not in self.point_set:
            raise UnknownPointError(f"unknown point id {x!r}")


def _check_points(points) -> tuple[str, ...]:
    if not points:
        raise MalformedInputError("a space needs at least one point")
    seen = set()
    for p in points:
        if not isinstance(p, str) or not p:
            raise MalformedInputError(f"point ids must be non-empty strings, got {p!r}")
        if "#" in p:
            raise MalformedInputError(f"point id {p!r} may not contain '#'")
        if p in seen:
            raise MalformedInputError(f"duplicate point id {p!r}")
        seen.add(p)
    return tuple(sorted(points))


def _parse_hints(raw, point_set) -> tuple[UnboundedHint, ...]:
    hints = []
    for h in raw or ():
        if isinstance(h, UnboundedHint):
            anchor, ray = h.component_of, h.ray
        elif isinstance(h, dict):
            try:
                anchor, ray = h["component_of"], h["ray"]
            except KeyError as exc:
                raise MalformedInputError(f"unbounded hint missing field {exc}") from None
        else:
            raise MalformedInputError(f"bad unbounded hint {h!r}")
        ray = tuple(ray)
        if not ray:
            raise MalformedInputError("unbounded hint with empty ray")
        for p in (anchor, *ray):
            if p not in point_set:
                raise MalformedInputError(f"unbounded hint names unknown point {p!r}")
        hints.append(UnboundedHint(component_of=anchor, ray=ray))
    return tuple(hints)


def _build_matrix(points_in_order, entries):
    n = len(points_in_order)
    if not isinstance(entries, list) or len(entries) != n or any(
        not isinstance(row, list) or len(row) != n for row in entries
    ):
        raise MalformedInputError(f"matrix must be {n}x{n} to match the point list")
    parsed = [[parse_rational(v) for v in row] for row in entries]
    for i in range(n):
        if parsed[i][i] != 0:
            raise MalformedInputError(
                f"metric axiom violation: d({points_in_order[i]}, {points_in_order[i]}) != 0"
            )
        for j in range(i + 1, n):
            if parsed[i][j] != parsed[j][i]:
                raise MalformedInputError(
                    "metric axiom violation: asymmetric pair "
                    f"({points_in_order[i]}, {points_in_order[j]})"
                )
            if parsed[i][j] <= 0:
                raise MalformedInputError(
                    "metric axiom violation: non-positive distance for pair "
                    f"({points_in_order[i]}, {points_in_order[j]})"
                )
    if n <= TRIANGLE_CHECK_LIMIT:
        for k in range(n):
            for i in range(n):
                dik = parsed[i][k]
                row_k = parsed[k]
                row_i = parsed[i]
                for j in range(n):
                    if row_i[j] > dik + row_k[j]:
                        raise MalformedInputError(
                            "metric axiom violation: triangle inequality fails for "
                            f"({points_in_order[i]}, {points_in_order[j]}, {points_in_order[k]})"
                        )
    rows = {
        p: {q: parsed[i][j] for j, q in enumerate(points_in_order)}
        for i, p in enumerate(points_in_order)
    }
    return MatrixMetric(rows)


def _build_graph(point_set, edges):
    adjacency = {p: [] for p in point_set}
    for e in edges:
        try:
            u, v, w = e
        except (TypeError, ValueError):
            raise MalformedInputError(f"graph edge must be [u, v, weight], got {e!r}") from None
        if u not in point_set or v not in point_set:
            raise MalformedInputError(f"graph edge {e!r} names an unknown point")
        if u == v:
            raise MalformedInputError(f"graph edge {e!r} is a self-loop")
        weight = parse_rational(w)
        if weight <= 0:
            raise MalformedInputError(f"graph edge {e!r} has non-positive weight")
        adjacency[u].append((v, weight))
        adjacency[v].append((u, weight))
    # all distances must be finite: reject disconnected graphs outright
    start = next(iter(sorted(point_set)))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v, _ in adjacency[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    if len(seen) != len(point_set):
        missing = sorted(point_set - seen)[0]
        raise MalformedInputError(
            f"graph source is disconnected ({missing!r} unreachable); all distances must be finite"
        )
    return GraphMetric(adjacency)


def _build_positions(point_set, values):
    positions = {}
    for p in point_set:
        if p not in values:
            raise MalformedInputError(f"no position for point {p!r}")
        positions[p] = parse_rational(values[p])
    if len(set(positions.values())) != len(positions):
        raise MalformedInputError("positions must be distinct (zero distance between points)")
    return PositionMetric(positions)


def build_space(points, metric_source, hints=()) -> Space:
    """Construct a validated Space from a matrix, graph, or positions source.

    Matrix entries are aligned with ``points`` in the order given; the Space
    itself keeps points sorted, which is the canonical order everywhere else.
    """
    if not isinstance(metric_source, dict) or "type" not in metric_source:
        raise MalformedInputError("metric source must be a dict with a 'type' field")
    points_in_order = list(points)
    sorted_points = _check_points(points_in_order)
    kind = metric_source["type"]
    if kind == "matrix":
        metric = _build_matrix(points_in_order, metric_source.get("entries"))
    elif kind == "graph":
        metric = _build_graph(set(sorted_points), metric_source.get("edges", []))
    elif kind == "positions":
        metric = _build_positions(set(sorted_points), metric_source.get("values", {}))
    elif kind == "generator":
        from .generators import gen_instance  # local import to avoid a cycle

        space, _, _ = gen_instance(
            metric_source.get("kind"),
            metric_source.get("params", {}),
            metric_source.get("seed", 0),
        )
        if space.points != sorted_points:
            raise MalformedInputError(
                "generator metric does not reproduce the instance's point list"
            )
        if hints:
            space = Space(
                points=space.points,
                metric=space.metric,
                hints=_parse_hints(hints, space.point_set),
                metric_spec=space.metric_spec,
            )
        return space
    else:
        raise MalformedInputError(f"unknown metric type {kind!r}")
    parsed_hints = _parse_hints(hints, set(sorted_points))
    return Space(points=sorted_points, metric=metric, hints=parsed_hints, metric_spec=dict(metric_source))


def ball(space: Space, x, r) -> set:
    """Closed ball: every point within distance r of x (including x)."""
    space.require(x)
    r = Fraction(r)
    if r < 0:
        raise MalformedInputError(f"ball radius must be nonnegative, got {r}")
    return set(space.metric.neighbors_within(x, r))


def growth_profile(space: Space, r) -> int:
    """Largest closed-ball cardinality at radius r across the space."""
    r = Fraction(r)
    if r < 0:
        raise MalformedInputError(f"radius must be nonnegative, got {r}")
    return max(len(space.metric.neighbors_within(x, r)) for x in space.points)


CLS_BOUNDED_SMALL = "BOUNDED_SMALL"
CLS_BOUNDED_LARGE = "BOUNDED_LARGE"
CLS_UNBOUNDED = "UNBOUNDED_EMULATED"


@dataclass(frozen=True)
class Component:
    index: int
    points: tuple[PointId, ...]
    basepoint: PointId
    cls: str = CLS_BOUNDED_SMALL
    ray: tuple[PointId, ...] | None = None
    point_set: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "point_set", frozenset(self.points))

    @property
    def anchor(self) -> PointId:
        """Where this component's tail attaches: the ray's far end when the
        component emulates an unbounded one, else the basepoint."""
        if self.cls == CLS_UNBOUNDED and self.ray:
            return self.ray[-1]
        return self.basepoint


@dataclass(frozen=True)
class Decomposition:
    scale: Fraction
    components: tuple[Component, ...]
    owner: dict = field(repr=False)

    def component_of(self, x) -> Component:
        try:
            return self.components[self.owner[x]]
        except KeyError:
            raise UnknownPointError(f"unknown point id {x!r}") from None


def rips_components(space: Space, S) -> Decomposition:
    """Split the space into S-connected pieces (edges where d <= S).

    Components are indexed by their lexicographically smallest member;
    basepoints default to that member, overridden by an unbounded hint's
    ray start. Classes here are provisional (finalized by the tailor).
    """
    S = Fraction(S)
    if S <= 0:
        raise MalformedInputError(f"scale S must be positive, got {S}")
    seen = set()
    groups = []
    for start in space.points:  # sorted, so groups come out in lex order
        if start in seen:
            continue
        group = []
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            group.append(u)
            for v in space.metric.neighbors_within(u, S):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        groups.append(tuple(sorted(group)))

    hint_by_member = {}
    for hint in space.hints:
        hint_by_member[hint.component_of] = hint

    components = []
    owner = {}
    for idx, pts in enumerate(groups):
        basepoint = pts[0]
        ray = None
        member_hints = {hint_by_member[p] for p in pts if p in hint_by_member}
        if len(member_hints) > 1:
            raise MalformedInputError(
                f"multiple unbounded hints target the component of {basepoint!r}"
            )
        if member_hints:
            hint = member_hints.pop()
            ray = hint.ray
            if ray[0] in pts:
                basepoint = ray[0]
        comp = Component(index=idx, points=pts, basepoint=basepoint, ray=ray)
        components.append(comp)
        for p in pts:
            owner[p] = idx
    decomp = Decomposition(scale=S, components=tuple(components), owner=owner)
    _assert_separated(space, decomp)
    return decomp


def _assert_separated(space, decomp):
    # inter-component gap > S is structural for a Rips decomposition; verify
    # on small spaces where the quadratic sweep is free
    if len(space.points) > 600 or len(decomp.components) == 1:
        return
    for comp in decomp.components:
        for x in comp.points:
            for y in space.metric.neighbors_within(x, decomp.scale):
                if y not in comp.point_set:
                    raise InternalInvariantError(
                        f"components of {x!r} and {y!r} are not {decomp.scale}-separated"
                    )
