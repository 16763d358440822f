"""Independent verification.

verify_naive re-derives every ratio and the support radius from the space
and the proposed subsets alone; verify_certificate reruns the deterministic
pipeline and demands byte-equality of the canonical serialization. The flow
monitor brute-forces every small chain on a successor path and checks the
redistribution laws exhaustively.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .chains import (
    INFINITE,
    diff_l1,
    format_ratio,
    l1_norm,
    meet,
    qualifying_pairs,
    set_ratio,
)
from .errors import MalformedInputError, PreconditionError, UnknownPointError
from .flow import split, stabilize, step
from .space import Space


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    violations: tuple
    stats: dict

    def to_jsonable(self) -> dict:
        return {"ok": self.ok, "violations": [dict(v) for v in self.violations], "stats": dict(self.stats)}


def _resolve_distance(space, hint_anchors, tail_spacing, x, p):
    """Distance from a base point to a subset member, which may be a tail
    point (anchor, j) hanging at a known anchor with the given spacing."""
    if isinstance(p, tuple):
        anchor, index = p
        if tail_spacing is None:
            raise MalformedInputError(
                f"subset contains tail point {anchor}#{index} but no tail spacing was supplied"
            )
        if not space.has(anchor) or (hint_anchors is not None and anchor not in hint_anchors):
            raise UnknownPointError(f"subset contains unknown tail anchor {anchor!r}")
        if not isinstance(index, int) or index < 1:
            raise MalformedInputError(f"bad tail index in subset member {p!r}")
        return space.dist(x, anchor) + index * tail_spacing
    if not space.has(p):
        raise UnknownPointError(f"subset contains unknown point {p!r}")
    return space.dist(x, p)


def verify_naive(
    space: Space,
    subsets,
    R,
    epsilon,
    tail_spacing=None,
    hint_anchors=None,
) -> VerifyReport:
    """Check a subset family directly against the two defining conditions.

    (a) every pair at distance <= R has symmetric-difference/intersection
    ratio strictly below epsilon; (b) the uniform support radius S' is
    reported. PASS means (a) holds; S' lands in stats for the caller to
    compare against whatever bound they expect.
    """
    R = Fraction(R)
    epsilon = Fraction(epsilon)
    if epsilon <= 0 or R <= 0:
        raise MalformedInputError("R and epsilon must be positive")
    for x in space.points:
        A = subsets.get(x)
        if A is None:
            raise MalformedInputError(f"no subset for point {x!r}")
        if not A:
            raise MalformedInputError(f"empty subset for point {x!r}")

    violations = []
    worst = Fraction(0)
    pairs = qualifying_pairs(space, R)
    for x, y in pairs:
        ratio = set_ratio(subsets[x], subsets[y])
        if ratio != INFINITE and ratio > worst:
            worst = ratio
        if ratio >= epsilon:
            violations.append(
                {"condition": "set_ratio", "x": x, "y": y, "ratio": format_ratio(ratio)}
            )

    radius = Fraction(0)
    for x in space.points:
        for p in subsets[x]:
            d = _resolve_distance(space, hint_anchors, tail_spacing, x, p)
            if d > radius:
                radius = d

    stats = {
        "pairs_checked": len(pairs),
        "worst_ratio": format_ratio(worst if pairs else Fraction(0)),
        "support_radius": str(radius),
    }
    return VerifyReport(ok=not violations, violations=tuple(violations), stats=stats)


def first_divergence(a, b, path=""):
    """First differing field between two JSON-like trees, depth-first in
    sorted key order; None when equal."""
    if type(a) is not type(b):
        return path or "<root>"
    if isinstance(a, dict):
        for key in sorted(set(a) | set(b)):
            here = f"{path}.{key}" if path else str(key)
            if key not in a or key not in b:
                return here
            sub = first_divergence(a[key], b[key], here)
            if sub is not None:
                return sub
        return None
    if isinstance(a, list):
        for i in range(min(len(a), len(b))):
            sub = first_divergence(a[i], b[i], f"{path}[{i}]")
            if sub is not None:
                return sub
        if len(a) != len(b):
            return f"{path}[{min(len(a), len(b))}]"
        return None
    return None if a == b else (path or "<root>")


def verify_certificate(space, family, params, subsets_jsonable, certificate_jsonable) -> VerifyReport:
    """Recompute the whole output deterministically and compare field by field."""
    from .instance_io import output_to_jsonable
    from .tailor import run_pipeline

    try:
        subsets, certificate = run_pipeline(
            space, family, params.R, params.epsilon, params.S
        )
    except PreconditionError as exc:
        return VerifyReport(
            ok=False,
            violations=({"condition": "recompute_failed", "detail": str(exc)},),
            stats={},
        )
    recomputed = output_to_jsonable(subsets, certificate)
    proposed = {"subsets": subsets_jsonable, "certificate": certificate_jsonable}
    divergence = first_divergence(proposed, recomputed)
    if divergence is None:
        return VerifyReport(ok=True, violations=(), stats={"fields_compared": "all"})
    return VerifyReport(
        ok=False,
        violations=({"condition": "certificate_mismatch", "field": divergence},),
        stats={},
    )


@dataclass(frozen=True)
class FlowSuiteSpec:
    """Exhaustive suite over every chain on a successor path.

    Chains live on the first ``points`` vertices with entries up to
    ``max_value``; the path itself is long enough that no flow ever needs a
    successor beyond it.
    """

    points: int
    max_value: int

    def window(self) -> int:
        return self.points + self.points * self.max_value + 1


@dataclass(frozen=True)
class MonitorReport:
    ok: bool
    chains_checked: int
    pairs_checked: int
    failures: tuple

    def to_jsonable(self) -> dict:
        return {
            "ok": self.ok,
            "chains_checked": self.chains_checked,
            "pairs_checked": self.pairs_checked,
            "failures": list(self.failures),
        }


def _leq(a, b):
    return all(b.get(p, 0) >= v for p, v in a.items())


def flow_monitor(suite: FlowSuiteSpec) -> MonitorReport:
    """Brute-force oracle for the redistribution laws.

    Checks, for every chain: l1 preservation, the fixed-point
    characterization (one step is the identity exactly when there is no
    excess), the stabilization bound and final support size, and support
    drift by at most one successor hop. For every ordered pair: meet growth,
    difference contraction, and monotonicity.
    """
    if suite.points < 1 or suite.max_value < 0:
        raise MalformedInputError("suite needs >= 1 point and a nonnegative max value")
    width = len(str(suite.window() - 1))
    ids = [f"w{i:0{width}d}" for i in range(suite.window())]
    successor = {ids[i]: ids[i + 1] for i in range(len(ids) - 1)}
    failures = []

    def fail(msg):
        if len(failures) < 10:
            failures.append(msg)

    all_chains = []
    for values in itertools.product(range(suite.max_value + 1), repeat=suite.points):
        chain = {ids[i]: v for i, v in enumerate(values) if v > 0}
        all_chains.append(chain)

    stepped = []
    for a in all_chains:
        s1 = step(successor, a)
        stepped.append(s1)
        mass = l1_norm(a)
        if l1_norm(s1) != mass:
            fail(f"l1 changed for {a}")
        base, excess = split(a)
        if (s1 == a) != (not excess):
            fail(f"fixed-point law broken for {a}")
        allowed = set(a) | {successor[p] for p in a}
        if not set(s1) <= allowed:
            fail(f"support drifted more than one hop for {a}")
        final, count = stabilize(successor, a)
        if count > mass * l1_norm(excess):
            fail(f"stabilization bound exceeded for {a}")
        if len(final) != mass or any(v != 1 for v in final.values()):
            fail(f"stabilized result is not an indicator of mass {mass} for {a}")

    pairs = 0
    for i, a in enumerate(all_chains):
        sa = stepped[i]
        for j, b in enumerate(all_chains):
            sb = stepped[j]
            pairs += 1
            if l1_norm(meet(sa, sb)) < l1_norm(meet(a, b)):
                fail(f"meet shrank for {a} vs {b}")
            if diff_l1(sa, sb) > diff_l1(a, b):
                fail(f"difference grew for {a} vs {b}")
            if _leq(a, b) and not _leq(sa, sb):
                fail(f"monotonicity broken for {a} <= {b}")

    return MonitorReport(
        ok=not failures,
        chains_checked=len(all_chains),
        pairs_checked=pairs,
        failures=tuple(failures),
    )
