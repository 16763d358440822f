"""Classification and tailoring: turn stabilized supports into subsets of X.

Components are classified by whether they carry a validated unbounded hint
and, if not, by whether they outgrow the ball of radius 3S+4SN around the
basepoint. Large bounded components get N marker points chosen in the annulus
between 3S+3SN and 3S+4SN; tail points of a stabilized support are swapped
for those markers, which keeps cardinalities of intersections and symmetric
differences exactly while pulling everything back into the space.
"""
from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

from .augment import augment
from .chains import (
    ChainFamily,
    InstanceParams,
    check_instance,
    format_ratio,
    qualifying_pairs,
    set_ratio,
    variation_ratio,
)
from .errors import InternalInvariantError, MalformedInputError, PreconditionError
from .flow import build_flow, stabilize
from .space import (
    CLS_BOUNDED_LARGE,
    CLS_BOUNDED_SMALL,
    CLS_UNBOUNDED,
    Component,
    Decomposition,
    Space,
    rips_components,
)


@dataclass(frozen=True)
class TailorPlan:
    classes: dict
    z_points: dict
    inner: Fraction
    outer: Fraction
    warnings: tuple


@dataclass(frozen=True)
class SubsetFamily:
    subsets: dict  # point id -> frozenset of augmented points


@dataclass(frozen=True)
class Certificate:
    params: InstanceParams
    cases: dict
    radii: dict
    pairs: tuple  # (x, y, input_ratio, output_ratio)
    worst_ratio: Fraction
    worst_radius: Fraction
    bounds: dict

    def to_jsonable(self) -> dict:
        from .rational import format_rational

        return {
            "params": {
                "R": format_rational(self.params.R),
                "epsilon": format_rational(self.params.epsilon),
                "S": format_rational(self.params.S),
                "L": self.params.L,
                "N": self.params.N,
            },
            "cases": dict(sorted(self.cases.items())),
            "radii": {x: format_rational(r) for x, r in sorted(self.radii.items())},
            "pairs": [
                {
                    "x": x,
                    "y": y,
                    "input_ratio": format_ratio(rin),
                    "output_ratio": format_ratio(rout),
                }
                for x, y, rin, rout in self.pairs
            ],
            "worst_ratio": format_ratio(self.worst_ratio),
            "worst_radius": format_rational(self.worst_radius),
            "bound_radius": format_rational(self.bounds["overall"]),
            "bounds": {k: format_rational(v) for k, v in sorted(self.bounds.items())},
        }


def _ray_problem(space, comp, ray, S):
    if len(set(ray)) != len(ray):
        return "ray revisits a point"
    for p in ray:
        if p not in comp.point_set:
            return f"ray point {p!r} lies outside the component"
    for a, b in zip(ray, ray[1:]):
        if space.dist(a, b) > S:
            return f"ray hop ({a!r}, {b!r}) exceeds the scale"
    return None


def classify(space: Space, decomp: Decomposition, params: InstanceParams):
    """Finalize component classes; returns the updated decomposition and plan.

    Invalid hints fall back to the bounded path with a recorded warning.
    """
    if params.N is None:
        raise InternalInvariantError("classify needs completed params (N unset)")
    S, N = params.S, params.N
    inner = 3 * S + 3 * S * N
    outer = 3 * S + 4 * S * N
    warnings = []
    comps = []
    for comp in decomp.components:
        if comp.ray is not None:
            problem = _ray_problem(space, comp, comp.ray, S)
            if problem is None:
                comps.append(replace(comp, cls=CLS_UNBOUNDED, basepoint=comp.ray[0]))
                continue
            warnings.append(
                f"ignoring unbounded hint for the component of {comp.points[0]!r}: {problem}"
            )
            comp = replace(comp, ray=None, basepoint=comp.points[0])
        basepoint = comp.basepoint
        is_large = any(space.dist(basepoint, p) > outer for p in comp.points)
        comps.append(replace(comp, cls=CLS_BOUNDED_LARGE if is_large else CLS_BOUNDED_SMALL))
    decomp = Decomposition(scale=decomp.scale, components=tuple(comps), owner=decomp.owner)
    z_points = {}
    for comp in decomp.components:
        if comp.cls == CLS_BOUNDED_LARGE:
            z_points[comp.index] = annulus_points(space, comp, params)
    plan = TailorPlan(
        classes={c.index: c.cls for c in decomp.components},
        z_points=z_points,
        inner=inner,
        outer=outer,
        warnings=tuple(warnings),
    )
    return decomp, plan


def annulus_points(space: Space, comp: Component, params: InstanceParams) -> tuple:
    """N distinct markers with 3S+3SN < d(basepoint, .) <= 3S+4SN.

    Taken along a shortest S-Rips path from the basepoint to the lex-smallest
    point beyond the outer radius; the path is pinned down by walking backward
    from the target, always via the predecessor farthest from the basepoint
    (ties to the lex-smallest). Steps change the distance by at most S, so the
    path meets the annulus at least N times.
    """
    S, N = params.S, params.N
    inner = 3 * S + 3 * S * N
    outer = 3 * S + 4 * S * N
    bp = comp.basepoint
    level = {bp: 0}
    queue = deque([bp])
    while queue:
        u = queue.popleft()
        for v in sorted(space.metric.neighbors_within(u, S)):
            if v in comp.point_set and v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    target = None
    for p in comp.points:  # sorted, so the first hit is the lex-smallest
        if space.dist(bp, p) > outer:
            target = p
            break
    if target is None:
        raise InternalInvariantError(
            f"component of {bp!r} has no point beyond the outer radius"
        )
    path = [target]
    current = target
    while current != bp:
        want = level[current] - 1
        cands = [
            v
            for v in space.metric.neighbors_within(current, S)
            if v in comp.point_set and level.get(v) == want
        ]
        if not cands:
            raise InternalInvariantError(f"broken shortest-path levels at {current!r}")
        far = max(space.dist(bp, v) for v in cands)
        current = min(v for v in cands if space.dist(bp, v) == far)
        path.append(current)
    path.reverse()
    markers = []
    for p in path:
        d = space.dist(bp, p)
        if inner < d <= outer:
            markers.append(p)
            if len(markers) == N:
                break
    if len(markers) < N:
        raise InternalInvariantError(
            f"only {len(markers)} annulus points available at {bp!r}, need {N}"
        )
    return tuple(markers)


def tailor_subset(plan: TailorPlan, comp: Component, pts) -> set:
    """Map one stabilized support into the output subset for its component."""
    if not pts:
        raise InternalInvariantError("cannot tailor an empty support")
    cls = plan.classes[comp.index]
    if cls == CLS_UNBOUNDED:
        return set(pts)
    if cls == CLS_BOUNDED_SMALL:
        return set(comp.points)
    z = plan.z_points[comp.index]
    out = set()
    for p in pts:
        if isinstance(p, tuple):
            anchor, index = p
            if anchor != comp.anchor:
                raise InternalInvariantError(f"tail point {p!r} from a different component")
            if not 1 <= index <= len(z):
                raise InternalInvariantError(f"tail index {index} outside the working window")
            out.add(z[index - 1])
        else:
            if p not in comp.point_set:
                raise InternalInvariantError(f"support point {p!r} outside the component")
            out.add(p)
    return out


def run_pipeline(
    space: Space,
    family: ChainFamily,
    R,
    epsilon,
    S,
    jobs: int = 1,
    tracer=None,
):
    """Full conversion: admission check, decomposition, flow, tailoring.

    Returns (SubsetFamily, Certificate). Raises PreconditionError when the
    instance fails admission and InternalInvariantError if any guaranteed
    bound fails to hold (which would mean the machinery is wrong, not the
    input).
    """
    if not isinstance(jobs, int) or jobs < 1:
        raise MalformedInputError(f"jobs must be a positive int, got {jobs!r}")
    report = check_instance(space, family, R, epsilon, S)
    if not report.ok:
        raise PreconditionError(
            f"instance fails admission with {len(report.violations)} violation(s)",
            report=report,
        )
    params = report.params
    L, N, S = params.L, params.N, params.S
    decomp0 = rips_components(space, S)
    decomp, plan = classify(space, decomp0, params)
    aug = augment(space, decomp, params)
    flow_map = build_flow(aug)

    bounds = {
        "case1": S + S * L * L,
        "case2": 6 * S + 8 * S * N,
        "case3": 4 * S + 6 * N * S,
        "overall": 6 * S + 8 * S * N,
    }
    locality = S + 2 * N * S
    chains = family.chains

    def handle(x):
        comp = decomp.component_of(x)
        on_iter = None
        if tracer is not None:
            on_iter = lambda n, c: tracer(x, n, c)
        flowed, _ = stabilize(flow_map, chains[x], on_iterate=on_iter)
        support = set(flowed)
        for p in support:
            if aug.component_of(p).index != comp.index:
                raise InternalInvariantError(f"flow left the component at {x!r}")
            if isinstance(p, tuple) and p[1] > N:
                raise InternalInvariantError(f"tail index beyond N in the support of {x!r}")
            if aug.dist(x, p) > bounds["case1"]:
                raise InternalInvariantError(
                    f"stabilized support of {x!r} escaped the radius bound"
                )
        if comp.cls == CLS_UNBOUNDED:
            case = "1"
        elif comp.cls == CLS_BOUNDED_SMALL:
            case = "2"
        else:
            case = "3b" if any(isinstance(p, tuple) for p in support) else "3a"
        subset = frozenset(tailor_subset(plan, comp, support))
        if case == "3b":
            if space.dist(x, comp.basepoint) > locality:
                raise InternalInvariantError(
                    f"tail mass for {x!r} although it sits far from the basepoint"
                )
            z = set(plan.z_points[comp.index])
            if any(not isinstance(p, tuple) and p in z for p in support):
                raise InternalInvariantError(
                    f"support of {x!r} collides with the annulus markers"
                )
        radius = max(aug.dist(x, p) for p in subset)
        limit = bounds["case1"] if case == "1" else bounds["case2" if case == "2" else "case3"]
        if radius > limit:
            raise InternalInvariantError(
                f"output radius {radius} for {x!r} exceeds the case bound {limit}"
            )
        return x, support, case, subset, radius

    points = list(space.points)
    if jobs > 1 and tracer is None:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(handle, points))
    else:
        results = [handle(x) for x in points]

    supports = {}
    cases = {}
    subsets = {}
    radii = {}
    for x, support, case, subset, radius in results:
        supports[x] = support
        cases[x] = case
        subsets[x] = subset
        radii[x] = radius

    pair_rows = []
    worst_ratio = Fraction(0)
    for x, y in qualifying_pairs(space, params.R):
        comp = decomp.component_of(x)
        if decomp.component_of(y).index != comp.index:
            raise InternalInvariantError(
                f"qualifying pair ({x!r}, {y!r}) straddles two components"
            )
        rin = variation_ratio(chains[x], chains[y])
        rout = set_ratio(subsets[x], subsets[y])
        if rout == float("inf") or rout > rin:
            raise InternalInvariantError(
                f"output ratio for ({x!r}, {y!r}) is {rout}, input was {rin}"
            )
        if "3b" in (cases[x], cases[y]):
            A, B = supports[x], supports[y]
            FA, FB = subsets[x], subsets[y]
            if len(FA ^ FB) != len(A ^ B) or len(FA & FB) != len(A & B):
                raise InternalInvariantError(
                    f"tailoring distorted the pair ({x!r}, {y!r})"
                )
        if rout > worst_ratio:
            worst_ratio = rout
        pair_rows.append((x, y, rin, rout))

    certificate = Certificate(
        params=params,
        cases=cases,
        radii=radii,
        pairs=tuple(pair_rows),
        worst_ratio=worst_ratio,
        worst_radius=max(radii.values()),
        bounds=bounds,
    )
    return SubsetFamily(subsets=subsets), certificate
