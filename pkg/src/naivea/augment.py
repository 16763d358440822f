"""Tail augmentation: glue a discrete ray onto each component.

An augmented point is either a base id (str) or a tail point, represented as
the tuple (anchor_id, index) with index >= 1 and serialized "anchor#index".
Bounded components hang their tail at the basepoint; components emulating an
unbounded one hang it at the far end of their ray, so the flow can always
escape. Tail points exist lazily up to the cap N.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chains import InstanceParams
from .errors import InternalInvariantError, MalformedInputError, UnknownPointError
from .space import CLS_UNBOUNDED, Component, Decomposition, Space

AugPoint = "str | tuple[str, int]"


def is_tail(p) -> bool:
    return isinstance(p, tuple)


def format_aug(p) -> str:
    if isinstance(p, tuple):
        anchor, index = p
        return f"{anchor}#{index}"
    return p


def parse_aug(text):
    """Inverse of format_aug; base ids never contain '#'."""
    if not isinstance(text, str) or not text:
        raise MalformedInputError(f"bad augmented point {text!r}")
    if "#" not in text:
        return text
    anchor, _, idx = text.rpartition("#")
    if not anchor or not idx.isdigit():
        raise MalformedInputError(f"bad augmented point {text!r}")
    index = int(idx)
    if index < 1:
        raise MalformedInputError(f"tail index must be >= 1 in {text!r}")
    return (anchor, index)


def aug_sort_key(p):
    if isinstance(p, tuple):
        return (p[0], 1, p[1])
    return (p, 0, 0)


@dataclass(frozen=True)
class AugmentedSpace:
    space: Space
    decomposition: Decomposition
    params: InstanceParams
    tail_cap: int

    def __post_init__(self):
        anchors = {}
        for comp in self.decomposition.components:
            if comp.anchor in anchors:
                raise InternalInvariantError(f"duplicate tail anchor {comp.anchor!r}")
            anchors[comp.anchor] = comp
        object.__setattr__(self, "_by_anchor", anchors)

    def component_of(self, p) -> Component:
        if isinstance(p, tuple):
            comp = self._by_anchor.get(p[0])
            if comp is None:
                raise UnknownPointError(f"no component anchored at {p[0]!r}")
            return comp
        return self.decomposition.component_of(p)

    def _check_tail(self, p):
        anchor, index = p
        if anchor not in self._by_anchor:
            raise UnknownPointError(f"no component anchored at {anchor!r}")
        if not isinstance(index, int) or index < 1:
            raise MalformedInputError(f"bad tail index in {p!r}")
        if index > self.tail_cap:
            raise InternalInvariantError(
                f"tail index {index} exceeds the cap {self.tail_cap} at {anchor!r}"
            )

    def dist(self, u, v) -> Fraction:
        """Metric on the augmented space.

        Tails are glued isometrically at their anchor with spacing S, so a
        tail point (a, j) sits at distance d(x, a) + j*S from any base point
        and tails of different components route anchor-to-anchor.
        """
        S = self.params.S
        ut, vt = isinstance(u, tuple), isinstance(v, tuple)
        if not ut and not vt:
            self.space.require(u)
            self.space.require(v)
            return self.space.dist(u, v)
        if ut:
            self._check_tail(u)
        if vt:
            self._check_tail(v)
        if ut and vt:
            if u[0] == v[0]:
                return abs(u[1] - v[1]) * S
            return u[1] * S + self.space.dist(u[0], v[0]) + v[1] * S
        if ut:
            u, v = v, u  # now u is the base point, v the tail
        self.space.require(u)
        return self.space.dist(u, v[0]) + v[1] * S

    def truncate(self, comp: Component) -> set:
        """The working window for one component: its points plus, for bounded
        components, the first N tail points."""
        pts = set(comp.points)
        if comp.cls != CLS_UNBOUNDED:
            pts.update((comp.anchor, j) for j in range(1, self.params.N + 1))
        return pts

    def materialize(self, max_index: int) -> list:
        """Every base point plus tail points up to max_index (tests only)."""
        if max_index > self.tail_cap:
            raise InternalInvariantError(
                f"materialization depth {max_index} exceeds the cap {self.tail_cap}"
            )
        pts: list = list(self.space.points)
        for comp in self.decomposition.components:
            pts.extend((comp.anchor, j) for j in range(1, max_index + 1))
        return pts


def augment(space: Space, decomposition: Decomposition, params: InstanceParams) -> AugmentedSpace:
    if params.N is None:
        raise InternalInvariantError("augment needs completed params (N unset)")
    return AugmentedSpace(
        space=space, decomposition=decomposition, params=params, tail_cap=params.N
    )


def aug_dist(aug: AugmentedSpace, u, v) -> Fraction:
    return aug.dist(u, v)


def truncate(aug: AugmentedSpace, comp: Component) -> set:
    return aug.truncate(comp)
