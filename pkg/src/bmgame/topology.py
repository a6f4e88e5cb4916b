"""Strongly computable T0 space kernel.

Two concrete space families are supported: Euclidean space under the
max-coordinate metric (balls are open rational boxes) and the unit torus
(balls are wrapped rational arcs/boxes of radius < 1/2).  Every relation
between basic opens — disjointness, inclusion, strict closure inclusion —
is an exact rational comparison, so all of them are decidable.

The module also houses a small interval/box calculus with open/closed
endpoint flags.  It powers the computably-enumerable operations (basic-open
intersection, difference against closures, coverage by finite unions) that
the game and dynamics layers rely on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

Q = Fraction

EUCLIDEAN = "euclidean"
TORUS = "torus"

HALF = Q(1, 2)


class DimensionMismatch(ValueError):
    """Basic opens from different spaces were combined."""


class InvalidBall(ValueError):
    """Center/radius data violates the basic-open invariants."""


def _as_q(value) -> Q:
    if isinstance(value, Q):
        return value
    if isinstance(value, int):
        return Q(value)
    raise TypeError(f"expected a rational, got {value!r}")


@dataclass(frozen=True)
class BasicOpen:
    """A non-empty basic open set: an open rational ball.

    Euclidean balls are taken in the max metric, i.e. open boxes
    (c_i - r, c_i + r).  Torus balls are wrapped arcs/boxes with
    center coordinates in [0, 1) and radius < 1/2.
    """

    kind: str
    center: tuple[Q, ...]
    radius: Q

    def __post_init__(self):
        if self.kind not in (EUCLIDEAN, TORUS):
            raise InvalidBall(f"unknown space kind {self.kind!r}")
        if not self.center:
            raise InvalidBall("center must have at least one coordinate")
        object.__setattr__(self, "center", tuple(_as_q(c) for c in self.center))
        object.__setattr__(self, "radius", _as_q(self.radius))
        if self.radius <= 0:
            raise InvalidBall("radius must be positive")
        if self.kind == TORUS:
            if self.radius >= HALF:
                raise InvalidBall("torus radius must be < 1/2")
            if any(c < 0 or c >= 1 for c in self.center):
                raise InvalidBall("torus center coordinates must lie in [0,1)")

    @property
    def dim(self) -> int:
        return len(self.center)

    def contains_point(self, point: Sequence[Q]) -> bool:
        if len(point) != self.dim:
            raise DimensionMismatch("point dimension mismatch")
        return all(
            _coord_dist(self.kind, _as_q(x), c) < self.radius
            for x, c in zip(point, self.center)
        )


@dataclass(frozen=True)
class Space:
    """A space kind plus dimension, with an optional bounded play region.

    ``region`` is a finite union of basic opens; ``None`` means the whole
    space (used for torus dynamics, where every play is automatically
    inside).  Game moves must stay inside the region.
    """

    kind: str
    dim: int
    region: Optional[tuple[BasicOpen, ...]] = None

    def __post_init__(self):
        if self.region is not None:
            region = tuple(self.region)
            if not region:
                raise InvalidBall("region must be a non-empty union")
            for ball in region:
                if ball.kind != self.kind or ball.dim != self.dim:
                    raise DimensionMismatch("region member outside the space")
            object.__setattr__(self, "region", region)

    def ball(self, center, radius) -> BasicOpen:
        if isinstance(center, (int, Q)):
            center = (center,)
        return BasicOpen(self.kind, tuple(center), radius)

    def region_primary(self) -> BasicOpen:
        """The first region member; the default arena for machine play."""
        if self.region is None:
            raise InvalidBall("space has no bounded region")
        return self.region[0]


def euclidean_space(dim: int = 1, region: Optional[Iterable[BasicOpen]] = None) -> Space:
    return Space(EUCLIDEAN, dim, tuple(region) if region is not None else None)


def torus_space(dim: int = 1, region: Optional[Iterable[BasicOpen]] = None) -> Space:
    return Space(TORUS, dim, tuple(region) if region is not None else None)


def unit_interval_space() -> Space:
    """Euclidean line with the region (0,1) — the default game arena."""
    ball = BasicOpen(EUCLIDEAN, (HALF,), HALF)
    return Space(EUCLIDEAN, 1, (ball,))


def _coord_dist(kind: str, a: Q, b: Q) -> Q:
    d = abs(a - b)
    if kind == TORUS:
        d = d % 1
        if d > HALF:
            d = 1 - d
    return d


def center_distance(a: BasicOpen, b: BasicOpen) -> Q:
    """Max-metric distance between centers (wrapped on the torus)."""
    _check_same(a, b)
    return max(_coord_dist(a.kind, x, y) for x, y in zip(a.center, b.center))


def _check_same(a: BasicOpen, b: BasicOpen) -> None:
    if a.kind != b.kind or a.dim != b.dim:
        raise DimensionMismatch(f"{a.kind}^{a.dim} vs {b.kind}^{b.dim}")


def disjoint(a: BasicOpen, b: BasicOpen) -> bool:
    """Exact disjointness; tangent open balls count as disjoint."""
    _check_same(a, b)
    return any(
        _coord_dist(a.kind, x, y) >= a.radius + b.radius
        for x, y in zip(a.center, b.center)
    )


def subset(a: BasicOpen, b: BasicOpen) -> bool:
    """Exact test for a ⊆ b."""
    _check_same(a, b)
    if a.radius > b.radius:
        return False
    return center_distance(a, b) <= b.radius - a.radius


def closure_strictly_inside(a: BasicOpen, b: BasicOpen) -> bool:
    """Exact test for closure(a) ⊊ b."""
    _check_same(a, b)
    if a.radius >= b.radius:
        return False
    return center_distance(a, b) < b.radius - a.radius


def half_closure_ball(u: BasicOpen) -> BasicOpen:
    """The half-radius ball at the same center; its closure sits strictly
    inside u.  This realizes the proper-subset step used when a strategy
    must shrink below the previous move."""
    return BasicOpen(u.kind, u.center, u.radius / 2)


def diameter(a: BasicOpen) -> Q:
    """sup of pairwise distances inside the ball: 2r, capped at the wrap
    bound 1/2 on the torus (no two torus points are farther apart)."""
    d = 2 * a.radius
    if a.kind == TORUS and d > HALF:
        return HALF
    return d


# ---------------------------------------------------------------------------
# Interval/box calculus with endpoint flags.
#
# Used for the c.e. operations: exact intersection pieces, difference against
# closed sets, and coverage of a ball by a finite union.  Intervals are kept
# in linear (unwrapped) coordinates; torus pieces are linearized relative to
# a reference ball before any boolean operation.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    lo: Q
    hi: Q
    lo_open: bool = True
    hi_open: bool = True

    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        if self.lo == self.hi:
            return self.lo_open or self.hi_open
        return False

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo or (self.lo == other.lo and self.lo_open):
            lo, lo_open = self.lo, self.lo_open
        else:
            lo, lo_open = other.lo, other.lo_open
        if self.hi < other.hi or (self.hi == other.hi and self.hi_open):
            hi, hi_open = self.hi, self.hi_open
        else:
            hi, hi_open = other.hi, other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def subtract(self, other: "Interval") -> list["Interval"]:
        """Set difference self \\ other, as at most two intervals."""
        if self.is_empty():
            return []
        if other.is_empty():
            return [self]
        out = []
        left = Interval(self.lo, other.lo, self.lo_open, not other.lo_open)
        right = Interval(other.hi, self.hi, not other.hi_open, self.hi_open)
        for piece in (left.intersect(self), right.intersect(self)):
            if not piece.is_empty():
                out.append(piece)
        return out

    def sample(self) -> Q:
        """Some rational point in a non-empty interval."""
        if self.lo == self.hi:
            return self.lo
        return (self.lo + self.hi) / 2


@dataclass(frozen=True)
class Box:
    intervals: tuple[Interval, ...]

    def is_empty(self) -> bool:
        return any(iv.is_empty() for iv in self.intervals)

    def intersect(self, other: "Box") -> "Box":
        return Box(tuple(a.intersect(b) for a, b in zip(self.intervals, other.intervals)))

    def subtract(self, other: "Box") -> list["Box"]:
        """self \\ other as a finite union of boxes (possibly overlapping)."""
        if self.is_empty():
            return []
        if other.is_empty():
            return [self]
        out = []
        for i, (mine, cut) in enumerate(zip(self.intervals, other.intervals)):
            for piece in mine.subtract(cut):
                ivs = list(self.intervals)
                ivs[i] = piece
                box = Box(tuple(ivs))
                if not box.is_empty():
                    out.append(box)
        return out

    def sample(self) -> tuple[Q, ...]:
        return tuple(iv.sample() for iv in self.intervals)


def _difference(boxes: list[Box], cuts: list[Box]) -> list[Box]:
    """Union(boxes) minus Union(cuts), as a finite union of boxes."""
    remaining = list(boxes)
    for cut in cuts:
        remaining = [piece for box in remaining for piece in box.subtract(cut)]
    return [b for b in remaining if not b.is_empty()]


def _ball_box(ball: BasicOpen) -> Box:
    """Linear open box of a ball.  For torus balls this is the unwrapped
    span around the center; callers must linearize peers into the same
    window before combining."""
    return Box(tuple(Interval(c - ball.radius, c + ball.radius) for c in ball.center))


def _closed_ball_box(ball: BasicOpen) -> Box:
    return Box(
        tuple(
            Interval(c - ball.radius, c + ball.radius, False, False)
            for c in ball.center
        )
    )


def _linearized_boxes(reference: BasicOpen, ball: BasicOpen, closed: bool) -> list[Box]:
    """All representatives of `ball` that can meet the linear span of
    `reference`.  On Euclidean space this is just the ball's box; on the
    torus each coordinate is shifted by the integers that bring it within
    reach of the reference window."""
    base = _closed_ball_box(ball) if closed else _ball_box(ball)
    if reference.kind == EUCLIDEAN:
        return [base]
    coord_choices: list[list[Interval]] = []
    for ref_c, iv in zip(reference.center, base.intervals):
        choices = []
        for shift in (-1, 0, 1):
            cand = Interval(iv.lo + shift, iv.hi + shift, iv.lo_open, iv.hi_open)
            window = Interval(ref_c - reference.radius, ref_c + reference.radius)
            if not cand.intersect(window).is_empty():
                choices.append(cand)
        coord_choices.append(choices)
    return [Box(tuple(combo)) for combo in itertools.product(*coord_choices)]


def _canon_center(kind: str, coords: Iterable[Q]) -> tuple[Q, ...]:
    if kind == TORUS:
        return tuple(c % 1 for c in coords)
    return tuple(coords)


def _cover_box(kind: str, box: Box) -> Iterator[BasicOpen]:
    """Enumerate balls inside an open box whose union is the whole box.

    A cube is emitted in one shot.  Anisotropic boxes are exhausted by
    dyadic grids of shrinking radius; the enumeration is infinite but every
    interior point is covered at some finite stage.
    """
    widths = [iv.hi - iv.lo for iv in box.intervals]
    wmin = min(widths)
    if all(w == wmin for w in widths):
        center = _canon_center(kind, ((iv.lo + iv.hi) / 2 for iv in box.intervals))
        yield BasicOpen(kind, center, wmin / 2)
        return
    level = 1
    while True:
        r = wmin / (2 ** level)
        axes = []
        for iv in box.intervals:
            count = int((iv.hi - iv.lo) / r) - 1
            axes.append([iv.lo + r * (m + 1) for m in range(count)])
        for combo in itertools.product(*axes):
            yield BasicOpen(kind, _canon_center(kind, combo), r)
        level += 1


def intersection_pieces(u: BasicOpen, v: BasicOpen) -> list[Box]:
    """The open set u ∩ v as a finite list of linear boxes (coordinates
    relative to u's span; centers may need canonicalization on the torus)."""
    _check_same(u, v)
    mine = _ball_box(u)
    pieces = []
    for cand in _linearized_boxes(u, v, closed=False):
        piece = mine.intersect(cand)
        if not piece.is_empty():
            pieces.append(piece)
    return pieces


def intersect_enumerate(u: BasicOpen, v: BasicOpen) -> Iterator[BasicOpen]:
    """Enumerate basic opens whose union is exactly u ∩ v.

    Every emission is a subset of both inputs; the enumeration is empty iff
    the inputs are disjoint.  When the intersection is a cube (always in
    dimension 1) it is emitted as a single ball first.
    """
    pieces = intersection_pieces(u, v)
    iterators = [_cover_box(u.kind, piece) for piece in pieces]
    # Round-robin so that every piece is exhausted even when one of them
    # has an infinite cover.
    pending = [iter(it) for it in iterators]
    while pending:
        still = []
        for it in pending:
            try:
                yield next(it)
            except StopIteration:
                continue
            still.append(it)
        pending = still


def difference_pieces(
    u: BasicOpen, closed_balls: Sequence[BasicOpen]
) -> list[Box]:
    """u minus the union of the CLOSURES of the given balls, as open boxes."""
    cuts = []
    for ball in closed_balls:
        _check_same(u, ball)
        cuts.extend(_linearized_boxes(u, ball, closed=True))
    return _difference([_ball_box(u)], cuts)


def covered_by_union(ball: BasicOpen, members: Sequence[BasicOpen]) -> bool:
    """Exact test for ball ⊆ union(members)."""
    cuts = []
    for member in members:
        _check_same(ball, member)
        cuts.extend(_linearized_boxes(ball, member, closed=False))
    return not _difference([_ball_box(ball)], cuts)


def region_contains(space: Space, ball: BasicOpen) -> bool:
    """Whether a ball lies inside the space's play region."""
    if ball.kind != space.kind or ball.dim != space.dim:
        raise DimensionMismatch("ball outside the space")
    if space.region is None:
        return True
    return covered_by_union(ball, space.region)


def first_cover_ball(kind: str, box: Box) -> BasicOpen:
    """First ball of the canonical cover of a non-empty open box."""
    return next(_cover_box(kind, box))
