"""Computably enumerable open sets and the effective category calculus.

A CeOpenSet is a deterministic, restartable enumerator of basic opens
(with optional skip tokens for dovetailing).  An EndWitness certifies that
a set A is effectively nowhere dense: a total refinement map sending every
basic open U to a basic open inside U and disjoint from A.  A
MeagerPresentation is a layerwise sequence of such witnesses, presenting a
set of effective first category.

The composition facts implemented here:

* the complement of a dense c.e. open set is effectively nowhere dense
  (refine by intersecting with an emitted ball found by the set's density
  evidence),
* finite intersections compose witnesses sequentially — the composed
  output in fact avoids the union of the sets, which the game strategies
  exploit,
* the closure of an effectively nowhere dense set is effectively nowhere
  dense with the very same refinement map (an open set disjoint from A is
  disjoint from its closure).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from . import names as nm
from .topology import BasicOpen, Space, intersect_enumerate

Q = Fraction

Token = Optional[BasicOpen]  # None is a skip token
Point = tuple[Q, ...]


class DensitySearchDiverged(RuntimeError):
    """A claimed-dense set failed to produce a ball within its own budget."""


@dataclass(frozen=True)
class CeOpenSet:
    """A c.e. open set: a restartable stream of {Emit(ball) | Skip} tokens.

    ``density_evidence``, when present, backs a density claim: given any
    basic open U it returns an emitted ball that meets U (or raises
    DensitySearchDiverged).  ``finite_balls`` is set when the union is a
    finite list, which unlocks exact closure arithmetic downstream.
    """

    space: Space
    factory: Callable[[], Iterator[Token]]
    tag: str
    density_evidence: Optional[Callable[[BasicOpen], BasicOpen]] = None
    finite_balls: Optional[tuple[BasicOpen, ...]] = None

    def tokens(self) -> Iterator[Token]:
        return self.factory()

    def balls(self, limit: int) -> list[BasicOpen]:
        """The emissions among the first `limit` tokens."""
        out = []
        for token in itertools.islice(self.tokens(), limit):
            if token is not None:
                out.append(token)
        return out

    @staticmethod
    def from_balls(space: Space, balls: Sequence[BasicOpen], tag: str) -> "CeOpenSet":
        fixed = tuple(balls)

        def factory():
            return iter(fixed)

        return CeOpenSet(space, factory, tag, finite_balls=fixed)


def member_semidecide(point: Point, u: CeOpenSet, fuel: int) -> Optional[str]:
    """Yes-with-witness-name iff an emission within `fuel` tokens contains
    the point; None means unknown."""
    for token in itertools.islice(u.tokens(), fuel):
        if token is not None and token.contains_point(point):
            return nm.ball_name(token)
    return None


@dataclass(frozen=True)
class EndWitness:
    """Effective nowhere density certificate for the set tagged `set_tag`.

    ``refine_ball`` is total on basic opens: its output is inside the input
    and disjoint from the set.  ``contains`` is an optional decidable
    membership oracle used only by tests.
    """

    space: Space
    refine_ball: Callable[[BasicOpen], BasicOpen]
    set_tag: str
    contains: Optional[Callable[[Point], bool]] = None

    def refine_name(self, w: str) -> str:
        """The name-level refinement map; identity off the domain of nu."""
        try:
            ball = nm.ball_from_name(self.space, w)
        except (nm.MalformedName, nm.NonPositiveRadius):
            return w
        return nm.ball_name(self.refine_ball(ball))


# ---------------------------------------------------------------------------
# Witness constructors for the concrete sets exercised by the suite
# ---------------------------------------------------------------------------


def empty_set_witness(space: Space) -> EndWitness:
    return EndWitness(space, lambda ball: ball, "empty set", lambda point: False)


def _split_axis(lo: Q, hi: Q, cuts: list[Q]) -> tuple[Q, Q]:
    """Widest open sub-interval of (lo, hi) avoiding the cut points
    (leftmost on ties).  `cuts` must be sorted and inside [lo, hi]."""
    bounds = [lo] + cuts + [hi]
    best = (bounds[0], bounds[1])
    for a, b in zip(bounds, bounds[1:]):
        if b - a > best[1] - best[0]:
            best = (a, b)
    return best


def _shrink_to_axis(ball: BasicOpen, axis: int, lo: Q, hi: Q) -> BasicOpen:
    """Ball inside `ball` whose axis-th coordinate range is inside (lo, hi);
    the other coordinates keep their centers."""
    radius = min(ball.radius, (hi - lo) / 2)
    center = list(ball.center)
    center[axis] = (lo + hi) / 2
    if ball.kind == "torus":
        center[axis] %= 1
    return BasicOpen(ball.kind, tuple(center), radius)


def _avoid_cuts_on_axis(ball: BasicOpen, axis: int, cuts: list[Q]) -> BasicOpen:
    lo = ball.center[axis] - ball.radius
    hi = ball.center[axis] + ball.radius
    inner = sorted(c for c in cuts if lo < c < hi)
    if not inner:
        return ball
    a, b = _split_axis(lo, hi, inner)
    return _shrink_to_axis(ball, axis, a, b)


def progression_witness(space: Space, modulus: Q, offset: Q = Q(0)) -> EndWitness:
    """Witness for the arithmetic progression {offset + modulus*k} on the
    first coordinate (every other coordinate free)."""
    modulus = Q(modulus)
    offset = Q(offset)
    if modulus <= 0:
        raise ValueError("modulus must be positive")

    def refine(ball: BasicOpen) -> BasicOpen:
        lo = ball.center[0] - ball.radius
        hi = ball.center[0] + ball.radius
        first = offset + modulus * _ceil_q((lo - offset) / modulus)
        cuts = []
        point = first
        while point < hi:
            cuts.append(point)
            point += modulus
        return _avoid_cuts_on_axis(ball, 0, cuts)

    def contains(point: Point) -> bool:
        ratio = (point[0] - offset) / modulus
        return ratio.denominator == 1

    return EndWitness(
        space, refine, f"progression {nm.format_rational(offset)}+{nm.format_rational(modulus)}Z", contains
    )


def integer_lattice_witness(space: Space) -> EndWitness:
    """Witness for the integer lattice (contains the naturals)."""
    base = progression_witness(space, Q(1), Q(0))
    if space.dim == 1:
        contains = base.contains
    else:
        def contains(point: Point) -> bool:
            return all(c.denominator == 1 for c in point)
    return EndWitness(space, base.refine_ball, "integer lattice", contains)


def hyperplane_witness(space: Space, value: Q, axis: int = 0) -> EndWitness:
    """Witness for the slab {x : x_axis = value} (a point in dimension 1)."""
    value = Q(value)
    if space.kind == "torus":
        value %= 1

    def refine(ball: BasicOpen) -> BasicOpen:
        return _avoid_cuts_on_axis(ball, axis, [_nearest_rep(ball, axis, value)])

    def contains(point: Point) -> bool:
        if space.kind == "torus":
            return point[axis] % 1 == value
        return point[axis] == value

    return EndWitness(space, refine, f"coordinate-{axis} slab at {nm.format_rational(value)}", contains)


def singleton_witness(space: Space, point: Point) -> EndWitness:
    point = tuple(Q(c) % 1 if space.kind == "torus" else Q(c) for c in point)

    def refine(ball: BasicOpen) -> BasicOpen:
        if not ball.contains_point(point):
            return ball
        return _avoid_cuts_on_axis(ball, 0, [_nearest_rep(ball, 0, point[0])])

    def contains(candidate: Point) -> bool:
        return tuple(candidate) == point

    return EndWitness(space, refine, f"point {nm.format_point(point)}", contains)


def _nearest_rep(ball: BasicOpen, axis: int, value: Q) -> Q:
    """Representative of `value` nearest the ball's axis center (torus
    values live mod 1)."""
    if ball.kind != "torus":
        return value
    center = ball.center[axis]
    best = value % 1
    for shift in (-1, 0, 1):
        cand = value % 1 + shift
        if abs(cand - center) < abs(best - center):
            best = cand
    return best


def reciprocal_witness(space: Space) -> EndWitness:
    """Witness for {1/k : k >= 1} on the line; refinements also avoid the
    closure point 0 automatically, being open and disjoint from the set."""
    if space.kind != "euclidean" or space.dim != 1:
        raise ValueError("reciprocal witness is a line construction")

    def refine(ball: BasicOpen) -> BasicOpen:
        lo = ball.center[0] - ball.radius
        hi = ball.center[0] + ball.radius
        if hi <= 0 or lo >= 1:
            return ball
        if lo < 0:
            return _shrink_to_axis(ball, 0, lo, Q(0))
        # 0 <= lo < hi: the reciprocals in [lo, hi] are finitely many,
        # unless lo == 0 where we take the top gap below hi.
        if lo == 0:
            k = _floor_q(1 / hi) + 1  # smallest k with 1/k < hi
            return _shrink_to_axis(ball, 0, Q(1, k + 1), min(Q(1, k), hi))
        cuts = []
        k = max(1, _ceil_q(1 / hi))
        while Q(1, k) >= lo:
            if lo < Q(1, k) < hi:
                cuts.append(Q(1, k))
            k += 1
        return _avoid_cuts_on_axis(ball, 0, sorted(cuts))

    def contains(point: Point) -> bool:
        x = point[0]
        return x > 0 and x.numerator == 1

    return EndWitness(space, refine, "reciprocals 1/k", contains)


def _ceil_q(x: Q) -> int:
    return -((-x.numerator) // x.denominator)


def _floor_q(x: Q) -> int:
    return x.numerator // x.denominator


# ---------------------------------------------------------------------------
# Dense-set duality and witness composition
# ---------------------------------------------------------------------------


def end_from_dense_ce_open(
    a: CeOpenSet, complement_contains: Optional[Callable[[Point], bool]] = None
) -> EndWitness:
    """Witness that the complement of a dense c.e. open set is effectively
    nowhere dense.  Requires the set to carry density evidence."""
    if a.density_evidence is None:
        raise ValueError(f"{a.tag}: density claim has no evidence procedure")

    def refine(ball: BasicOpen) -> BasicOpen:
        emitted = a.density_evidence(ball)
        return next(intersect_enumerate(ball, emitted))

    return EndWitness(a.space, refine, f"complement of {a.tag}", complement_contains)


def dense_open_from_end(w: EndWitness) -> CeOpenSet:
    """The dense c.e. open set inside the complement of the witnessed set:
    the refinements of every basic open, in canonical name order."""

    def factory():
        for ball in nm.iter_balls(w.space):
            yield w.refine_ball(ball)

    return CeOpenSet(
        w.space,
        factory,
        tag=f"dense open avoiding {w.set_tag}",
        density_evidence=lambda ball: w.refine_ball(ball),
    )


def end_intersection(witnesses: Sequence[EndWitness]) -> EndWitness:
    """Sequential composition; the output avoids the union (a fortiori the
    intersection) of the witnessed sets."""
    if not witnesses:
        raise ValueError("need at least one witness")

    def refine(ball: BasicOpen) -> BasicOpen:
        for w in witnesses:
            ball = w.refine_ball(ball)
        return ball

    oracles = [w.contains for w in witnesses]
    contains = None
    if all(oracle is not None for oracle in oracles):
        def contains(point: Point) -> bool:
            return all(oracle(point) for oracle in oracles)

    tag = " ∩ ".join(w.set_tag for w in witnesses)
    return EndWitness(witnesses[0].space, refine, tag, contains)


def end_closure(
    w: EndWitness, closure_contains: Optional[Callable[[Point], bool]] = None
) -> EndWitness:
    """The same refinement map, re-tagged for the closure of the set."""
    return EndWitness(
        w.space, w.refine_ball, f"closure of {w.set_tag}", closure_contains or w.contains
    )


@dataclass(frozen=True)
class MeagerPresentation:
    """A set of effective first category: layer(n) is the witness for the
    n-th nowhere dense layer, n >= 1."""

    space: Space
    layer_fn: Callable[[int], EndWitness]
    tag: str

    def layer(self, n: int) -> EndWitness:
        if n < 1:
            raise ValueError("layers are 1-indexed")
        return self.layer_fn(n)

    @staticmethod
    def from_witnesses(
        space: Space, witnesses: Sequence[EndWitness], tag: str
    ) -> "MeagerPresentation":
        fixed = tuple(witnesses)
        pad = empty_set_witness(space)

        def layer_fn(n: int) -> EndWitness:
            return fixed[n - 1] if n <= len(fixed) else pad

        return MeagerPresentation(space, layer_fn, tag)


def meager_union(presentations: Sequence[MeagerPresentation]) -> MeagerPresentation:
    """Diagonal interleave: layer index n walks the pairing diagonal across
    the presentations' layers."""
    fixed = tuple(presentations)
    if not fixed:
        raise ValueError("need at least one presentation")

    pairs: list[tuple[int, int]] = []
    source = _diagonal_pairs(len(fixed))

    def layer_fn(n: int) -> EndWitness:
        while len(pairs) < n:
            pairs.append(next(source))
        i, j = pairs[n - 1]
        return fixed[i].layer(j)

    tag = " ∪ ".join(p.tag for p in fixed)
    return MeagerPresentation(fixed[0].space, layer_fn, tag)


def _diagonal_pairs(width: int) -> Iterator[tuple[int, int]]:
    """(presentation index, layer index) pairs along the pairing diagonal."""
    for d in itertools.count(2):
        for i in range(min(width, d - 1)):
            yield (i, d - 1 - i)


def rational_singletons_presentation(
    space: Space, lo: Q, hi: Q, tag: Optional[str] = None
) -> MeagerPresentation:
    """The rationals of the open interval (lo, hi) as canonical singleton
    layers (first-coordinate singletons in dimension > 1)."""
    lo, hi = Q(lo), Q(hi)
    found: list[Q] = []
    source = nm.iter_rationals(lambda value: lo < value < hi)

    def layer_fn(n: int) -> EndWitness:
        while len(found) < n:
            found.append(next(source))
        value = found[n - 1]
        if space.dim == 1:
            return singleton_witness(space, (value,))
        return hyperplane_witness(space, value)

    return MeagerPresentation(
        space,
        layer_fn,
        tag or f"rationals in ({nm.format_rational(lo)},{nm.format_rational(hi)})",
    )


def nth_rational_in(lo: Q, hi: Q, n: int) -> Q:
    """The n-th rational of (lo, hi) in canonical order, n >= 1."""
    return next(itertools.islice(nm.iter_rationals(lambda v: lo < v < hi), n - 1, None))


# ---------------------------------------------------------------------------
# Presentation files: one layer constructor per line
# ---------------------------------------------------------------------------

PRESENTATION_HEADER = "meager-presentation v1"


def parse_presentation_file(space: Space, text: str) -> MeagerPresentation:
    """Line grammar: `empty` | `integers` | `reciprocals` |
    `singleton <c1> ... <cn>` | `progression <modulus> <offset>` |
    `rational-singletons <lo> <hi>`.  Lines starting with '#' are comments.
    The file denotes the union of the per-line presentations."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != PRESENTATION_HEADER:
        raise ValueError(f"expected header {PRESENTATION_HEADER!r}")
    parts: list[MeagerPresentation] = []
    for ln in lines[1:]:
        tokens = ln.split()
        kind, args = tokens[0], tokens[1:]
        if kind == "empty":
            witness = empty_set_witness(space)
        elif kind == "integers":
            witness = integer_lattice_witness(space)
        elif kind == "reciprocals":
            witness = reciprocal_witness(space)
        elif kind == "singleton":
            point = tuple(nm.parse_rational(a) for a in args)
            if len(point) != space.dim:
                raise ValueError(f"singleton arity {len(point)} != dim {space.dim}")
            witness = singleton_witness(space, point)
        elif kind == "progression":
            witness = progression_witness(
                space, nm.parse_rational(args[0]), nm.parse_rational(args[1])
            )
        elif kind == "rational-singletons":
            parts.append(
                rational_singletons_presentation(
                    space, nm.parse_rational(args[0]), nm.parse_rational(args[1])
                )
            )
            continue
        else:
            raise ValueError(f"unknown layer constructor {kind!r}")
        parts.append(MeagerPresentation.from_witnesses(space, [witness], witness.set_tag))
    if not parts:
        raise ValueError("presentation file has no layers")
    return parts[0] if len(parts) == 1 else meager_union(parts)
