"""Computable dynamical systems and the effective recurrence strategy.

The systems here map basic opens to basic opens bijectively (the strict
computable-homeomorphism requirement): rational rotations and reflections
of the torus, and rational translations of Euclidean space — the latter
being the stock wandering counterexample.

The recurrence strategy realizes the category Poincare argument: at round n
it must avoid F_n(E), the points of E that never come back to E after time
n.  Any ball V inside E with forward^j(V) ⊆ E for some j > n avoids F_n(E)
outright, as does any ball disjoint from the closure of E.  The strategy
searches the return times j = n+1, n+2, ... (recording the j it used) and
falls back to the outside-of-closure(E) part of the current move; if
neither exists within fuel it raises — for a wandering open set it must,
since no return time exists at all.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from . import names as nm
from .effective import CeOpenSet
from .game import Strategy
from .topology import (
    EUCLIDEAN,
    TORUS,
    BasicOpen,
    Space,
    difference_pieces,
    disjoint,
    first_cover_ball,
    intersect_enumerate,
)

Q = Fraction


class AvoidanceSearchExhausted(RuntimeError):
    """No avoidance ball found: the no-wandering hypothesis is violated or
    the fuel was too small.  Never silently swallowed."""

    def __init__(self, round_: int, fuel: int):
        super().__init__(
            f"round {round_}: no return ball within {fuel} candidate times"
        )
        self.round = round_
        self.fuel = fuel


@dataclass(frozen=True)
class ComputableHomeomorphism:
    """A bijection of the space mapping basic opens to basic opens, with a
    computable inverse of the same shape."""

    space: Space
    forward_ball: Callable[[BasicOpen], BasicOpen]
    backward_ball: Callable[[BasicOpen], BasicOpen]
    descriptor: str

    def forward_k(self, ball: BasicOpen, k: int) -> BasicOpen:
        for _ in range(k):
            ball = self.forward_ball(ball)
        return ball

    def backward_k(self, ball: BasicOpen, k: int) -> BasicOpen:
        for _ in range(k):
            ball = self.backward_ball(ball)
        return ball


def rotation_system(space: Space, rho) -> ComputableHomeomorphism:
    """Rigid rotation of the torus by the rational vector rho."""
    if space.kind != TORUS:
        raise ValueError("rotation systems live on the torus")
    rho = _as_vector(rho, space.dim)

    def forward(ball: BasicOpen) -> BasicOpen:
        center = tuple((c + r) % 1 for c, r in zip(ball.center, rho))
        return BasicOpen(TORUS, center, ball.radius)

    def backward(ball: BasicOpen) -> BasicOpen:
        center = tuple((c - r) % 1 for c, r in zip(ball.center, rho))
        return BasicOpen(TORUS, center, ball.radius)

    rho_text = ",".join(nm.format_rational(r) for r in rho)
    return ComputableHomeomorphism(space, forward, backward, f"rotation {rho_text}")


def reflection_system(space: Space) -> ComputableHomeomorphism:
    """The involution x -> -x (mod 1) of the torus."""
    if space.kind != TORUS:
        raise ValueError("reflection systems live on the torus")

    def flip(ball: BasicOpen) -> BasicOpen:
        center = tuple((-c) % 1 for c in ball.center)
        return BasicOpen(TORUS, center, ball.radius)

    return ComputableHomeomorphism(space, flip, flip, "reflection")


def translation_system(space: Space, delta) -> ComputableHomeomorphism:
    """Translation of Euclidean space: every non-trivial instance wanders,
    violating the recurrence hypothesis on purpose."""
    if space.kind != EUCLIDEAN:
        raise ValueError("translation systems live on Euclidean space")
    delta = _as_vector(delta, space.dim)

    def forward(ball: BasicOpen) -> BasicOpen:
        center = tuple(c + d for c, d in zip(ball.center, delta))
        return BasicOpen(EUCLIDEAN, center, ball.radius)

    def backward(ball: BasicOpen) -> BasicOpen:
        center = tuple(c - d for c, d in zip(ball.center, delta))
        return BasicOpen(EUCLIDEAN, center, ball.radius)

    delta_text = ",".join(nm.format_rational(d) for d in delta)
    return ComputableHomeomorphism(space, forward, backward, f"translation {delta_text}")


def _as_vector(value, dim: int) -> tuple[Q, ...]:
    if isinstance(value, (int, Q)):
        value = (value,)
    vec = tuple(Q(v) for v in value)
    if len(vec) != dim:
        raise ValueError(f"vector arity {len(vec)} != dim {dim}")
    return vec


def preimage_ce(T: ComputableHomeomorphism, u: CeOpenSet, k: int) -> CeOpenSet:
    """T^-k(U): the backward map applied k times to every emission."""
    if k < 0:
        raise ValueError("k must be >= 0")

    def factory():
        for token in u.tokens():
            yield token if token is None else T.backward_k(token, k)

    finite = None
    if u.finite_balls is not None:
        finite = tuple(T.backward_k(ball, k) for ball in u.finite_balls)
    return CeOpenSet(
        u.space, factory, f"T^-{k}({u.tag})", finite_balls=finite
    )


def _emitted_balls(e: CeOpenSet, fuel: int) -> list[BasicOpen]:
    if e.finite_balls is not None:
        return list(e.finite_balls)
    return e.balls(fuel)


def wandering_probe(
    T: ComputableHomeomorphism, e: CeOpenSet, horizon: int, fuel: int = 256
) -> Optional[int]:
    """Search j <= horizon with T^-j(E) meeting E.  The returned j refutes
    wandering; None is inconclusive (wandering is only co-semi-decidable)."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    balls = _emitted_balls(e, fuel)
    budget = fuel
    for j in range(1, horizon + 1):
        shifted = [T.backward_k(ball, j) for ball in balls]
        for a in balls:
            for b in shifted:
                if budget <= 0:
                    return None
                budget -= 1
                if not disjoint(a, b):
                    return j
    return None


def fn_avoidance(T: ComputableHomeomorphism, e: CeOpenSet, n: int) -> CeOpenSet:
    """H = E ∩ T^-(n+1)(E): every point of H returns to E at time n+1, so H
    is disjoint from F_n(E).  May be empty — the strategy below searches
    later return times instead of insisting on n+1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    pre = preimage_ce(T, e, n + 1)
    tag = f"E ∩ T^-{n + 1}(E)"

    if e.finite_balls is not None and pre.finite_balls is not None:
        pieces = []
        for a in e.finite_balls:
            for b in pre.finite_balls:
                pieces.extend(itertools.islice(intersect_enumerate(a, b), 8))
        return CeOpenSet.from_balls(e.space, pieces, tag)

    def factory():
        # Dovetail over growing prefixes of both emission streams.
        for depth in itertools.count(1):
            left = [b for b in e.balls(depth)]
            right = [b for b in pre.balls(depth)]
            if not left or not right:
                yield None
                continue
            a, b = left[-1], right[-1]
            for row in left:
                yield next(intersect_enumerate(row, b), None)
            for col in right[:-1]:
                yield next(intersect_enumerate(a, col), None)

    return CeOpenSet(e.space, factory, tag)


def recurrence_p2_strategy(
    T: ComputableHomeomorphism, e: CeOpenSet, return_search_fuel: int = 64
) -> Strategy:
    """P2 for BM<non-recurrent points of E, rest>: respond inside the
    current move with a ball that provably avoids F_n(E).

    Preferred: a ball V ⊆ G ∩ E with forward^j(V) ⊆ E for the first usable
    return time j > n (annotated kind=return, j=<j>).  Fallback: a ball in
    G minus closure(E) (annotated kind=outside).  Raises
    AvoidanceSearchExhausted when neither exists within fuel — for a
    wandering E that is the correct outcome, not a crash."""
    if e.finite_balls is None:
        raise ValueError("recurrence strategy needs E as a finite union of balls")
    arcs = e.finite_balls

    def respond(history):
        g = history[-1]
        n = (len(history) + 1) // 2
        # G ∩ E pieces, in emission order.
        g_in_e = []
        for arc in arcs:
            g_in_e.extend(itertools.islice(intersect_enumerate(g, arc), 4))
        if g_in_e:
            shifted = [T.backward_k(arc, n + 1) for arc in arcs]
            for j in range(n + 1, n + 1 + return_search_fuel):
                for piece in g_in_e:
                    for target in shifted:
                        hit = next(intersect_enumerate(piece, target), None)
                        if hit is not None:
                            return hit, {"kind": "return", "j": str(j)}
                shifted = [T.backward_ball(ball) for ball in shifted]
        outside = difference_pieces(g, arcs)
        if outside:
            ball = first_cover_ball(g.kind, outside[0])
            return ball, {"kind": "outside"}
        raise AvoidanceSearchExhausted(n, return_search_fuel)

    return Strategy("P2", f"recurrence:{T.descriptor.replace(' ', '_')}", respond)


# ---------------------------------------------------------------------------
# Descriptor files
# ---------------------------------------------------------------------------


def parse_system_file(text: str) -> tuple[Space, ComputableHomeomorphism]:
    """Key-value lines: `kind=rotation dim=1 rho=1/3`, optionally
    `region=<c1> .. <cn> <r>[;...]` for Euclidean systems."""
    tokens: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        for item in line.split():
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"bad system token {item!r}")
            tokens[key] = value
    kind = tokens.get("kind")
    if kind is None:
        raise ValueError("system file needs kind=")
    dim = int(tokens.get("dim", "1"))
    if kind == "rotation":
        space = Space(TORUS, dim)
        rho = tuple(nm.parse_rational(v) for v in tokens["rho"].split(","))
        return space, rotation_system(space, rho)
    if kind == "reflection":
        space = Space(TORUS, dim)
        return space, reflection_system(space)
    if kind == "translation":
        region = None
        if "region" in tokens:
            values = [nm.parse_rational(v) for v in tokens["region"].split(",")]
            region = (BasicOpen(EUCLIDEAN, tuple(values[:-1]), values[-1]),)
        space = Space(EUCLIDEAN, dim, region)
        delta = tuple(nm.parse_rational(v) for v in tokens["delta"].split(","))
        return space, translation_system(space, delta)
    raise ValueError(f"unknown system kind {kind!r}")


def parse_open_set_file(space: Space, text: str) -> CeOpenSet:
    """One ball per line: `<c1> ... <cn> <radius>`; '#' comments."""
    balls = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        values = [nm.parse_rational(tok) for tok in line.split()]
        if len(values) != space.dim + 1:
            raise ValueError(f"open-set line arity {len(values)} != dim+1")
        balls.append(BasicOpen(space.kind, tuple(values[:-1]), values[-1]))
    if not balls:
        raise ValueError("open-set file lists no balls")
    return CeOpenSet.from_balls(space, balls, "E")
