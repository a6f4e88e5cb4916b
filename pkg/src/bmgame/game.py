"""The effective Banach-Mazur game engine.

Sessions hold an alternating play of basic opens, each nested in the one
before and validated exactly.  Machine strategies are deterministic maps
from the move history to the next basic open plus a machine-checkable
annotation (the avoided layer, a Diophantine witness, a return time).

The winning condition of the real game quantifies over an infinite play, so
no finite run can adjudicate it; what the engine certifies instead is the
per-round evidence: nesting, avoidance of the scheduled nowhere dense
layer, diameter shrinkage.  The converse-direction machinery (chains, the
greedy maximal disjoint families H_n, and the extraction of a meager
presentation from a strategy) is fuel-bounded and monotone in fuel.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence, Union

from . import names as nm
from .effective import (
    CeOpenSet,
    DensitySearchDiverged,
    EndWitness,
    MeagerPresentation,
    end_closure,
    end_from_dense_ce_open,
)
from .topology import (
    BasicOpen,
    Space,
    covered_by_union,
    diameter,
    disjoint,
    region_contains,
    subset,
)

Q = Fraction


class GameError(ValueError):
    """Base for move validation failures; .code is the stable wire code."""

    code = "GameError"


class NotNested(GameError):
    code = "NotNested"


class OutsideRegion(GameError):
    code = "OutsideRegion"


class WrongTurn(GameError):
    code = "WrongTurn"


class SessionFinished(GameError):
    code = "SessionFinished"


class PrecisionUnreached(RuntimeError):
    """No move is small enough for the requested approximation yet."""


@dataclass(frozen=True)
class Move:
    round: int
    player: str  # "P1" | "P2"
    ball: BasicOpen
    note: dict[str, str] = field(default_factory=dict)


class GameSession:
    """Alternating nested play inside a space's region.

    P1 moves first; a session is finished after `rounds_limit` full rounds.
    All mutation goes through submit(), which validates exactly.
    """

    def __init__(self, space: Space, rounds_limit: int):
        if rounds_limit < 1:
            raise ValueError("rounds_limit must be >= 1")
        self.space = space
        self.rounds_limit = rounds_limit
        self.moves: list[Move] = []

    @property
    def status(self) -> str:
        return "finished" if len(self.moves) >= 2 * self.rounds_limit else "open"

    @property
    def whose_turn(self) -> str:
        return "P1" if len(self.moves) % 2 == 0 else "P2"

    @property
    def current_round(self) -> int:
        return len(self.moves) // 2 + 1

    def history(self) -> list[BasicOpen]:
        return [m.ball for m in self.moves]

    def validate(self, ball: BasicOpen) -> None:
        if self.status == "finished":
            raise SessionFinished(f"round limit {self.rounds_limit} reached")
        if self.moves:
            if not subset(ball, self.moves[-1].ball):
                raise NotNested("move must be contained in the previous move")
        elif not region_contains(self.space, ball):
            raise OutsideRegion("first move must lie inside the region")

    def submit(self, player: str, ball: BasicOpen, note: Optional[dict] = None) -> Move:
        if self.status == "finished":
            raise SessionFinished(f"round limit {self.rounds_limit} reached")
        if player != self.whose_turn:
            raise WrongTurn(f"it is {self.whose_turn}'s turn")
        self.validate(ball)
        move = Move(self.current_round, player, ball, _clean_note(note or {}))
        self.moves.append(move)
        return move


def _clean_note(note: dict) -> dict[str, str]:
    out = {}
    for key, value in note.items():
        key, value = str(key), str(value)
        if any(ch in key or ch in value for ch in ", \n"):
            raise ValueError(f"annotation token may not contain commas/spaces: {key}={value}")
        out[key] = value
    return out


def validate_move(session: GameSession, ball: BasicOpen) -> None:
    """Module-level validation entry point (ok or raise)."""
    session.validate(ball)


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------

Responder = Callable[[Sequence[BasicOpen]], tuple[BasicOpen, dict]]


@dataclass(frozen=True)
class Strategy:
    role: str  # "P1" | "P2"
    descriptor: str
    responder: Responder

    def respond(self, history: Sequence[BasicOpen]) -> tuple[BasicOpen, dict]:
        return self.responder(list(history))


def p2_meager_strategy(pres: MeagerPresentation) -> Strategy:
    """The forward direction of the characterization: at round k respond
    with the layer-k witness refinement of P1's move, which is a basic open
    inside it and disjoint from the closure of the k-th layer."""
    closed_layers: dict[int, EndWitness] = {}

    def respond(history):
        k = (len(history) + 1) // 2
        witness = closed_layers.get(k)
        if witness is None:
            witness = end_closure(pres.layer(k))
            closed_layers[k] = witness
        ball = witness.refine_ball(history[-1])
        return ball, {"layer": str(k), "avoids": witness.set_tag.replace(" ", "_")}

    return Strategy("P2", f"meager:{pres.tag.replace(' ', '_')}", respond)


def p1_point_meager_strategy(nbhd: BasicOpen, local: MeagerPresentation) -> Strategy:
    """P1's strategy when the opponent's target is meager at a point: start
    at the neighbourhood, then shrink below both the scheduled layer and the
    1/k diameter bound so the play converges to a single point."""
    closed_layers: dict[int, EndWitness] = {}

    def respond(history):
        if not history:
            return nbhd, {"kind": "nbhd"}
        k = len(history) // 2 + 1
        witness = closed_layers.get(k)
        if witness is None:
            witness = end_closure(local.layer(k))
            closed_layers[k] = witness
        base = witness.refine_ball(history[-1])
        radius = min(base.radius / 2, Q(1, 4 * k))
        ball = BasicOpen(base.kind, base.center, radius)
        return ball, {"layer": str(k), "avoids": witness.set_tag.replace(" ", "_")}

    return Strategy("P1", f"point-meager:{local.tag.replace(' ', '_')}", respond)


def halving_refinement(role: str, first: Optional[BasicOpen] = None) -> Strategy:
    """Deterministic demo player: keep the center, halve the radius (P1's
    opening move is `first`, or the region's primary ball)."""

    def respond(history):
        if not history:
            if first is None:
                raise ValueError("halving P1 needs an opening ball")
            return first, {}
        prev = history[-1]
        return BasicOpen(prev.kind, prev.center, prev.radius / 2), {}

    return Strategy(role, "halving-refinement", respond)


def copycat(role: str) -> Strategy:
    """Plays the previous move unchanged (always valid; nesting is lax)."""

    def respond(history):
        return history[-1], {}

    return Strategy(role, "copycat", respond)


def limit_point(session: GameSession, eps: Q) -> tuple[Q, ...]:
    """Center of the first move with diameter < eps: within eps of the
    single point of the intersection, since all later moves nest inside."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    for move in session.moves:
        if diameter(move.ball) < eps:
            return move.ball.center
    raise PrecisionUnreached(f"no move has diameter below {eps}")


# ---------------------------------------------------------------------------
# Chains and the greedy maximal families H_n
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Chain:
    n: int
    sets: tuple[BasicOpen, ...]

    @property
    def top(self) -> BasicOpen:
        return self.sets[-1]


_REGION_OPTIONS_LIMIT = 20000


def region_options(space: Space, count: int) -> list[BasicOpen]:
    """The first `count` canonical basic opens inside the play region."""
    if space.region is not None and len(space.region) == 1:
        return nm.first_nested(space, space.region[0], count)
    out = []
    for _, ball in itertools.islice(nm.iter_names(space), _REGION_OPTIONS_LIMIT):
        if space.region is None or covered_by_union(ball, space.region):
            out.append(ball)
            if len(out) == count:
                return out
    raise nm.SearchBudgetExceeded("region option scan exhausted")


def _index_vectors(n: int, breadth: Optional[int]) -> Iterator[tuple[int, ...]]:
    """P1 option-index vectors in canonical order: lexicographic when
    breadth-capped, else dovetailed by growing max index (the full c.e.
    enumeration)."""
    if breadth is not None:
        yield from itertools.product(range(breadth), repeat=n)
        return
    for budget in itertools.count(1):
        for vec in itertools.product(range(budget), repeat=n):
            if max(vec) == budget - 1:
                yield vec


def enumerate_chains(
    space: Space, strategy: Strategy, n: int, breadth: Optional[int] = None
) -> Iterator[Chain]:
    """All 2n-long nested plays consistent with the P2 strategy, P1 ranging
    over the first `breadth` canonical options at each position (all of
    them, dovetailed, when breadth is None)."""
    if strategy.role != "P2":
        raise ValueError("chain enumeration needs a P2 strategy")
    if n < 1:
        raise ValueError("chains have at least one round")
    for vec in _index_vectors(n, breadth):
        yield _chain_for_vector(space, strategy, vec)


def _chain_for_vector(space: Space, strategy: Strategy, vec: tuple[int, ...]) -> Chain:
    sets: list[BasicOpen] = []
    for idx in vec:
        if sets:
            options = nm.first_nested(space, sets[-1], idx + 1)
        else:
            options = region_options(space, idx + 1)
        sets.append(options[idx])
        reply, _ = strategy.respond(sets)
        sets.append(reply)
    return Chain(len(vec), tuple(sets))


def build_Hn(
    space: Space,
    strategy: Strategy,
    n: int,
    fuel: int,
    breadth: Optional[int] = None,
) -> list[BasicOpen]:
    """Greedy maximal pairwise-disjoint family of chain tops.

    Consumes at most `fuel` chains; the result is a prefix-stable function
    of fuel (members are only ever appended)."""
    members: list[BasicOpen] = []
    for chain in itertools.islice(enumerate_chains(space, strategy, n, breadth), fuel):
        top = chain.top
        if all(disjoint(top, m) for m in members):
            members.append(top)
    return members


def _probe_chain_top(space: Space, strategy: Strategy, n: int, probe: BasicOpen) -> BasicOpen:
    """Top of the chain in which P1 opens with the probe itself and then
    repeats P2's responses.  Every ball is a canonical option at some index,
    so this chain occurs in the full enumeration — which is all the greedy
    maximality argument needs."""
    sets: list[BasicOpen] = []
    for _ in range(n):
        sets.append(probe if not sets else sets[-1])
        reply, _ = strategy.respond(sets)
        sets.append(reply)
    return sets[-1]


@dataclass(frozen=True)
class ProbeResult:
    ball: BasicOpen
    via: str  # "member" | "chain-top"


def density_probe(
    space: Space,
    strategy: Strategy,
    n: int,
    probe: BasicOpen,
    fuel: int,
    breadth: Optional[int] = None,
) -> Optional[ProbeResult]:
    """Evidence that the union of the maximal family H_n meets the probe.

    Either an already-built member intersects the probe, or the probe's own
    chain top T (a subset of the probe) is reported: by greedy maximality T
    is in the family or overlaps some family member, so the union meets the
    probe either way.  None means the search budget ran out (never a
    refutation)."""
    if space.region is not None and not region_contains(space, probe):
        raise OutsideRegion("probe must lie inside the region")
    try:
        # Scanning built members first is a fast path for reporting; the
        # chain-top route below carries the actual density argument.
        for member in build_Hn(space, strategy, n, min(fuel, 64), breadth):
            if not disjoint(member, probe):
                return ProbeResult(member, "member")
        top = _probe_chain_top(space, strategy, n, probe)
        return ProbeResult(top, "chain-top")
    except nm.SearchBudgetExceeded:
        return None


def hn_union_ce(
    space: Space,
    strategy: Strategy,
    n: int,
    evidence_budget: int = 10**4,
) -> CeOpenSet:
    """The union of H_n as a c.e. open set over the full chain enumeration.

    Rejected chains surface as skip tokens.  The density evidence resolves a
    probe exactly: it walks the greedy construction up to the probe chain's
    own enumeration index, at which point the probe's top either joined the
    family or overlaps a definite member."""

    def factory():
        members: list[BasicOpen] = []
        for chain in enumerate_chains(space, strategy, n, breadth=None):
            top = chain.top
            if all(disjoint(top, m) for m in members):
                members.append(top)
                yield top
            else:
                yield None

    def evidence(probe: BasicOpen) -> BasicOpen:
        try:
            start_index = nm.canonical_index_in_region(
                space, probe, limit=evidence_budget
            )
        except nm.SearchBudgetExceeded as exc:
            raise DensitySearchDiverged(str(exc)) from exc
        if start_index**n > evidence_budget:
            raise DensitySearchDiverged(
                f"probe chain index {start_index}^{n} exceeds budget {evidence_budget}"
            )
        target = (start_index - 1,) + (0,) * (n - 1)
        members: list[BasicOpen] = []
        try:
            for vec in _index_vectors(n, breadth=None):
                chain = _chain_for_vector(space, strategy, vec)
                top = chain.top
                blocker = next((m for m in members if not disjoint(top, m)), None)
                if blocker is None:
                    members.append(top)
                if vec == target:
                    return top if blocker is None else blocker
        except nm.SearchBudgetExceeded as exc:
            raise DensitySearchDiverged(str(exc)) from exc
        raise AssertionError("unreachable: target vector is enumerated")

    return CeOpenSet(
        space,
        factory,
        tag=f"union H_{n} of {strategy.descriptor}",
        density_evidence=evidence,
    )


def extract_meager_presentation(
    space: Space,
    strategy: Strategy,
    fuel_schedule: Callable[[int], int] = lambda n: 10**4,
) -> MeagerPresentation:
    """From a (claimed) winning P2 strategy, the layered presentation whose
    n-th layer is the complement of the dense open union of H_n."""
    cache: dict[int, EndWitness] = {}

    def layer_fn(n: int) -> EndWitness:
        witness = cache.get(n)
        if witness is None:
            witness = end_from_dense_ce_open(
                hn_union_ce(space, strategy, n, evidence_budget=fuel_schedule(n))
            )
            cache[n] = witness
        return witness

    return MeagerPresentation(
        space, layer_fn, tag=f"extracted from {strategy.descriptor}"
    )


# ---------------------------------------------------------------------------
# Referee loop and transcripts
# ---------------------------------------------------------------------------

ExternalPlayer = Callable[[Sequence[BasicOpen]], BasicOpen]
Player = Union[Strategy, ExternalPlayer]


@dataclass(frozen=True)
class Transcript:
    space: Space
    rounds: int
    p1: str
    p2: str
    moves: tuple[Move, ...]
    stopped: Optional[tuple[int, str, str]] = None  # (round, player, code)

    def serialize(self) -> str:
        lines = [
            TRANSCRIPT_HEADER,
            f"space={self.space.kind}",
            f"dim={self.space.dim}",
            f"region={_region_text(self.space)}",
            f"p1={self.p1}",
            f"p2={self.p2}",
            f"rounds={self.rounds}",
            "moves:",
        ]
        for move in self.moves:
            centers = " ".join(nm.format_rational(c) for c in move.ball.center)
            note = " ".join(f"{k}={move.note[k]}" for k in sorted(move.note))
            lines.append(
                f"{move.round},{move.player},{centers},{nm.format_rational(move.ball.radius)},{note}"
            )
        if self.stopped is not None:
            rnd, player, code = self.stopped
            lines.append(f"# stopped round={rnd} player={player} code={code}")
        return "\n".join(lines) + "\n"


TRANSCRIPT_HEADER = "banach-mazur-transcript v1"


def _region_text(space: Space) -> str:
    if space.region is None:
        return "all"
    return ";".join(
        " ".join(nm.format_rational(c) for c in ball.center)
        + " "
        + nm.format_rational(ball.radius)
        for ball in space.region
    )


def _parse_region(kind: str, dim: int, text: str) -> Optional[tuple[BasicOpen, ...]]:
    if text == "all":
        return None
    balls = []
    for part in text.split(";"):
        values = [nm.parse_rational(tok) for tok in part.split()]
        if len(values) != dim + 1:
            raise ValueError(f"region member arity {len(values)} != dim+1")
        balls.append(BasicOpen(kind, tuple(values[:-1]), values[-1]))
    return tuple(balls)


def parse_transcript(text: str) -> Transcript:
    lines = text.splitlines()
    if not lines or lines[0] != TRANSCRIPT_HEADER:
        raise ValueError(f"expected header {TRANSCRIPT_HEADER!r}")
    header: dict[str, str] = {}
    idx = 1
    while idx < len(lines) and lines[idx] != "moves:":
        key, _, value = lines[idx].partition("=")
        if not _:
            raise ValueError(f"bad header line {lines[idx]!r}")
        header[key] = value
        idx += 1
    if idx == len(lines):
        raise ValueError("missing moves: section")
    required = {"space", "dim", "region", "p1", "p2", "rounds"}
    missing = required - set(header)
    if missing:
        raise ValueError(f"missing header keys {sorted(missing)}")
    kind = header["space"]
    dim = int(header["dim"])
    space = Space(kind, dim, _parse_region(kind, dim, header["region"]))
    moves = []
    stopped = None
    for line in lines[idx + 1 :]:
        if not line:
            continue
        if line.startswith("#"):
            stopped = _parse_stopped(line)
            continue
        fields = line.split(",")
        if len(fields) != 5:
            raise ValueError(f"bad move line {line!r}")
        rnd, player, centers, radius, note_text = fields
        ball = BasicOpen(
            kind,
            tuple(nm.parse_rational(tok) for tok in centers.split()),
            nm.parse_rational(radius),
        )
        note = {}
        for token in note_text.split():
            k, _, v = token.partition("=")
            note[k] = v
        moves.append(Move(int(rnd), player, ball, note))
    return Transcript(
        space, int(header["rounds"]), header["p1"], header["p2"], tuple(moves), stopped
    )


def _parse_stopped(line: str) -> Optional[tuple[int, str, str]]:
    tokens = dict(
        tok.split("=", 1) for tok in line.lstrip("# ").split()[1:] if "=" in tok
    )
    if {"round", "player", "code"} <= set(tokens):
        return (int(tokens["round"]), tokens["player"], tokens["code"])
    return None


def replay_transcript(transcript: Transcript) -> GameSession:
    """Re-validate every move; raises GameError naming the first bad round."""
    session = GameSession(transcript.space, transcript.rounds)
    for move in transcript.moves:
        if move.round != session.current_round:
            raise GameError(f"round numbering broken at round {move.round}")
        try:
            session.submit(move.player, move.ball, move.note)
        except GameError as exc:
            raise type(exc)(f"round {move.round} {move.player}: {exc}") from exc
    return session


def run(
    session: GameSession,
    p1: Player,
    p2: Player,
    rounds: Optional[int] = None,
) -> Transcript:
    """Referee loop: play full rounds (machine strategies trusted but
    validated — a machine's invalid move is a bug and raises), stopping
    early when an external player submits an invalid move."""
    rounds = session.rounds_limit if rounds is None else rounds
    stopped = None
    for _ in range(2 * rounds - len(session.moves)):
        player = session.whose_turn
        mover = p1 if player == "P1" else p2
        if session.status == "finished":
            break
        history = session.history()
        if isinstance(mover, Strategy):
            ball, note = mover.respond(history)
            session.submit(player, ball, note)
        else:
            try:
                ball = mover(history)
                session.submit(player, ball, {})
            except GameError as exc:
                stopped = (session.current_round, player, exc.code)
                break
    return Transcript(
        session.space,
        session.rounds_limit,
        _descriptor(p1),
        _descriptor(p2),
        tuple(session.moves),
        stopped,
    )


def _descriptor(player: Player) -> str:
    if isinstance(player, Strategy):
        return player.descriptor
    return getattr(player, "descriptor", "external")
