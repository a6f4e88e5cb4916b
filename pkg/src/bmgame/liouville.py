"""Liouville machinery: dense approximation layers, the P2 strategy with
recorded Diophantine witnesses, and the exact certificate checker.

Layer n is the union of the intervals (p/q - q^-n, p/q + q^-n) over q >= 2;
it is dense because it contains every rational.  The strategy responds at
round k with a ball around the minimal-denominator rational of the current
interval, small enough to sit inside both the interval and the (p, q, k)
approximation window, so every point of the final interval is q^-j-close to
p_j/q_j for every played round j.  A certificate records (j, p, q, ball)
per round; checking it is pure rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import names as nm
from .effective import CeOpenSet
from .game import Strategy, Transcript
from .topology import EUCLIDEAN, BasicOpen, Space, subset

Q = Fraction


def _floor(x: Q) -> int:
    return x.numerator // x.denominator


def stern_brocot_in(lo: Q, hi: Q) -> Q:
    """The minimal-denominator rational in the open interval (lo, hi),
    found by the Stern-Brocot mediant walk (leftmost integer on the q = 1
    tie).  Always terminates for lo < hi."""
    lo, hi = Q(lo), Q(hi)
    if lo >= hi:
        raise ValueError("empty interval")
    first_int = _floor(lo) + 1
    if first_int < hi:
        return Q(first_int)
    shift = _floor(lo)
    lo -= shift
    hi -= shift
    a, b = 0, 1  # lo bound a/b
    c, d = 1, 1  # hi bound c/d
    while True:
        p, q = a + c, b + d
        med = Q(p, q)
        if med <= lo:
            a, b = p, q
        elif med >= hi:
            c, d = p, q
        else:
            return med + shift


def min_denominator_witness(lo: Q, hi: Q) -> tuple[int, int]:
    """(p, q) with q >= 2 minimal such that p/q lies in (lo, hi).  When the
    interval contains an integer m, (2m, 2) is the witness — q > 1 is part
    of the Diophantine approximation definition, coprimality is not."""
    best = stern_brocot_in(lo, hi)
    if best.denominator >= 2:
        return best.numerator, best.denominator
    return 2 * best.numerator, 2


def liouville_layer(space: Space, n: int) -> CeOpenSet:
    """The n-th approximation layer as a c.e. open set with Stern-Brocot
    density evidence.  Emissions walk the diagonal q + |p| = 2, 3, ..."""
    if space.kind != EUCLIDEAN or space.dim != 1:
        raise ValueError("the Liouville construction lives on the line")
    if n < 1:
        raise ValueError("layers are indexed from 1")

    def emission(p: int, q: int) -> BasicOpen:
        return BasicOpen(EUCLIDEAN, (Q(p, q),), Q(1, q**n))

    def factory():
        s = 2
        while True:
            for q in range(2, s + 1):
                a = s - q
                yield emission(a, q)
                if a > 0:
                    yield emission(-a, q)
            s += 1

    def evidence(u: BasicOpen) -> BasicOpen:
        p, q = min_denominator_witness(u.center[0] - u.radius, u.center[0] + u.radius)
        return emission(p, q)

    return CeOpenSet(space, factory, f"liouville layer {n}", density_evidence=evidence)


def liouville_p2_strategy() -> Strategy:
    """P2 for BM<non-Liouville, Liouville>: at round k, center the reply at
    the minimal-denominator rational p/q of the current interval with a
    radius at most half of min(q^-k, slack to the interval's edge)."""

    def respond(history):
        current = history[-1]
        if current.kind != EUCLIDEAN or current.dim != 1:
            raise ValueError("liouville strategy plays on the line")
        k = (len(history) + 1) // 2
        lo = current.center[0] - current.radius
        hi = current.center[0] + current.radius
        p, q = min_denominator_witness(lo, hi)
        center = Q(p, q)
        slack = min(center - lo, hi - center)
        radius = min(Q(1, q**k), slack) / 2
        ball = BasicOpen(EUCLIDEAN, (center,), radius)
        return ball, {"p": str(p), "q": str(q)}

    return Strategy("P2", "liouville", respond)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

CERTIFICATE_HEADER = "liouville-certificate v1"


@dataclass(frozen=True)
class CertificateRound:
    j: int
    p: int
    q: int
    ball: BasicOpen

    def witness_ball(self) -> BasicOpen:
        return BasicOpen(EUCLIDEAN, (Q(self.p, self.q),), Q(1, self.q**self.j))


@dataclass(frozen=True)
class Certificate:
    rounds: tuple[CertificateRound, ...]

    def serialize(self) -> str:
        lines = [CERTIFICATE_HEADER]
        for r in self.rounds:
            lines.append(
                f"{r.j},{r.p},{r.q},"
                f"{nm.format_rational(r.ball.center[0])},{nm.format_rational(r.ball.radius)}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    failed_round: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_certificate(cert: Certificate) -> CheckResult:
    """Exact verification: q > 1, each round's ball sits inside its (p,q,j)
    approximation window, and consecutive balls nest.  A passing length-k
    certificate proves |x - p_j/q_j| < q_j^-j for every x in the final ball
    and every j <= k."""
    previous: Optional[CertificateRound] = None
    for r in cert.rounds:
        if r.q <= 1:
            return CheckResult(False, r.j, f"q={r.q} is not > 1")
        if not subset(r.ball, r.witness_ball()):
            return CheckResult(False, r.j, "ball escapes its approximation window")
        if previous is not None and not subset(r.ball, previous.ball):
            return CheckResult(False, r.j, "balls do not nest")
        previous = r
    return CheckResult(True)


def certificate_from_transcript(transcript: Transcript) -> Certificate:
    """Collect the (p, q) witnesses attached to P2's moves."""
    rounds = []
    for move in transcript.moves:
        if move.player != "P2":
            continue
        if "p" not in move.note or "q" not in move.note:
            raise ValueError(f"round {move.round} P2 move carries no Diophantine witness")
        rounds.append(
            CertificateRound(move.round, int(move.note["p"]), int(move.note["q"]), move.ball)
        )
    return Certificate(tuple(rounds))


def parse_certificate(text: str) -> Certificate:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CERTIFICATE_HEADER:
        raise ValueError(f"expected header {CERTIFICATE_HEADER!r}")
    rounds = []
    for line in lines[1:]:
        fields = line.split(",")
        if len(fields) != 5:
            raise ValueError(f"bad certificate line {line!r}")
        j, p, q = int(fields[0]), int(fields[1]), int(fields[2])
        ball = BasicOpen(
            EUCLIDEAN, (nm.parse_rational(fields[3]),), nm.parse_rational(fields[4])
        )
        rounds.append(CertificateRound(j, p, q, ball))
    return Certificate(tuple(rounds))
