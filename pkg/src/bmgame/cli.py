"""Command-line front door: demos, verification, terminal play, serving.

Exit codes: 0 success, 1 validation failure, 2 usage or parse error,
3 hypothesis violation (a wandering set broke the recurrence search).
All outputs are deterministic given the flags and input files.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import dynamics as dyn
from . import liouville as lv
from . import names as nm
from . import service as svc
from .game import (
    GameError,
    GameSession,
    PrecisionUnreached,
    TRANSCRIPT_HEADER,
    Transcript,
    halving_refinement,
    limit_point,
    parse_transcript,
    replay_transcript,
    run,
)
from .topology import unit_interval_space

Q = Fraction

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_HYPOTHESIS = 3


def _write_outputs(out_prefix: Optional[str], transcript: Transcript,
                   certificate: Optional[lv.Certificate]) -> None:
    if out_prefix is None:
        return
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.transcript").write_text(transcript.serialize())
    if certificate is not None:
        Path(f"{prefix}.certificate").write_text(certificate.serialize())


def cmd_demo_liouville(args) -> int:
    space = unit_interval_space()
    session = GameSession(space, args.rounds)
    p1 = halving_refinement("P1", space.region_primary())
    transcript = run(session, p1, lv.liouville_p2_strategy())
    certificate = lv.certificate_from_transcript(transcript)
    _write_outputs(args.out, transcript, certificate)

    for r in certificate.rounds:
        print(
            f"round {r.j}: witness p/q = {r.p}/{r.q}, reply "
            f"({nm.format_rational(r.ball.center[0] - r.ball.radius)}, "
            f"{nm.format_rational(r.ball.center[0] + r.ball.radius)})"
        )
    final = session.moves[-1].ball
    print(
        "final interval: "
        f"({nm.format_rational(final.center[0] - final.radius)}, "
        f"{nm.format_rational(final.center[0] + final.radius)})"
    )
    result = lv.check_certificate(certificate)
    if result.ok:
        print(f"certificate: PASS ({len(certificate.rounds)} rounds)")
        return EXIT_OK
    print(f"certificate: FAIL at round {result.failed_round}: {result.reason}")
    return EXIT_VALIDATION


def cmd_demo_recurrence(args) -> int:
    try:
        space, system = dyn.parse_system_file(Path(args.system).read_text())
        e = dyn.parse_open_set_file(space, Path(args.open_set).read_text())
    except (OSError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    probe = dyn.wandering_probe(system, e, horizon=max(5, args.rounds), fuel=args.fuel)
    if probe is None:
        print(f"wandering probe: Unknown (no return found up to horizon)")
    else:
        print(f"wandering probe: NotWandering({probe})")

    session = GameSession(space, args.rounds)
    p1 = halving_refinement("P1", e.finite_balls[0])
    p2 = dyn.recurrence_p2_strategy(system, e, return_search_fuel=args.fuel)
    try:
        transcript = run(session, p1, p2)
    except dyn.AvoidanceSearchExhausted as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    for move in transcript.moves:
        if move.player == "P2":
            note = " ".join(f"{k}={move.note[k]}" for k in sorted(move.note))
            print(f"round {move.round}: P2 avoidance {note}")
    _write_outputs(args.out, transcript, None)
    print(f"completed {args.rounds} rounds")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        print(f"cannot read {args.path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not text.strip():
        print("warning: empty file, nothing to verify")
        return EXIT_OK
    first_line = text.splitlines()[0]
    try:
        if first_line == TRANSCRIPT_HEADER:
            transcript = parse_transcript(text)
            try:
                replay_transcript(transcript)
            except GameError as exc:
                print(f"transcript INVALID: {exc}")
                return EXIT_VALIDATION
            print(f"transcript OK: {len(transcript.moves)} moves replay cleanly")
            return EXIT_OK
        if first_line == lv.CERTIFICATE_HEADER:
            result = lv.check_certificate(lv.parse_certificate(text))
            if result.ok:
                print("certificate OK")
                return EXIT_OK
            print(f"certificate INVALID at round {result.failed_round}: {result.reason}")
            return EXIT_VALIDATION
        print(f"unrecognized header {first_line!r}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, nm.MalformedName) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def cmd_play(args) -> int:
    config = {"preset": args.preset, "rounds": args.rounds, "human_role": "P1"}
    if args.system:
        config["system"] = Path(args.system).read_text()
    if args.open_set:
        config["open_set"] = Path(args.open_set).read_text()
    try:
        store = svc.SessionStore()
        record = store.create(config)
    except svc.ServiceError as exc:
        print(f"{exc.code}: {exc.message}", file=sys.stderr)
        return EXIT_USAGE

    session = record.session
    dim = session.space.dim
    print(f"playing {args.preset}: enter {dim} center coordinate(s) and a radius, e.g. '1/2 1/4'")
    while session.status == "open":
        try:
            line = input("your move> ")
        except EOFError:
            print()
            break
        tokens = line.split()
        if len(tokens) != dim + 1:
            print(f"need {dim + 1} rationals (centers then radius)")
            continue
        try:
            accepted, reply = svc.submit_human_move(record, tokens[:-1], tokens[-1])
        except svc.ServiceError as exc:
            print(f"rejected [{exc.code}]: {exc.message}")
            continue
        print(f"you played round {accepted.round}: {_ball_text(accepted.ball)}")
        if reply is not None:
            note = " ".join(f"{k}={reply.note[k]}" for k in sorted(reply.note))
            print(f"machine replied: {_ball_text(reply.ball)} {note}".rstrip())

    transcript = svc.record_transcript(record)
    certificate = None
    if args.preset == "liouville" and any(m.player == "P2" for m in transcript.moves):
        certificate = lv.certificate_from_transcript(transcript)
    _write_outputs(args.out, transcript, certificate)
    try:
        point = limit_point(session, args.eps)
        print(f"limit point ≈ {nm.format_point(point)} (within {nm.format_rational(args.eps)})")
    except PrecisionUnreached:
        pass
    print(f"transcript: {len(transcript.moves)} moves")
    return EXIT_OK


def _ball_text(ball) -> str:
    return (
        "B(" + " ".join(nm.format_rational(c) for c in ball.center)
        + f"; {nm.format_rational(ball.radius)})"
    )


def cmd_serve(args) -> int:
    try:
        svc.serve_forever(args.host, args.port)
    except OSError as exc:
        print(f"cannot serve on port {args.port}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _rational_flag(text: str) -> Q:
    try:
        return nm.parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bmgame",
        description="Effective Banach-Mazur games: demos, verification, play, serving.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    demo_l = sub.add_parser("demo-liouville", help="machine-vs-machine Liouville game")
    demo_l.add_argument("--rounds", type=int, default=10)
    demo_l.add_argument("--out", help="path prefix for .transcript/.certificate files")
    demo_l.set_defaults(func=cmd_demo_liouville)

    demo_r = sub.add_parser("demo-recurrence", help="machine-vs-machine recurrence game")
    demo_r.add_argument("--system", required=True, help="system descriptor file")
    demo_r.add_argument("--open-set", required=True, help="E as a list of balls")
    demo_r.add_argument("--rounds", type=int, default=10)
    demo_r.add_argument("--fuel", type=int, default=10**4)
    demo_r.add_argument("--out")
    demo_r.set_defaults(func=cmd_demo_recurrence)

    verify = sub.add_parser("verify", help="replay a transcript or check a certificate")
    verify.add_argument("path")
    verify.set_defaults(func=cmd_verify)

    play = sub.add_parser("play", help="terminal play as P1 against the machine")
    play.add_argument("--preset", default="liouville", choices=sorted(svc.PRESETS))
    play.add_argument("--rounds", type=int, default=10)
    play.add_argument("--eps", type=_rational_flag, default=Q(1, 2**20))
    play.add_argument("--system")
    play.add_argument("--open-set")
    play.add_argument("--out")
    play.set_defaults(func=cmd_play)

    serve = sub.add_parser("serve", help="run the HTTP game service")
    serve.add_argument("--port", type=int, default=8723)
    serve.add_argument("--host", default="127.0.0.1")
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
