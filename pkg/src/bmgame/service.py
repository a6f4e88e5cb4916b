"""Session-oriented HTTP service for live games.

Stdlib http.server only: sessions live in memory, every mutation goes
through the same validation as the CLI referee, and all numeric payloads
are exact rational strings ("p/q") so that certificates check bit-exactly.
Error responses carry stable machine-readable codes.

Endpoints:
    GET  /presets
    POST /sessions                      {"preset", "human_role", "rounds", ...}
    GET  /sessions/{id}
    POST /sessions/{id}/moves           {"center": ["p/q", ...], "radius": "p/q"}
    GET  /sessions/{id}/certificate     (liouville sessions)
    GET  /sessions/{id}/transcript
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from . import dynamics as dyn
from . import effective as eff
from . import liouville as lv
from . import names as nm
from .game import (
    GameError,
    GameSession,
    Move,
    Strategy,
    Transcript,
    halving_refinement,
    p2_meager_strategy,
)
from .topology import BasicOpen, Space, unit_interval_space

DEFAULT_ROUNDS = 10


class ServiceError(Exception):
    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status


PRESETS = {
    "liouville": "P2 plays the Diophantine-witness strategy on (0,1)",
    "rationals": "P2 avoids the rationals of (0,1), one singleton layer per round",
    "recurrence": "P2 plays the Poincare recurrence strategy for a dynamical system",
    "custom": "P2 avoids the layers of a supplied meager presentation file",
}


@dataclass
class SessionRecord:
    id: str
    preset: str
    human_role: str
    session: GameSession
    machine: Strategy
    display: dict = field(default_factory=dict)  # preset extras for clients
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def machine_role(self) -> str:
        return "P2" if self.human_role == "P1" else "P1"


def _machine_p1(space: Space, first: Optional[BasicOpen] = None) -> Strategy:
    return halving_refinement("P1", first or space.region_primary())


def build_preset(config: dict) -> tuple[Space, Strategy, Optional[Strategy], dict]:
    """(space, machine P2, machine P1, display extras) for a session config."""
    preset = config.get("preset")
    if preset not in PRESETS:
        raise ServiceError("UnknownPreset", f"unknown preset {preset!r}", 404)
    try:
        if preset == "liouville":
            space = unit_interval_space()
            return space, lv.liouville_p2_strategy(), _machine_p1(space), {}
        if preset == "rationals":
            space = unit_interval_space()
            pres = eff.rational_singletons_presentation(space, 0, 1)
            return space, p2_meager_strategy(pres), _machine_p1(space), {}
        if preset == "recurrence":
            space, system = dyn.parse_system_file(config["system"])
            e = dyn.parse_open_set_file(space, config["open_set"])
            p2 = dyn.recurrence_p2_strategy(system, e)
            first = e.finite_balls[0]
            extras = {
                "system": system.descriptor,
                "e_arcs": [
                    [nm.format_rational(c) for c in ball.center]
                    + [nm.format_rational(ball.radius)]
                    for ball in e.finite_balls
                ],
            }
            return space, p2, halving_refinement("P1", first), extras
        space = unit_interval_space()
        pres = eff.parse_presentation_file(space, config["presentation"])
        return space, p2_meager_strategy(pres), _machine_p1(space), {}
    except KeyError as exc:
        raise ServiceError("InvalidConfig", f"missing config field {exc}", 400)
    except (ValueError, nm.MalformedName) as exc:
        raise ServiceError("InvalidConfig", str(exc), 400)


class SessionStore:
    def __init__(self):
        self._records: dict[str, SessionRecord] = {}
        self._lock = threading.Lock()

    def create(self, config: dict) -> SessionRecord:
        rounds = config.get("rounds", DEFAULT_ROUNDS)
        if not isinstance(rounds, int) or rounds < 1:
            raise ServiceError("InvalidConfig", "rounds must be a positive integer", 400)
        human_role = config.get("human_role", "P1")
        if human_role not in ("P1", "P2"):
            raise ServiceError("InvalidConfig", "human_role must be P1 or P2", 400)
        space, machine_p2, machine_p1, display = build_preset(config)
        machine = machine_p2 if human_role == "P1" else machine_p1
        if machine is None:
            raise ServiceError("InvalidConfig", "preset has no machine P1", 400)
        record = SessionRecord(
            id=uuid.uuid4().hex,
            preset=config["preset"],
            human_role=human_role,
            session=GameSession(space, rounds),
            machine=machine,
            display=display,
        )
        if record.machine_role == "P1":
            _machine_move(record)
        with self._lock:
            self._records[record.id] = record
        return record

    def get(self, session_id: str) -> SessionRecord:
        with self._lock:
            record = self._records.get(session_id)
        if record is None:
            raise ServiceError("UnknownSession", f"no session {session_id!r}", 404)
        return record


def _machine_move(record: SessionRecord) -> Optional[Move]:
    session = record.session
    if session.status == "finished" or session.whose_turn != record.machine_role:
        return None
    try:
        ball, note = record.machine.respond(session.history())
    except dyn.AvoidanceSearchExhausted as exc:
        raise ServiceError("AvoidanceSearchExhausted", str(exc), 409)
    return session.submit(record.machine_role, ball, note)


def submit_human_move(record: SessionRecord, center, radius) -> tuple[Move, Optional[Move]]:
    with record.lock:
        session = record.session
        try:
            coords = tuple(nm.parse_rational(c) for c in _as_center_list(center))
            radius_q = nm.parse_rational(radius)
        except ValueError as exc:
            raise ServiceError("MalformedRational", str(exc), 400)
        if len(coords) != session.space.dim:
            raise ServiceError(
                "InvalidBall",
                f"need {session.space.dim} center coordinate(s), got {len(coords)}",
                400,
            )
        try:
            ball = BasicOpen(session.space.kind, coords, radius_q)
        except ValueError as exc:
            raise ServiceError("InvalidBall", str(exc), 400)
        if session.status == "finished":
            raise ServiceError("SessionFinished", "round limit reached", 409)
        if session.whose_turn != record.human_role:
            raise ServiceError("WrongTurn", f"it is not {record.human_role}'s turn", 409)
        try:
            accepted = session.submit(record.human_role, ball, {})
        except GameError as exc:
            raise ServiceError(exc.code, str(exc), 409)
        reply = _machine_move(record)
        return accepted, reply


def _as_center_list(center) -> list[str]:
    if isinstance(center, str):
        return [center]
    if isinstance(center, list) and all(isinstance(c, str) for c in center):
        return center
    raise ServiceError("MalformedRational", "center must be a string or list of strings", 400)


# ---------------------------------------------------------------------------
# Wire encoding
# ---------------------------------------------------------------------------


def move_payload(move: Move) -> dict:
    return {
        "round": move.round,
        "player": move.player,
        "center": [nm.format_rational(c) for c in move.ball.center],
        "radius": nm.format_rational(move.ball.radius),
        "note": dict(move.note),
    }


def snapshot_state(record: SessionRecord) -> dict:
    """State payload under the session lock: a consistent read snapshot."""
    with record.lock:
        return state_payload(record)


def state_payload(record: SessionRecord) -> dict:
    session = record.session
    if session.status == "finished":
        turn = "finished"
    else:
        turn = "human" if session.whose_turn == record.human_role else "machine"
    region = session.space.region
    return {
        "id": record.id,
        "preset": record.preset,
        "human_role": record.human_role,
        "rounds": session.rounds_limit,
        "status": session.status,
        "turn": turn,
        **record.display,
        "space": {
            "kind": session.space.kind,
            "dim": session.space.dim,
            "region": "all"
            if region is None
            else [
                [nm.format_rational(c) for c in ball.center]
                + [nm.format_rational(ball.radius)]
                for ball in region
            ],
        },
        "moves": [move_payload(m) for m in session.moves],
    }


def record_transcript(record: SessionRecord) -> Transcript:
    human = f"human:{record.human_role}"
    p1 = human if record.human_role == "P1" else record.machine.descriptor
    p2 = human if record.human_role == "P2" else record.machine.descriptor
    return Transcript(
        record.session.space,
        record.session.rounds_limit,
        p1,
        p2,
        tuple(record.session.moves),
    )


def record_certificate(record: SessionRecord) -> lv.Certificate:
    if record.preset != "liouville":
        raise ServiceError(
            "NoCertificate", f"preset {record.preset!r} has no Diophantine certificate", 409
        )
    try:
        return lv.certificate_from_transcript(record_transcript(record))
    except ValueError as exc:  # e.g. a human P2 leaves no witnesses
        raise ServiceError("NoCertificate", str(exc), 409)


# ---------------------------------------------------------------------------
# HTTP plumbing
# ---------------------------------------------------------------------------

_SESSION_RE = re.compile(r"^/sessions/([0-9a-f]+)$")
_MOVES_RE = re.compile(r"^/sessions/([0-9a-f]+)/moves$")
_CERT_RE = re.compile(r"^/sessions/([0-9a-f]+)/certificate$")
_TRANSCRIPT_RE = re.compile(r"^/sessions/([0-9a-f]+)/transcript$")


def make_handler(store: SessionStore):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, *args):  # quiet by default
            pass

        def _send_json(self, payload: dict, status: int = 200) -> None:
            body = json.dumps(payload, sort_keys=True).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _send_text(self, text: str, status: int = 200) -> None:
            body = text.encode()
            self.send_response(status)
            self.send_header("Content-Type", "text/plain; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _send_error_payload(self, exc: ServiceError) -> None:
            self._send_json(
                {"error": {"code": exc.code, "message": exc.message}}, exc.status
            )

        def _read_json(self) -> dict:
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length) if length else b""
            if not raw:
                raise ServiceError("InvalidConfig", "empty request body", 400)
            try:
                payload = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ServiceError("InvalidConfig", f"bad JSON: {exc}", 400)
            if not isinstance(payload, dict):
                raise ServiceError("InvalidConfig", "body must be a JSON object", 400)
            return payload

        def do_GET(self):
            try:
                if self.path == "/presets":
                    self._send_json({"presets": PRESETS})
                    return
                m = _SESSION_RE.match(self.path)
                if m:
                    self._send_json(snapshot_state(store.get(m.group(1))))
                    return
                m = _CERT_RE.match(self.path)
                if m:
                    record = store.get(m.group(1))
                    with record.lock:
                        text = record_certificate(record).serialize()
                    self._send_text(text)
                    return
                m = _TRANSCRIPT_RE.match(self.path)
                if m:
                    record = store.get(m.group(1))
                    with record.lock:
                        text = record_transcript(record).serialize()
                    self._send_text(text)
                    return
                raise ServiceError("NotFound", f"no route {self.path!r}", 404)
            except ServiceError as exc:
                self._send_error_payload(exc)

        def do_POST(self):
            try:
                if self.path == "/sessions":
                    payload = self._read_json()
                    record = store.create(payload)
                    self._send_json(snapshot_state(record), 201)
                    return
                m = _MOVES_RE.match(self.path)
                if m:
                    record = store.get(m.group(1))
                    payload = self._read_json()
                    if "center" not in payload or "radius" not in payload:
                        raise ServiceError(
                            "InvalidConfig", "move needs center and radius", 400
                        )
                    accepted, reply = submit_human_move(
                        record, payload["center"], payload["radius"]
                    )
                    self._send_json(
                        {
                            "accepted": move_payload(accepted),
                            "reply": None if reply is None else move_payload(reply),
                            "state": snapshot_state(record),
                        }
                    )
                    return
                raise ServiceError("NotFound", f"no route {self.path!r}", 404)
            except ServiceError as exc:
                self._send_error_payload(exc)

    return Handler


def make_server(store: SessionStore, host: str = "127.0.0.1", port: int = 8723) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), make_handler(store))


def serve_forever(host: str, port: int) -> None:  # pragma: no cover - CLI path
    server = make_server(SessionStore(), host, port)
    bound_host, bound_port = server.server_address[:2]
    print(f"serving on http://{bound_host}:{bound_port}", flush=True)
    try:
        server.serve_forever()
    finally:
        server.server_close()
