/**
 * Session-view helpers. The server state (exact "p/q" strings) is the only
 * source of truth; everything here derives from it on demand, so nothing a
 * user sees can drift from what the server certified.
 */

import type { ServerMove, ServerState } from "./api.js";
import {
  Rational,
  RationalParseError,
  add,
  compare,
  formatRational,
  makeRational,
  mul,
  parseRational,
  sub,
} from "./rational.js";

export interface Endpoints {
  lo: Rational;
  hi: Rational;
}

const TWO = makeRational(2n, 1n);
const HALF = makeRational(1n, 2n);

/** Exact endpoints center ± radius of a move's first coordinate. */
export function moveEndpoints(move: ServerMove): Endpoints {
  const center = parseRational(move.center[0]!);
  const radius = parseRational(move.radius);
  return { lo: sub(center, radius), hi: add(center, radius) };
}

/** Exact diameter: 2r, capped at the wrap bound 1/2 on the torus. */
export function diameterOf(move: ServerMove, kind: string): Rational {
  const d = mul(TWO, parseRational(move.radius));
  if (kind === "torus" && compare(d, HALF) > 0) return HALF;
  return d;
}

/** The region's first member as exact endpoints, or null for "all". */
export function regionSpan(state: ServerState): Endpoints | null {
  if (state.space.region === "all") return null;
  const member = state.space.region[0]!;
  const center = parseRational(member[0]!);
  const radius = parseRational(member[member.length - 1]!);
  return { lo: sub(center, radius), hi: add(center, radius) };
}

export function canMove(state: ServerState): boolean {
  return state.status === "open" && state.turn === "human";
}

export interface DiophantineWitness {
  j: number;
  p: string;
  q: string;
}

/** The (p, q) annotations of the machine's replies, in round order. */
export function witnesses(state: ServerState): DiophantineWitness[] {
  const out: DiophantineWitness[] = [];
  for (const move of state.moves) {
    if (move.player === "P2" && move.note["p"] !== undefined && move.note["q"] !== undefined) {
      out.push({ j: move.round, p: move.note["p"], q: move.note["q"] });
    }
  }
  return out;
}

/** Annotation feed entries: the machine's per-round evidence, verbatim. */
export function annotationFeed(state: ServerState): string[] {
  const lines: string[] = [];
  for (const move of state.moves) {
    const keys = Object.keys(move.note).sort();
    if (keys.length === 0) continue;
    const text = keys.map((k) => `${k}=${move.note[k]}`).join(" ");
    lines.push(`round ${move.round} ${move.player}: ${text}`);
  }
  return lines;
}

export interface ValidatedMove {
  center: string[];
  radius: string;
}

/**
 * Client-side syntax validation: parse the user's inputs as exact rationals
 * and return their canonical wire strings. Throws RationalParseError before
 * any network traffic; all game-rule validation stays server-side.
 */
export function validateMoveInput(
  state: ServerState,
  centerTexts: string[],
  radiusText: string,
): ValidatedMove {
  if (centerTexts.length !== state.space.dim) {
    throw new RationalParseError(
      `need ${state.space.dim} center coordinate(s), got ${centerTexts.length}`,
    );
  }
  const center = centerTexts.map((t) => formatRational(parseRational(t)));
  const radius = parseRational(radiusText);
  if (radius.num <= 0n) {
    throw new RationalParseError("radius must be positive");
  }
  return { center, radius: formatRational(radius) };
}
