/**
 * Pure rendering math: exact intervals to pixel spans, nested-move rows,
 * and the log-diameter convergence trace. All numbers here are display
 * coordinates computed from exact state at the last moment.
 */

import type { ServerMove, ServerState } from "./api.js";
import { diameterOf, moveEndpoints, regionSpan } from "./state.js";
import {
  Rational,
  add as addRat,
  compare,
  log2Approx,
  makeRational,
  parseRational,
  sub,
  toNumber,
} from "./rational.js";

export interface Span {
  x: number;
  width: number;
}

const UNIT_LO = makeRational(0n, 1n);
const UNIT_HI = makeRational(1n, 1n);

/** Map an exact interval into a pixel span within the viewport window. */
export function intervalSpan(
  lo: Rational,
  hi: Rational,
  window: { lo: Rational; hi: Rational },
  width: number,
): Span {
  const windowWidth = toNumber(sub(window.hi, window.lo));
  const x = (toNumber(sub(lo, window.lo)) / windowWidth) * width;
  const w = (toNumber(sub(hi, lo)) / windowWidth) * width;
  return { x, width: Math.max(w, 1e-9) };
}

export interface MoveRow {
  round: number;
  player: "P1" | "P2";
  lo: string; // exact decimal-free endpoint text for tooltips
  hi: string;
  spans: Span[]; // two spans when a torus arc wraps
}

function viewport(state: ServerState): { lo: Rational; hi: Rational } {
  const region = regionSpan(state);
  if (region !== null) return region;
  return { lo: UNIT_LO, hi: UNIT_HI }; // the torus fundamental domain
}

/** One row per move, outermost first, with wrapped arcs split in two. */
export function moveRows(state: ServerState, width: number): MoveRow[] {
  const window = viewport(state);
  const rows: MoveRow[] = [];
  for (const move of state.moves) {
    const { lo, hi } = moveEndpoints(move);
    const spans: Span[] = [];
    if (state.space.kind === "torus") {
      for (const piece of wrapPieces(lo, hi)) {
        spans.push(intervalSpan(piece.lo, piece.hi, window, width));
      }
    } else {
      spans.push(intervalSpan(lo, hi, window, width));
    }
    rows.push({
      round: move.round,
      player: move.player,
      lo: `${lo.num}/${lo.den}`,
      hi: `${hi.num}/${hi.den}`,
      spans,
    });
  }
  return rows;
}

/** Split an arc (lo, hi) into its pieces inside [0, 1). */
export function wrapPieces(
  lo: Rational,
  hi: Rational,
): { lo: Rational; hi: Rational }[] {
  const ONE = UNIT_HI;
  if (compare(lo, UNIT_LO) >= 0 && compare(hi, ONE) <= 0) {
    return [{ lo, hi }];
  }
  if (compare(lo, UNIT_LO) < 0) {
    const wrapped = { lo: makeRational(lo.num + lo.den, lo.den), hi: ONE };
    return [{ lo: UNIT_LO, hi }, wrapped];
  }
  // hi > 1
  const wrapped = { lo: UNIT_LO, hi: makeRational(hi.num - hi.den, hi.den) };
  return [{ lo, hi: ONE }, wrapped];
}

/** Highlight spans for the open set E of a recurrence session. */
export function eArcSpans(state: ServerState, width: number): Span[] {
  if (!state.e_arcs) return [];
  const window = viewport(state);
  const spans: Span[] = [];
  for (const arc of state.e_arcs) {
    const center = parseRational(arc[0]!);
    const radius = parseRational(arc[arc.length - 1]!);
    const lo = sub(center, radius);
    const hi = addRat(center, radius);
    if (state.space.kind === "torus") {
      for (const piece of wrapPieces(lo, hi)) {
        spans.push(intervalSpan(piece.lo, piece.hi, window, width));
      }
    } else {
      spans.push(intervalSpan(lo, hi, window, width));
    }
  }
  return spans;
}

export interface ConvergencePoint {
  index: number; // 0-based move index
  round: number;
  player: "P1" | "P2";
  log2Diameter: number;
}

/** log2-diameter per move; non-increasing for any legal nested play. */
export function convergenceSeries(state: ServerState): ConvergencePoint[] {
  return state.moves.map((move: ServerMove, index: number) => ({
    index,
    round: move.round,
    player: move.player,
    log2Diameter: log2Approx(diameterOf(move, state.space.kind)),
  }));
}

/** Polyline points attribute for an SVG convergence plot. */
export function convergencePolyline(
  series: ConvergencePoint[],
  width: number,
  height: number,
): string {
  if (series.length === 0) return "";
  const min = Math.min(...series.map((p) => p.log2Diameter));
  const max = Math.max(...series.map((p) => p.log2Diameter));
  const spread = max - min || 1;
  const stepX = series.length > 1 ? width / (series.length - 1) : 0;
  return series
    .map((p, i) => {
      const y = ((max - p.log2Diameter) / spread) * (height - 8) + 4;
      return `${(i * stepX).toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
}
