import { describe, expect, it } from "vitest";

import type { ServerMove, ServerState } from "../src/api.js";
import {
  annotationFeed,
  canMove,
  diameterOf,
  moveEndpoints,
  regionSpan,
  validateMoveInput,
  witnesses,
} from "../src/state.js";
import { RationalParseError, formatRational } from "../src/rational.js";

function move(
  round: number,
  player: "P1" | "P2",
  center: string,
  radius: string,
  note: Record<string, string> = {},
): ServerMove {
  return { round, player, center: [center], radius, note };
}

const LIOUVILLE_STATE: ServerState = {
  id: "abc123",
  preset: "liouville",
  human_role: "P1",
  rounds: 3,
  status: "open",
  turn: "human",
  space: { kind: "euclidean", dim: 1, region: [["1/2", "1/2"]] },
  moves: [
    move(1, "P1", "1/2", "1/2"),
    move(1, "P2", "1/2", "1/4", { p: "1", q: "2" }),
    move(2, "P1", "1/2", "1/16"),
    move(2, "P2", "1/2", "1/64", { p: "1", q: "2" }),
  ],
};

describe("moveEndpoints / diameterOf", () => {
  it("computes exact endpoints", () => {
    const { lo, hi } = moveEndpoints(move(1, "P2", "1/2", "1/4"));
    expect(formatRational(lo)).toBe("1/4");
    expect(formatRational(hi)).toBe("3/4");
  });

  it("diameter is 2r, capped at 1/2 on the torus", () => {
    expect(formatRational(diameterOf(move(1, "P1", "1/2", "1/4"), "euclidean"))).toBe("1/2");
    expect(formatRational(diameterOf(move(1, "P1", "1/2", "1/3"), "torus"))).toBe("1/2");
    expect(formatRational(diameterOf(move(1, "P1", "1/2", "1/3"), "euclidean"))).toBe("2/3");
  });
});

describe("session view", () => {
  it("extracts the region span", () => {
    const span = regionSpan(LIOUVILLE_STATE);
    expect(span).not.toBeNull();
    expect(formatRational(span!.lo)).toBe("0/1");
    expect(formatRational(span!.hi)).toBe("1/1");
    const torus: ServerState = { ...LIOUVILLE_STATE, space: { kind: "torus", dim: 1, region: "all" } };
    expect(regionSpan(torus)).toBeNull();
  });

  it("lists Diophantine witnesses in round order", () => {
    expect(witnesses(LIOUVILLE_STATE)).toEqual([
      { j: 1, p: "1", q: "2" },
      { j: 2, p: "1", q: "2" },
    ]);
  });

  it("renders the annotation feed verbatim from exact strings", () => {
    expect(annotationFeed(LIOUVILLE_STATE)).toEqual([
      "round 1 P2: p=1 q=2",
      "round 2 P2: p=1 q=2",
    ]);
  });

  it("reports turns", () => {
    expect(canMove(LIOUVILLE_STATE)).toBe(true);
    expect(canMove({ ...LIOUVILLE_STATE, turn: "machine" })).toBe(false);
    expect(canMove({ ...LIOUVILLE_STATE, status: "finished", turn: "finished" })).toBe(false);
  });
});

describe("validateMoveInput", () => {
  it("canonicalizes decimal input to exact wire strings", () => {
    const out = validateMoveInput(LIOUVILLE_STATE, ["0.5"], "0.25");
    expect(out).toEqual({ center: ["1/2"], radius: "1/4" });
  });

  it("rejects syntax errors before any network call", () => {
    expect(() => validateMoveInput(LIOUVILLE_STATE, ["1/2", "1/2"], "1/4")).toThrow(
      RationalParseError,
    );
    expect(() => validateMoveInput(LIOUVILLE_STATE, ["0.333..."], "1/4")).toThrow(
      RationalParseError,
    );
    expect(() => validateMoveInput(LIOUVILLE_STATE, ["1/2"], "-1/4")).toThrow(
      RationalParseError,
    );
    expect(() => validateMoveInput(LIOUVILLE_STATE, ["1/2"], "0")).toThrow(
      RationalParseError,
    );
  });
});
