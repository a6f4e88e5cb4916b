/**
 * Live parity test against the real game service.
 *
 * Drives a scripted 5-round play through the same client API layer the
 * browser uses, checks that an invalid move surfaces its code without
 * changing state, and verifies the resulting server certificate is
 * byte-identical to the same moves submitted through the CLI.
 *
 * Requires the `bmgame` CLI on PATH (override with the BMGAME env var).
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  ApiError,
  createSession,
  fetchCertificate,
  fetchState,
  fetchTranscript,
  postMove,
} from "../src/api.js";
import { convergenceSeries } from "../src/board.js";
import { formatRational, half, parseRational } from "../src/rational.js";
import { validateMoveInput } from "../src/state.js";

const BMGAME = process.env.BMGAME ?? "bmgame";
const ROUNDS = 5;

let server: ChildProcess;
let base = "";

function startServer(): Promise<string> {
  return new Promise((resolve, reject) => {
    server = spawn(BMGAME, ["serve", "--port", "0", "--host", "127.0.0.1"], {
      stdio: ["ignore", "pipe", "pipe"],
    });
    let buffer = "";
    server.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = /serving on (http:\/\/[^\s]+)/.exec(buffer);
      if (match) resolve(match[1]!);
    });
    server.on("error", reject);
    server.on("exit", (code) => reject(new Error(`server exited early (${code})`)));
  });
}

function runCli(args: string[], stdin?: string): Promise<number> {
  return new Promise((resolve, reject) => {
    const child = spawn(BMGAME, args, {
      stdio: [stdin === undefined ? "ignore" : "pipe", "ignore", "inherit"],
    });
    child.on("error", reject);
    child.on("exit", (code) => resolve(code ?? -1));
    if (stdin !== undefined) {
      child.stdin!.write(stdin);
      child.stdin!.end();
    }
  });
}

function runCliPlay(moves: string[], outPrefix: string): Promise<number> {
  return runCli(
    ["play", "--preset", "liouville", "--rounds", String(ROUNDS), "--out", outPrefix],
    moves.join("\n") + "\n",
  );
}

beforeAll(async () => {
  base = await startServer();
}, 30_000);

afterAll(() => {
  server?.removeAllListeners("exit");
  server?.kill();
});

describe("browser play parity with the CLI", () => {
  it(
    "plays 5 rounds, rejects a bad move without state change, matches CLI bytes",
    async () => {
      const created = await createSession(base, {
        preset: "liouville",
        rounds: ROUNDS,
        human_role: "P1",
      });
      expect(created.turn).toBe("human");
      expect(created.space.region).not.toBe("all");

      const playedLines: string[] = [];
      let state = created;
      for (let round = 1; round <= ROUNDS; round++) {
        // derive the next move from exact state strings, client-side
        let center: string;
        let radius: string;
        if (state.moves.length === 0) {
          const member = (state.space.region as string[][])[0]!;
          center = member[0]!;
          radius = member[member.length - 1]!;
        } else {
          const last = state.moves[state.moves.length - 1]!;
          center = last.center[0]!;
          radius = formatRational(half(parseRational(last.radius)));
        }
        const validated = validateMoveInput(state, [center], radius);

        if (round === 3) {
          // an invalid (non-nested) move must surface NotNested and leave
          // the session untouched
          const before = state.moves.length;
          let code = "";
          try {
            await postMove(base, state.id, ["1/2"], "1/2");
          } catch (err) {
            if (err instanceof ApiError) code = err.code;
            else throw err;
          }
          expect(code).toBe("NotNested");
          const after = await fetchState(base, state.id);
          expect(after.moves.length).toBe(before);
        }

        const response = await postMove(base, state.id, validated.center, validated.radius);
        expect(response.accepted.round).toBe(round);
        expect(response.reply?.player).toBe("P2");
        playedLines.push(`${validated.center[0]} ${validated.radius}`);
        state = response.state;
      }
      expect(state.status).toBe("finished");

      // convergence panel data: 10 diameters, non-increasing
      const series = convergenceSeries(state);
      expect(series).toHaveLength(2 * ROUNDS);
      for (let i = 1; i < series.length; i++) {
        expect(series[i]!.log2Diameter).toBeLessThanOrEqual(series[i - 1]!.log2Diameter);
      }

      const serviceCertificate = await fetchCertificate(base, state.id);
      expect(serviceCertificate.startsWith("liouville-certificate v1\n")).toBe(true);
      const serviceTranscript = await fetchTranscript(base, state.id);
      expect(serviceTranscript.startsWith("banach-mazur-transcript v1\n")).toBe(true);

      const outPrefix = join(mkdtempSync(join(tmpdir(), "bmgame-web-")), "play");
      const exitCode = await runCliPlay(playedLines, outPrefix);
      expect(exitCode).toBe(0);
      const cliCertificate = readFileSync(`${outPrefix}.certificate`, "utf8");
      expect(serviceCertificate).toBe(cliCertificate);

      // the UI-produced certificate passes the CLI verifier
      writeFileSync(`${outPrefix}.ui.certificate`, serviceCertificate);
      const verifyExit = await runCli(["verify", `${outPrefix}.ui.certificate`]);
      expect(verifyExit).toBe(0);
    },
    60_000,
  );
});
