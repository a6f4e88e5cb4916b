/**
 * DOM glue. All arithmetic authority is server-side; this file only wires
 * the pure helpers (rational parsing, board math) to the page. Optimistic
 * updates are deliberately absent: every state change round-trips.
 */

import {
  ApiError,
  ServerState,
  createSession,
  fetchCertificate,
  fetchPresets,
  postMove,
} from "./api.js";
import { convergencePolyline, convergenceSeries, eArcSpans, moveRows } from "./board.js";
import { annotationFeed, canMove, validateMoveInput, witnesses } from "./state.js";
import { RationalParseError } from "./rational.js";

const BOARD_WIDTH = 640;
const ROW_HEIGHT = 14;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

let state: ServerState | null = null;

function base(): string {
  return el<HTMLInputElement>("server").value.replace(/\/$/, "");
}

function showError(text: string): void {
  const banner = el<HTMLDivElement>("error");
  banner.textContent = text;
  banner.style.display = text ? "block" : "none";
}

function render(): void {
  const board = el<HTMLElement>("board");
  const feed = el<HTMLUListElement>("feed");
  const wits = el<HTMLUListElement>("witnesses");
  const turn = el<HTMLSpanElement>("turn");
  board.innerHTML = "";
  feed.innerHTML = "";
  wits.innerHTML = "";
  if (state === null) {
    turn.textContent = "no session";
    return;
  }
  turn.textContent = `${state.preset} — ${state.turn} (${state.moves.length} moves / ${state.rounds} rounds)`;

  const rows = moveRows(state, BOARD_WIDTH);
  const height = 12 + rows.length * ROW_HEIGHT;
  const eStripes = eArcSpans(state, BOARD_WIDTH)
    .map(
      (span) =>
        `<rect x="${span.x.toFixed(2)}" y="0" width="${span.width.toFixed(2)}"` +
        ` height="${height}" fill="#fde68a" opacity="0.6"><title>E</title></rect>`,
    )
    .join("");
  const svgRows = rows
    .map((row, i) => {
      const y = 6 + i * ROW_HEIGHT;
      const color = row.player === "P1" ? "#2563eb" : "#dc2626";
      const rects = row.spans
        .map(
          (span) =>
            `<rect x="${span.x.toFixed(2)}" y="${y}" width="${span.width.toFixed(2)}"` +
            ` height="${ROW_HEIGHT - 4}" fill="${color}" opacity="0.55">` +
            `<title>round ${row.round} ${row.player}: (${row.lo}, ${row.hi})</title></rect>`,
        )
        .join("");
      return rects;
    })
    .join("");
  board.innerHTML =
    `<svg width="${BOARD_WIDTH}" height="${height}" role="img">` +
    `<rect x="0" y="0" width="${BOARD_WIDTH}" height="${height}" fill="#f8fafc"/>` +
    eStripes +
    svgRows +
    "</svg>";

  for (const line of annotationFeed(state)) {
    const item = document.createElement("li");
    item.textContent = line;
    feed.appendChild(item);
  }
  for (const w of witnesses(state)) {
    const item = document.createElement("li");
    item.textContent = `round ${w.j}: p/q = ${w.p}/${w.q}`;
    wits.appendChild(item);
  }

  const series = convergenceSeries(state);
  el<HTMLElement>("convergence").innerHTML =
    `<svg width="320" height="120">` +
    `<rect x="0" y="0" width="320" height="120" fill="#f8fafc"/>` +
    `<polyline fill="none" stroke="#0f766e" stroke-width="1.5" points="${convergencePolyline(series, 320, 120)}"/>` +
    "</svg>";

  el<HTMLButtonElement>("submit").disabled = !canMove(state);
}

async function newGame(): Promise<void> {
  showError("");
  const preset = el<HTMLSelectElement>("preset").value;
  const config: Parameters<typeof createSession>[1] = {
    preset,
    rounds: parseInt(el<HTMLInputElement>("rounds").value, 10),
    human_role: "P1",
  };
  if (preset === "recurrence") {
    config.system = el<HTMLTextAreaElement>("system").value;
    config.open_set = el<HTMLTextAreaElement>("open-set").value;
  }
  try {
    state = await createSession(base(), config);
  } catch (err) {
    if (err instanceof ApiError) showError(`${err.code}: ${err.message}`);
    else throw err;
    return;
  }
  render();
}

async function submitMove(): Promise<void> {
  if (state === null) return;
  showError("");
  const centerText = el<HTMLInputElement>("center").value;
  const radiusText = el<HTMLInputElement>("radius").value;
  let validated;
  try {
    validated = validateMoveInput(state, centerText.split(/\s+/).filter(Boolean), radiusText);
  } catch (err) {
    if (err instanceof RationalParseError) {
      showError(`parse error: ${err.message}`);
      return; // no network call on bad syntax
    }
    throw err;
  }
  try {
    const response = await postMove(base(), state.id, validated.center, validated.radius);
    state = response.state;
  } catch (err) {
    if (err instanceof ApiError) {
      showError(`${err.code}: ${err.message}`); // board unchanged
      return;
    }
    throw err;
  }
  render();
}

async function showCertificate(): Promise<void> {
  if (state === null) return;
  showError("");
  try {
    el<HTMLPreElement>("certificate").textContent = await fetchCertificate(
      base(),
      state.id,
    );
  } catch (err) {
    if (err instanceof ApiError) showError(`${err.code}: ${err.message}`);
    else throw err;
  }
}

async function boot(): Promise<void> {
  const select = el<HTMLSelectElement>("preset");
  try {
    const presets = await fetchPresets(base());
    select.innerHTML = "";
    for (const [name, blurb] of Object.entries(presets)) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = `${name} — ${blurb}`;
      select.appendChild(option);
    }
  } catch (err) {
    if (err instanceof ApiError) showError(`${err.code}: ${err.message}`);
    else throw err;
  }
  el<HTMLButtonElement>("new-game").addEventListener("click", () => void newGame());
  el<HTMLButtonElement>("submit").addEventListener("click", () => void submitMove());
  el<HTMLButtonElement>("show-certificate").addEventListener(
    "click",
    () => void showCertificate(),
  );
}

void boot();
