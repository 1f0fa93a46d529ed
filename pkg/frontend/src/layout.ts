/** Deterministic force-directed layout for the network view.
 *
 * Pure geometry: spring forces along branches, repulsion between buses,
 * seeded initial placement so the same network always renders identically.
 * A sidecar coordinate map, when provided, wins over the simulation. */

import type { StatePayload } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export type Coordinates = Map<number, Point>;

/** Small deterministic PRNG (mulberry32) so layouts are reproducible. */
export function seededRandom(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface LayoutOptions {
  width?: number;
  height?: number;
  iterations?: number;
  seed?: number;
  /** Fixed positions (e.g. from a sidecar file); these buses do not move. */
  pinned?: Coordinates;
}

export function forceLayout(
  state: StatePayload,
  options: LayoutOptions = {},
): Coordinates {
  const width = options.width ?? 800;
  const height = options.height ?? 600;
  const iterations = options.iterations ?? 150;
  const rng = seededRandom(options.seed ?? 42);
  const pinned = options.pinned ?? new Map<number, Point>();

  const ids = state.buses.map((b) => b.id);
  const pos: Coordinates = new Map();
  for (const id of ids) {
    const fixed = pinned.get(id);
    pos.set(
      id,
      fixed
        ? { ...fixed }
        : { x: rng() * width, y: rng() * height },
    );
  }
  if (ids.length <= 1) return pos;

  const edges = state.branches.map((b) => [b.from_bus, b.to_bus] as const);
  const area = width * height;
  const k = Math.sqrt(area / ids.length); // ideal pairwise distance
  let temperature = width / 10;
  const cooling = temperature / (iterations + 1);

  for (let iter = 0; iter < iterations; iter++) {
    const disp = new Map<number, Point>(ids.map((id) => [id, { x: 0, y: 0 }]));

    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const a = pos.get(ids[i]!)!;
        const b = pos.get(ids[j]!)!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let dist = Math.hypot(dx, dy);
        if (dist < 1e-6) {
          dx = rng() - 0.5;
          dy = rng() - 0.5;
          dist = Math.hypot(dx, dy);
        }
        const force = (k * k) / dist;
        const da = disp.get(ids[i]!)!;
        const db = disp.get(ids[j]!)!;
        da.x += (dx / dist) * force;
        da.y += (dy / dist) * force;
        db.x -= (dx / dist) * force;
        db.y -= (dy / dist) * force;
      }
    }

    for (const [from, to] of edges) {
      const a = pos.get(from);
      const b = pos.get(to);
      if (!a || !b) continue;
      const dx = a.x - b.x;
      const dy = a.y - b.y;
      const dist = Math.max(Math.hypot(dx, dy), 1e-6);
      const force = (dist * dist) / k;
      const da = disp.get(from)!;
      const db = disp.get(to)!;
      da.x -= (dx / dist) * force;
      da.y -= (dy / dist) * force;
      db.x += (dx / dist) * force;
      db.y += (dy / dist) * force;
    }

    for (const id of ids) {
      if (pinned.has(id)) continue;
      const p = pos.get(id)!;
      const d = disp.get(id)!;
      const len = Math.max(Math.hypot(d.x, d.y), 1e-6);
      p.x += (d.x / len) * Math.min(len, temperature);
      p.y += (d.y / len) * Math.min(len, temperature);
      p.x = Math.min(width - 20, Math.max(20, p.x));
      p.y = Math.min(height - 20, Math.max(20, p.y));
    }
    temperature -= cooling;
  }
  return pos;
}

/** Parse a sidecar coordinate file: one `bus x y` triple per line. */
export function parseCoordinates(text: string): Coordinates {
  const out: Coordinates = new Map();
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line || line.startsWith("#")) continue;
    const parts = line.split(/\s+/);
    if (parts.length !== 3) {
      throw new Error(`malformed coordinate line: ${JSON.stringify(line)}`);
    }
    const [id, x, y] = parts.map(Number);
    if (![id, x, y].every(Number.isFinite)) {
      throw new Error(`malformed coordinate line: ${JSON.stringify(line)}`);
    }
    out.set(id!, { x: x!, y: y! });
  }
  return out;
}
