// End-to-end: drive the capture machinery against a real kda service.
//
// Spawns `kda serve` (the Python package must be installed), replays a
// scripted typing rhythm through EntryCapture, and checks the full
// enroll -> verify loop over HTTP, including the slowed-rhythm reject.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, enrollEntry, health, verifyEntry } from "../src/api.js";
import { EntryCapture, type CaptureEvent } from "../src/capture.js";

const BASE = "http://127.0.0.1:8941";

// one fixed typing rhythm for the password "demo": (key, press, release)
const RHYTHM: Array<[string, number, number]> = [
  ["d", 0, 92],
  ["e", 210, 288],
  ["m", 430, 545],
  ["o", 700, 781],
];

function typeEntry(scale = 1): CaptureEvent[] {
  const capture = new EntryCapture();
  // interleave the raw events in clock order, the way a page sees them
  const wire: Array<[number, "down" | "up", string]> = [];
  for (const [key, press, release] of RHYTHM) {
    wire.push([press * scale, "down", key]);
    wire.push([release * scale, "up", key]);
  }
  wire.sort((a, b) => a[0] - b[0]);
  for (const [t, kind, key] of wire) {
    if (kind === "down") capture.keydown(key, t);
    else capture.keyup(key, t);
  }
  const result = capture.finish();
  if (!result.ok) throw new Error(result.reason);
  return result.events;
}

let server: ChildProcess;
let storeDir: string;

beforeAll(async () => {
  storeDir = mkdtempSync(join(tmpdir(), "kda-e2e-"));
  server = spawn("kda", ["serve", "--bind", "127.0.0.1:8941", "--store", storeDir], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      await health(BASE);
      break;
    } catch {
      if (Date.now() > deadline) throw new Error("kda serve did not come up");
      await new Promise((r) => setTimeout(r, 250));
    }
  }
}, 30_000);

afterAll(async () => {
  server?.kill("SIGTERM");
  await new Promise((r) => setTimeout(r, 300));
  rmSync(storeDir, { recursive: true, force: true });
});

describe("capture page against a live service", () => {
  it("enrolls four replayed entries, accepts the rhythm, rejects it slowed 3x", async () => {
    const statuses: string[] = [];
    for (let i = 0; i < 4; i++) {
      const r = await enrollEntry(BASE, "webdemo", typeEntry());
      statuses.push(r.status);
      expect(r.samples_needed).toBe(4);
    }
    expect(statuses).toEqual(["collecting", "collecting", "collecting", "enrolled"]);

    const match = await verifyEntry(BASE, "webdemo", typeEntry());
    expect(match.accepted).toBe(true);
    expect(match.score).toBeGreaterThanOrEqual(match.threshold);

    const slowed = await verifyEntry(BASE, "webdemo", typeEntry(3));
    expect(slowed.accepted).toBe(false);
    expect(slowed.score).toBeLessThan(slowed.threshold);
  }, 30_000);

  it("surfaces unknown accounts as readable 404s", async () => {
    const err = await verifyEntry(BASE, "nobody", typeEntry()).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).message).toContain("unknown account");
  }, 30_000);

  it("reports enrolled accounts through /health", async () => {
    const h = await health(BASE);
    expect(h.status).toBe("ok");
    expect(h.accounts).toBeGreaterThanOrEqual(1);
  }, 30_000);
});
