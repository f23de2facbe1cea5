import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import {
  formatLocalIso,
  minutesUntilNextFire,
  nextFireTime,
  parseLocalIso,
} from "../src/schedule.js";

const vectors: { now: string; next: string }[] = JSON.parse(
  readFileSync(new URL("../../tests/golden/schedule_vectors.json", import.meta.url), "utf-8"),
);

describe("crawl schedule", () => {
  it("matches every shared golden vector", () => {
    expect(vectors.length).toBeGreaterThan(0);
    for (const vector of vectors) {
      const next = nextFireTime(parseLocalIso(vector.now));
      expect(formatLocalIso(next), `now=${vector.now}`).toBe(vector.next);
    }
  });

  it("always lands on a fire hour strictly in the future", () => {
    for (const vector of vectors) {
      const now = parseLocalIso(vector.now);
      const next = nextFireTime(now);
      expect([0, 4, 8, 12, 16, 20]).toContain(next.hour);
      expect(next.minute).toBe(0);
      expect(next.second).toBe(0);
      expect(formatLocalIso(next) > vector.now).toBe(true);
    }
  });

  it("computes a positive alarm delay", () => {
    const delay = minutesUntilNextFire(new Date(2019, 8, 30, 3, 59, 0));
    expect(delay).toBeCloseTo(1, 5);
  });
});
