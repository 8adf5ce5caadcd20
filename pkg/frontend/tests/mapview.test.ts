import { describe, expect, it } from "vitest";

import {
  fitViewport,
  hoverHit,
  lassoSelect,
  pan,
  screenToWorld,
  worldToScreen,
  zoomAt,
} from "../src/mapview.js";

const SIZE = { width: 800, height: 600 };

describe("viewport transforms", () => {
  it("worldToScreen and screenToWorld are inverse", () => {
    const vp = { cx: 3, cy: -2, zoom: 25 };
    const p = { x: 1.25, y: 4.5 };
    const back = screenToWorld(worldToScreen(p, vp, SIZE), vp, SIZE);
    expect(back.x).toBeCloseTo(p.x, 10);
    expect(back.y).toBeCloseTo(p.y, 10);
  });

  it("pan moves the world with the cursor", () => {
    const vp = { cx: 0, cy: 0, zoom: 10 };
    const p = { x: 1, y: 1 };
    const before = worldToScreen(p, vp, SIZE);
    const after = worldToScreen(p, pan(vp, 30, -40), SIZE);
    expect(after.x - before.x).toBeCloseTo(30, 10);
    expect(after.y - before.y).toBeCloseTo(-40, 10);
  });

  it("zoomAt keeps the point under the cursor fixed", () => {
    const vp = { cx: 5, cy: 5, zoom: 12 };
    const cursor = { x: 200, y: 450 };
    const anchor = screenToWorld(cursor, vp, SIZE);
    for (const factor of [2, 0.5, 1.3]) {
      const zoomed = zoomAt(vp, factor, cursor, SIZE);
      const s = worldToScreen(anchor, zoomed, SIZE);
      expect(s.x).toBeCloseTo(cursor.x, 8);
      expect(s.y).toBeCloseTo(cursor.y, 8);
      expect(zoomed.zoom).toBeCloseTo(vp.zoom * factor, 10);
    }
  });

  it("fitViewport brings all points on screen", () => {
    const points = [
      { id: "a", x: -10, y: 0 },
      { id: "b", x: 10, y: 5 },
      { id: "c", x: 0, y: -5 },
    ];
    const vp = fitViewport(points, SIZE);
    for (const p of points) {
      const s = worldToScreen(p, vp, SIZE);
      expect(s.x).toBeGreaterThanOrEqual(0);
      expect(s.x).toBeLessThanOrEqual(SIZE.width);
      expect(s.y).toBeGreaterThanOrEqual(0);
      expect(s.y).toBeLessThanOrEqual(SIZE.height);
    }
  });
});

describe("hover and lasso", () => {
  const vp = { cx: 0, cy: 0, zoom: 1 };
  const points = [
    { id: "near", x: 2, y: 0 },
    { id: "far", x: 100, y: 100 },
  ];

  it("hover returns the nearest point within the radius", () => {
    const cursor = worldToScreen({ x: 0, y: 0 }, vp, SIZE);
    expect(hoverHit(points, cursor, vp, SIZE, 8)?.id).toBe("near");
  });

  it("hover misses outside the radius", () => {
    const cursor = worldToScreen({ x: 50, y: 50 }, vp, SIZE);
    expect(hoverHit(points, cursor, vp, SIZE, 8)).toBeNull();
  });

  it("lasso selects exactly the enclosed points", () => {
    const grid = [];
    for (let i = 0; i < 10; i++) {
      for (let j = 0; j < 10; j++) {
        grid.push({ id: `p${i}${j}`, x: i * 10, y: j * 10 });
      }
    }
    // world-space square (±15 around (10, 10)) mapped to screen corners
    const corners = [
      { x: -5, y: -5 },
      { x: 25, y: -5 },
      { x: 25, y: 25 },
      { x: -5, y: 25 },
    ].map((c) => worldToScreen(c, vp, SIZE));
    const ids = lassoSelect(grid, corners, vp, SIZE);
    expect(ids).toEqual(["p00", "p01", "p02", "p10", "p11", "p12", "p20", "p21", "p22"]);
  });

  it("degenerate lasso selects nothing", () => {
    expect(lassoSelect(points, [{ x: 0, y: 0 }, { x: 1, y: 1 }], vp, SIZE)).toEqual([]);
  });
});

describe("scale", () => {
  it("transforms stay fast and exact over 20k points", () => {
    const points = Array.from({ length: 20000 }, (_, i) => ({
      id: `p${i}`,
      x: Math.sin(i) * 50,
      y: Math.cos(i) * 50,
    }));
    const vp = fitViewport(points, SIZE);
    const start = performance.now();
    let hits = 0;
    for (let i = 0; i < 50; i++) {
      if (hoverHit(points, { x: 400, y: 300 }, vp, SIZE)) hits += 1;
    }
    const elapsed = performance.now() - start;
    expect(elapsed).toBeLessThan(1000);
    expect(hits).toBeGreaterThanOrEqual(0);
  });
});
