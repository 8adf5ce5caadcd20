/** Pure viewport math for the neighborhood map: pan, anchored zoom,
 * hover hit-testing and lasso selection. Rendering sits on top of these
 * transforms; keeping them pure makes 20k-point interaction testable. */
import type { MapPoint } from "./types.js";
import type { Viewport } from "./viewstate.js";

export interface Size {
  width: number;
  height: number;
}

export function worldToScreen(p: { x: number; y: number }, vp: Viewport, size: Size) {
  return {
    x: (p.x - vp.cx) * vp.zoom + size.width / 2,
    y: (p.y - vp.cy) * vp.zoom + size.height / 2,
  };
}

export function screenToWorld(s: { x: number; y: number }, vp: Viewport, size: Size) {
  return {
    x: (s.x - size.width / 2) / vp.zoom + vp.cx,
    y: (s.y - size.height / 2) / vp.zoom + vp.cy,
  };
}

export function pan(vp: Viewport, dxScreen: number, dyScreen: number): Viewport {
  return { cx: vp.cx - dxScreen / vp.zoom, cy: vp.cy - dyScreen / vp.zoom, zoom: vp.zoom };
}

/** Zoom by a factor keeping the world point under the cursor fixed. */
export function zoomAt(
  vp: Viewport,
  factor: number,
  cursor: { x: number; y: number },
  size: Size,
): Viewport {
  const zoom = Math.min(Math.max(vp.zoom * factor, 1e-6), 1e6);
  const anchor = screenToWorld(cursor, vp, size);
  return {
    cx: anchor.x - (cursor.x - size.width / 2) / zoom,
    cy: anchor.y - (cursor.y - size.height / 2) / zoom,
    zoom,
  };
}

export function fitViewport(points: MapPoint[], size: Size, margin = 0.9): Viewport {
  if (points.length === 0) return { cx: 0, cy: 0, zoom: 1 };
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const p of points) {
    if (p.x < minX) minX = p.x;
    if (p.x > maxX) maxX = p.x;
    if (p.y < minY) minY = p.y;
    if (p.y > maxY) maxY = p.y;
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const zoom = margin * Math.min(size.width / spanX, size.height / spanY);
  return { cx: (minX + maxX) / 2, cy: (minY + maxY) / 2, zoom };
}

/** Nearest point within radiusPx of the cursor, or null. Ties break on id. */
export function hoverHit(
  points: MapPoint[],
  cursor: { x: number; y: number },
  vp: Viewport,
  size: Size,
  radiusPx = 8,
): MapPoint | null {
  let best: MapPoint | null = null;
  let bestDist = radiusPx * radiusPx;
  for (const p of points) {
    const s = worldToScreen(p, vp, size);
    const d = (s.x - cursor.x) ** 2 + (s.y - cursor.y) ** 2;
    if (d < bestDist || (d === bestDist && best !== null && p.id < best.id)) {
      best = p;
      bestDist = d;
    }
  }
  return best;
}

/** Ids of points inside a closed lasso polygon (screen coords, ray cast). */
export function lassoSelect(
  points: MapPoint[],
  polygon: { x: number; y: number }[],
  vp: Viewport,
  size: Size,
): string[] {
  if (polygon.length < 3) return [];
  const inside = (x: number, y: number): boolean => {
    let odd = false;
    for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
      const a = polygon[i];
      const b = polygon[j];
      if (a.y > y !== b.y > y && x < ((b.x - a.x) * (y - a.y)) / (b.y - a.y) + a.x) {
        odd = !odd;
      }
    }
    return odd;
  };
  const ids: string[] = [];
  for (const p of points) {
    const s = worldToScreen(p, vp, size);
    if (inside(s.x, s.y)) ids.push(p.id);
  }
  return ids.sort();
}
