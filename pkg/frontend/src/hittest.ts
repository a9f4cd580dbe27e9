/** Pixel-exact segment hit-testing against the decoded 16-bit label map. */

import type { LabelMap } from "./png16.js";

/** Segment index at image coordinates, or null on ink / out of bounds. */
export function segmentAt(map: LabelMap, x: number, y: number): number | null {
  const xi = Math.floor(x);
  const yi = Math.floor(y);
  if (xi < 0 || yi < 0 || xi >= map.width || yi >= map.height) return null;
  const value = map.labels[yi * map.width + xi];
  return value < 0 ? null : value;
}

/** Canvas-space point -> image coordinates under the current zoom/pan. */
export function canvasToImage(
  px: number,
  py: number,
  zoom: number,
  panX: number,
  panY: number,
): [number, number] {
  return [(px - panX) / zoom, (py - panY) / zoom];
}
