/**
 * Canvas-side state: selection, staged fills, overlay mode.
 *
 * Fills are staged locally for instant feedback and committed in one PUT;
 * the same segment clicked twice keeps only the last color. Propagation is
 * gated on an empty staging area so the server never races local edits.
 */

import type { LabelEntry } from "./api.js";

export type OverlayMode = "colors" | "confidence" | "outlines";

export class CanvasState {
  frame = 0;
  zoom = 1;
  panX = 0;
  panY = 0;
  overlay: OverlayMode = "colors";
  confidenceThreshold = 0.9;
  hoverSegment: number | null = null;
  private selected: number;
  /** segment -> staged class, per frame */
  private pending = new Map<number, Map<number, number>>();

  constructor(public palette: Map<number, [number, number, number]>) {
    if (palette.size === 0) throw new Error("palette must not be empty");
    this.selected = [...palette.keys()].sort((a, b) => a - b)[0];
  }

  get selectedClass(): number {
    return this.selected;
  }

  /** Selecting a class outside the palette is ignored (invariant). */
  selectClass(cls: number): boolean {
    if (!this.palette.has(cls)) return false;
    this.selected = cls;
    return true;
  }

  setPalette(palette: Map<number, [number, number, number]>): void {
    this.palette = palette;
    if (!palette.has(this.selected)) {
      this.selected = [...palette.keys()].sort((a, b) => a - b)[0];
    }
  }

  /** Stage a fill for a segment; ink clicks (null/-1) are a no-op. */
  stageFill(segment: number | null): boolean {
    if (segment === null || segment < 0) return false;
    let frameEdits = this.pending.get(this.frame);
    if (!frameEdits) {
      frameEdits = new Map();
      this.pending.set(this.frame, frameEdits);
    }
    frameEdits.set(segment, this.selected); // last color wins
    return true;
  }

  pendingFor(frame: number): Map<number, number> {
    return this.pending.get(frame) ?? new Map();
  }

  pendingAssignments(frame: number): { segment: number; class: number }[] {
    return [...this.pendingFor(frame).entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([segment, cls]) => ({ segment, class: cls }));
  }

  get pendingCount(): number {
    let n = 0;
    for (const edits of this.pending.values()) n += edits.size;
    return n;
  }

  clearPending(frame?: number): void {
    if (frame === undefined) this.pending.clear();
    else this.pending.delete(frame);
  }

  /** Propagation is enabled only once every staged edit is flushed. */
  get canPropagate(): boolean {
    return this.pendingCount === 0;
  }
}

/**
 * Segments to outline for review: every propagated segment whose confidence
 * does not exceed the threshold (so a threshold of 1.0 flags them all).
 * Human-sourced labels are never flagged.
 */
export function lowConfidenceSegments(
  labels: Record<string, LabelEntry> | undefined,
  threshold: number,
): number[] {
  if (!labels) return [];
  const out: number[] = [];
  for (const [segment, entry] of Object.entries(labels)) {
    if (entry.source !== "propagated") continue;
    const confidence = entry.confidence ?? 0;
    if (confidence <= threshold) out.push(Number(segment));
  }
  return out.sort((a, b) => a - b);
}
