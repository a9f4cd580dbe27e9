/**
 * Orchestration between the canvas state and the server.
 *
 * All displayed state is reconstructible from the server: refresh() refetches
 * the project, and every committed fill carries the revision it was staged
 * against (409 surfaces as a reload-and-merge prompt, keeping the staged
 * edits so the user can retry against the fresh revision).
 */

import { ApiClient, ProjectState, RevisionConflict, SegmentInfo } from "./api.js";
import { segmentAt } from "./hittest.js";
import { decodeLabelMap, LabelMap } from "./png16.js";
import { CanvasState } from "./state.js";

export interface CommitResult {
  ok: boolean;
  conflict?: boolean;
  revision: number;
}

export class StudioController {
  project!: ProjectState;
  state!: CanvasState;
  labelMaps = new Map<number, LabelMap>();
  segments = new Map<number, SegmentInfo[]>();
  onChange: () => void = () => {};

  constructor(public api: ApiClient) {}

  async init(projectId?: string): Promise<void> {
    const id = projectId ?? (await this.api.createProject()).id;
    this.project = await this.api.getProject(id);
    this.state = new CanvasState(this.paletteMap());
    this.onChange();
  }

  paletteMap(): Map<number, [number, number, number]> {
    const entries = Object.entries(this.project.palette).map(
      ([k, rgb]) => [Number(k), rgb] as [number, [number, number, number]],
    );
    return new Map(entries.sort((a, b) => a[0] - b[0]));
  }

  async refresh(): Promise<void> {
    this.project = await this.api.getProject(this.project.id);
    this.state.setPalette(this.paletteMap());
    this.onChange();
  }

  async uploadFrame(png: ArrayBuffer | Uint8Array): Promise<number> {
    const { frame_index } = await this.api.uploadFrame(this.project.id, png);
    await this.refresh();
    return frame_index;
  }

  async ensureSegmented(frame: number): Promise<SegmentInfo[]> {
    let segs = this.segments.get(frame);
    if (!segs) {
      const payload = await this.api.segmentFrame(this.project.id, frame);
      segs = payload.segments;
      this.segments.set(frame, segs);
    }
    if (!this.labelMaps.has(frame)) {
      const bytes = await this.api.labelMapBytes(this.project.id, frame);
      this.labelMaps.set(frame, await decodeLabelMap(bytes));
    }
    return segs;
  }

  /** Stage a fill at image coordinates; returns the segment hit, if any. */
  clickAt(x: number, y: number): number | null {
    const map = this.labelMaps.get(this.state.frame);
    if (!map) return null;
    const segment = segmentAt(map, x, y);
    if (segment === null) return null;
    return this.state.stageFill(segment) ? segment : null;
  }

  /** Push the staged fills for the current frame in one PUT. */
  async commitPending(frame?: number): Promise<CommitResult> {
    const target = frame ?? this.state.frame;
    const assignments = this.state.pendingAssignments(target);
    if (assignments.length === 0) {
      return { ok: true, revision: this.project.revision };
    }
    try {
      const { revision } = await this.api.putLabels(
        this.project.id, target, assignments, this.project.revision,
      );
      this.state.clearPending(target);
      await this.refresh();
      return { ok: true, revision };
    } catch (err) {
      if (err instanceof RevisionConflict) {
        await this.refresh(); // staged edits survive for the merge prompt
        return { ok: false, conflict: true, revision: err.serverRevision };
      }
      throw err;
    }
  }

  labelsFor(frame: number) {
    return this.project.labels[String(frame)] ?? {};
  }

  /** Every segment of the frame has an assignment. */
  fullyLabeled(frame: number): boolean {
    const segs = this.segments.get(frame);
    if (!segs) return false;
    const labels = this.labelsFor(frame);
    return segs.every((s) => labels[String(s.index)] !== undefined);
  }

  /**
   * Propagate from a reference frame. Per-frame results go through the
   * callback as they are applied so thumbnails update progressively; state
   * already applied is kept if a later frame fails.
   */
  async propagate(
    referenceFrame: number,
    horizon: number,
    onFrame?: (frame: number) => void,
  ): Promise<number[]> {
    if (!this.state.canPropagate) {
      throw new Error("staged edits must be committed before propagating");
    }
    const { frames } = await this.api.propagate(this.project.id, referenceFrame, horizon);
    const touched: number[] = [];
    for (const result of frames) {
      touched.push(result.frame);
      onFrame?.(result.frame);
    }
    await this.refresh();
    return touched;
  }
}
