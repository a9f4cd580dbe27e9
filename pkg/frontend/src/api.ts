/** Typed client over the studio HTTP API. */

export interface SegmentInfo {
  index: number;
  bbox: [number, number, number, number];
  area: number;
  centroid: [number, number];
  outline: number[][];
}

export interface LabelEntry {
  class: number;
  source: "human" | "propagated" | "ground-truth";
  confidence: number | null;
}

/** frame index (as string) -> segment index (as string) -> entry */
export type LabelTable = Record<string, Record<string, LabelEntry>>;

export interface ProjectState {
  id: string;
  revision: number;
  frame_count: number;
  palette: Record<string, [number, number, number]>;
  labels: LabelTable;
  segmented: number[];
}

export interface PropagatedFrame {
  frame: number;
  labels: number[];
  confidence: number[];
  source: string;
  human_overrides: number[];
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class RevisionConflict extends ApiError {
  constructor(public serverRevision: number) {
    super(409, "revision conflict");
  }
}

async function errorOf(response: Response): Promise<string> {
  try {
    const body = await response.json();
    return body.error ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

export class ApiClient {
  constructor(public base: string = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    if (!response.ok) throw new ApiError(response.status, await errorOf(response));
    return (await response.json()) as T;
  }

  createProject(): Promise<{ id: string; revision: number }> {
    return this.json("/api/projects", { method: "POST" });
  }

  getProject(id: string): Promise<ProjectState> {
    return this.json(`/api/projects/${id}`);
  }

  uploadFrame(id: string, png: ArrayBuffer | Uint8Array): Promise<{ frame_index: number }> {
    return this.json(`/api/projects/${id}/frames`, {
      method: "POST",
      headers: { "content-type": "image/png" },
      body: png as BodyInit,
    });
  }

  segmentFrame(id: string, n: number): Promise<{ frame: number; segment_count: number; segments: SegmentInfo[] }> {
    return this.json(`/api/projects/${id}/frames/${n}/segment`, { method: "POST" });
  }

  async frameImage(id: string, n: number): Promise<ArrayBuffer> {
    const response = await fetch(`${this.base}/api/projects/${id}/frames/${n}`);
    if (!response.ok) throw new ApiError(response.status, await errorOf(response));
    return response.arrayBuffer();
  }

  async labelMapBytes(id: string, n: number): Promise<ArrayBuffer> {
    const response = await fetch(`${this.base}/api/projects/${id}/frames/${n}/labelmap`);
    if (!response.ok) throw new ApiError(response.status, await errorOf(response));
    return response.arrayBuffer();
  }

  async putLabels(
    id: string,
    n: number,
    assignments: { segment: number; class: number }[],
    revision: number,
  ): Promise<{ revision: number }> {
    const response = await fetch(`${this.base}/api/projects/${id}/frames/${n}/labels`, {
      method: "PUT",
      headers: { "content-type": "application/json", "If-Match": String(revision) },
      body: JSON.stringify({ assignments, source: "human" }),
    });
    if (response.status === 409) {
      const body = await response.json();
      throw new RevisionConflict(body.revision);
    }
    if (!response.ok) throw new ApiError(response.status, await errorOf(response));
    return response.json();
  }

  propagate(
    id: string,
    referenceFrame: number,
    horizon: number,
  ): Promise<{ frames: PropagatedFrame[]; revision?: number }> {
    return this.json(`/api/projects/${id}/propagate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ reference_frame: referenceFrame, horizon }),
    });
  }

  attention(id: string, n: number, layer: number, head: number) {
    return this.json<{ maps: { kind: string; weights: number[][] }[] }>(
      `/api/projects/${id}/frames/${n}/attention?layer=${layer}&head=${head}`,
    );
  }
}
