/**
 * Scripted studio loop against a live server (acceptance criterion for the
 * studio): create a project, upload 5 frames, segment, fill every reference
 * segment (through real hit-testing on the decoded label map), propagate
 * horizon 4, correct one segment on frame 2, re-propagate from frame 2, and
 * check the server kept the human correction while recomputing frames 3-4.
 *
 * No browser binaries exist in this sandbox, so the test drives the same
 * controller/state/hit-test modules the DOM layer calls.
 */

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { StudioController } from "../src/controller.js";

const exec = promisify(execFile);
const PORT = 8900 + Math.floor(Math.random() * 90);
const BASE = `http://127.0.0.1:${PORT}`;

const BOOTSTRAP = `
import sys, torch
from pathlib import Path
from segmatch.model import ModelConfig, SegmentMatcher
from segmatch.training import save_checkpoint
from segmatch.datagen import SceneSpec, ShapeSpec, MotionRanges, generate_sequence
from segmatch.imageio import write_line_image

out = Path(sys.argv[1])
torch.manual_seed(0)
cfg = ModelConfig(feature_dim=16, layers=2, heads=2, crop_size=32, dropout=0.0,
                  backbone_widths=(4, 8))
save_checkpoint(out / "model.ckpt", SegmentMatcher(cfg))
spec = SceneSpec(
    seed=5,
    shapes=(ShapeSpec(kind="ellipse", size=(14.0, 10.0)),
            ShapeSpec(kind="capsule", size=(10.0, 4.0))),
    motion=MotionRanges(translate_x=(2.0, 2.0), translate_y=(1.0, 1.0)),
    resolution=96, frames=5,
)
seq = generate_sequence(spec)
for t, frame in enumerate(seq.frames):
    write_line_image(frame.image, out / f"frame{t}.png")
print("ok")
`;

let workDir: string;
let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 200; i++) {
    try {
      const r = await fetch(`${BASE}/api/projects/nope`);
      if (r.status === 404) return;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }
  throw new Error("server did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "studio-flow-"));
  const { stdout } = await exec("python3", ["-c", BOOTSTRAP, workDir], { timeout: 120_000 });
  expect(stdout.trim()).toBe("ok");
  server = spawn(
    "python3",
    ["-m", "segmatch.interface.cli", "serve",
     "--ckpt", join(workDir, "model.ckpt"),
     "--store", join(workDir, "store"),
     "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 180_000);

afterAll(() => {
  server?.kill();
});

describe("studio loop", () => {
  it("fill -> propagate -> correct -> re-propagate keeps human labels", async () => {
    const api = new ApiClient(BASE);
    const studio = new StudioController(api);
    await studio.init();

    // upload 5 frames in order
    for (let t = 0; t < 5; t++) {
      const png = readFileSync(join(workDir, `frame${t}.png`));
      const index = await studio.uploadFrame(png.buffer.slice(png.byteOffset, png.byteOffset + png.byteLength));
      expect(index).toBe(t);
    }
    expect(studio.project.frame_count).toBe(5);

    // segment the reference frame and fill every segment by clicking its
    // centroid (real hit-testing against the decoded 16-bit label map)
    const segments = await studio.ensureSegmented(0);
    expect(segments.length).toBeGreaterThanOrEqual(3);
    const classes = [...studio.state.palette.keys()];
    for (const seg of segments) {
      studio.state.selectClass(classes[seg.index % classes.length]);
      const hit = studio.clickAt(seg.centroid[0], seg.centroid[1]);
      expect(hit).toBe(seg.index);
    }
    expect(studio.state.canPropagate).toBe(false); // staged edits gate it
    const commit = await studio.commitPending(0);
    expect(commit.ok).toBe(true);
    expect(studio.fullyLabeled(0)).toBe(true);
    expect(studio.state.canPropagate).toBe(true);

    // propagate across the sequence
    const seen: number[] = [];
    const touched = await studio.propagate(0, 4, (f) => seen.push(f));
    expect(touched).toEqual([1, 2, 3, 4]);
    expect(seen).toEqual(touched);
    for (const f of [1, 2, 3, 4]) {
      const labels = studio.labelsFor(f);
      expect(Object.keys(labels).length).toBeGreaterThan(0);
      for (const entry of Object.values(labels)) {
        expect(entry.source).toBe("propagated");
      }
    }

    // correct one segment on frame 2 to a different class than predicted
    studio.state.frame = 2;
    const frame2segs = await studio.ensureSegmented(2);
    const target = frame2segs[0];
    const before = studio.labelsFor(2)[String(target.index)];
    const corrected = classes.find((c) => c !== before.class)!;
    studio.state.selectClass(corrected);
    expect(studio.clickAt(target.centroid[0], target.centroid[1])).toBe(target.index);
    const fix = await studio.commitPending(2);
    expect(fix.ok).toBe(true);
    expect(studio.labelsFor(2)[String(target.index)]).toMatchObject({
      class: corrected,
      source: "human",
    });

    // re-propagate from the corrected frame; downstream recomputed
    const frame34Before = [studio.labelsFor(3), studio.labelsFor(4)];
    const revBefore = studio.project.revision;
    const touched2 = await studio.propagate(2, 2);
    expect(touched2).toEqual([3, 4]);
    expect(studio.project.revision).toBeGreaterThan(revBefore);

    // server state: the frame-2 correction survived re-propagation...
    const fresh = await api.getProject(studio.project.id);
    expect(fresh.labels["2"][String(target.index)]).toMatchObject({
      class: corrected,
      source: "human",
    });
    // ...and frames 3-4 carry fresh propagated labels for every segment
    for (const f of [3, 4]) {
      const table = fresh.labels[String(f)];
      const segs = await studio.ensureSegmented(f);
      expect(Object.keys(table).length).toBe(segs.length);
      for (const entry of Object.values(table)) {
        expect(entry.source).toBe("propagated");
        expect(entry.confidence).not.toBeNull();
      }
    }
    expect(frame34Before[0]).toBeTruthy(); // both propagations produced labels

    // refresh-safety: a second controller reconstructs identical state
    const studio2 = new StudioController(api);
    await studio2.init(studio.project.id);
    expect(studio2.project).toEqual(fresh);
  }, 120_000);
});
