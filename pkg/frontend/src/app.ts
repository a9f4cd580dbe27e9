/**
 * Studio UI: fill a reference frame, propagate, review low-confidence
 * segments, correct, re-propagate.
 *
 * Layers on the canvas: the color fill underneath, the line art multiplied
 * on top (ink stays black, paper transparent), then review outlines.
 */

import { ApiClient } from "./api.js";
import { StudioController } from "./controller.js";
import { canvasToImage } from "./hittest.js";
import { lowConfidenceSegments } from "./state.js";

const api = new ApiClient("");
const controller = new StudioController(api);

const el = {
  canvas: document.getElementById("canvas") as HTMLCanvasElement,
  timeline: document.getElementById("timeline") as HTMLDivElement,
  palette: document.getElementById("palette") as HTMLDivElement,
  upload: document.getElementById("upload") as HTMLInputElement,
  segment: document.getElementById("segment-btn") as HTMLButtonElement,
  commit: document.getElementById("commit-btn") as HTMLButtonElement,
  propagate: document.getElementById("propagate-btn") as HTMLButtonElement,
  repropagate: document.getElementById("repropagate-btn") as HTMLButtonElement,
  horizon: document.getElementById("horizon") as HTMLInputElement,
  threshold: document.getElementById("threshold") as HTMLInputElement,
  thresholdValue: document.getElementById("threshold-value") as HTMLSpanElement,
  overlay: document.getElementById("overlay-mode") as HTMLSelectElement,
  status: document.getElementById("status") as HTMLDivElement,
  banner: document.getElementById("banner") as HTMLDivElement,
};

const frameImages = new Map<number, HTMLImageElement>();

function status(text: string) {
  el.status.textContent = text;
}

function banner(text: string, actionLabel?: string, action?: () => void) {
  el.banner.innerHTML = "";
  el.banner.textContent = text;
  if (actionLabel && action) {
    const btn = document.createElement("button");
    btn.textContent = actionLabel;
    btn.onclick = () => {
      el.banner.classList.add("hidden");
      action();
    };
    el.banner.appendChild(btn);
  }
  const close = document.createElement("button");
  close.textContent = "x";
  close.onclick = () => el.banner.classList.add("hidden");
  el.banner.appendChild(close);
  el.banner.classList.remove("hidden");
}

async function frameImage(frame: number): Promise<HTMLImageElement> {
  let img = frameImages.get(frame);
  if (img) return img;
  const bytes = await api.frameImage(controller.project.id, frame);
  img = new Image();
  img.src = URL.createObjectURL(new Blob([bytes], { type: "image/png" }));
  await img.decode();
  frameImages.set(frame, img);
  return img;
}

function classColor(cls: number): [number, number, number] {
  return controller.state.palette.get(cls) ?? [128, 128, 128];
}

function fillLayer(frame: number): HTMLCanvasElement | null {
  const map = controller.labelMaps.get(frame);
  if (!map) return null;
  const labels = controller.labelsFor(frame);
  const staged = controller.state.pendingFor(frame);
  const layer = document.createElement("canvas");
  layer.width = map.width;
  layer.height = map.height;
  const ctx = layer.getContext("2d")!;
  const image = ctx.createImageData(map.width, map.height);
  const confidenceMode = controller.state.overlay === "confidence";
  for (let i = 0; i < map.labels.length; i++) {
    const segment = map.labels[i];
    if (segment < 0) continue;
    const stagedCls = staged.get(segment);
    const entry = labels[String(segment)];
    let rgb: [number, number, number] | null = null;
    if (confidenceMode) {
      const c = entry?.source === "propagated" ? entry.confidence ?? 0 : 1.0;
      const heat = Math.round(255 * (1 - c));
      rgb = [255, 255 - heat, 255 - heat];
    } else if (stagedCls !== undefined) {
      rgb = classColor(stagedCls);
    } else if (entry) {
      rgb = classColor(entry.class);
    }
    if (!rgb) continue;
    image.data[i * 4] = rgb[0];
    image.data[i * 4 + 1] = rgb[1];
    image.data[i * 4 + 2] = rgb[2];
    image.data[i * 4 + 3] = 255;
  }
  ctx.putImageData(image, 0, 0);
  return layer;
}

async function render() {
  const { canvas } = el;
  const ctx = canvas.getContext("2d")!;
  ctx.fillStyle = "#2b2b2b";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (!controller.project || controller.project.frame_count === 0) return;
  const frame = controller.state.frame;
  const img = await frameImage(frame);
  const { zoom, panX, panY } = controller.state;
  ctx.save();
  ctx.translate(panX, panY);
  ctx.scale(zoom, zoom);
  ctx.imageSmoothingEnabled = zoom < 2;
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, img.width, img.height);
  const fills = fillLayer(frame);
  if (fills && controller.state.overlay !== "outlines") ctx.drawImage(fills, 0, 0);
  ctx.globalCompositeOperation = "multiply";
  ctx.drawImage(img, 0, 0);
  ctx.globalCompositeOperation = "source-over";
  drawReviewOutlines(ctx, frame);
  ctx.restore();
}

function drawReviewOutlines(ctx: CanvasRenderingContext2D, frame: number) {
  const segs = controller.segments.get(frame);
  if (!segs) return;
  const flagged = new Set(
    lowConfidenceSegments(controller.labelsFor(frame), controller.state.confidenceThreshold),
  );
  const showAll = controller.state.overlay === "outlines";
  ctx.lineWidth = 1.5 / controller.state.zoom;
  for (const seg of segs) {
    if (!showAll && !flagged.has(seg.index)) continue;
    if (seg.outline.length < 3) continue;
    ctx.strokeStyle = flagged.has(seg.index) ? "#ff3d00" : "#4dd0e1";
    ctx.beginPath();
    ctx.moveTo(seg.outline[0][0], seg.outline[0][1]);
    for (const [x, y] of seg.outline.slice(1)) ctx.lineTo(x, y);
    ctx.closePath();
    ctx.stroke();
  }
}

function renderPalette() {
  el.palette.innerHTML = "";
  for (const [cls, rgb] of controller.state.palette) {
    const swatch = document.createElement("button");
    swatch.className = "swatch" + (cls === controller.state.selectedClass ? " selected" : "");
    swatch.style.background = `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
    swatch.title = `class ${cls}`;
    swatch.onclick = () => {
      controller.state.selectClass(cls);
      renderPalette();
    };
    el.palette.appendChild(swatch);
  }
}

async function renderTimeline() {
  el.timeline.innerHTML = "";
  for (let f = 0; f < controller.project.frame_count; f++) {
    const thumb = document.createElement("canvas");
    thumb.width = 96;
    thumb.height = 96;
    thumb.className = "thumb" + (f === controller.state.frame ? " current" : "");
    thumb.title = `frame ${f}`;
    const ctx = thumb.getContext("2d")!;
    try {
      const img = await frameImage(f);
      const scale = Math.min(96 / img.width, 96 / img.height);
      ctx.fillStyle = "#fff";
      ctx.fillRect(0, 0, 96, 96);
      const fills = fillLayer(f);
      if (fills) ctx.drawImage(fills, 0, 0, fills.width * scale, fills.height * scale);
      ctx.globalCompositeOperation = "multiply";
      ctx.drawImage(img, 0, 0, img.width * scale, img.height * scale);
    } catch {
      ctx.fillStyle = "#444";
      ctx.fillRect(0, 0, 96, 96);
    }
    thumb.onclick = async () => {
      controller.state.frame = f;
      await controller.ensureSegmented(f).catch(() => undefined);
      refreshUi();
    };
    el.timeline.appendChild(thumb);
  }
}

function updateButtons() {
  const labeled = controller.fullyLabeled(controller.state.frame);
  el.propagate.disabled = !controller.state.canPropagate || !labeled;
  el.repropagate.disabled = !controller.state.canPropagate || !labeled;
  el.commit.disabled = controller.state.pendingCount === 0;
  el.commit.textContent =
    controller.state.pendingCount > 0
      ? `Commit ${controller.state.pendingCount} fill(s)`
      : "Commit fills";
}

function refreshUi() {
  renderPalette();
  void renderTimeline();
  void render();
  updateButtons();
}

async function main() {
  const stored = new URLSearchParams(location.search).get("project");
  await controller.init(stored ?? undefined);
  if (!stored) {
    history.replaceState(null, "", `?project=${controller.project.id}`);
  }
  controller.onChange = refreshUi;
  status(`project ${controller.project.id}`);

  el.upload.onchange = async () => {
    for (const file of el.upload.files ?? []) {
      const index = await controller.uploadFrame(await file.arrayBuffer());
      status(`uploaded frame ${index}`);
    }
  };

  el.segment.onclick = async () => {
    const f = controller.state.frame;
    status(`segmenting frame ${f}...`);
    const segs = await controller.ensureSegmented(f);
    status(`frame ${f}: ${segs.length} segments`);
    refreshUi();
  };

  el.canvas.onclick = (event) => {
    const rect = el.canvas.getBoundingClientRect();
    const [x, y] = canvasToImage(
      event.clientX - rect.left, event.clientY - rect.top,
      controller.state.zoom, controller.state.panX, controller.state.panY,
    );
    const segment = controller.clickAt(x, y);
    if (segment === null) {
      status("ink / background: nothing to fill");
      return;
    }
    status(`staged class ${controller.state.selectedClass} on segment ${segment}`);
    refreshUi();
  };

  el.canvas.onwheel = (event) => {
    event.preventDefault();
    const factor = event.deltaY < 0 ? 1.15 : 1 / 1.15;
    controller.state.zoom = Math.min(16, Math.max(0.25, controller.state.zoom * factor));
    void render();
  };

  let dragging: [number, number] | null = null;
  el.canvas.onmousedown = (e) => {
    if (e.button === 1 || e.shiftKey) dragging = [e.clientX, e.clientY];
  };
  window.addEventListener("mouseup", () => (dragging = null));
  window.addEventListener("mousemove", (e) => {
    if (!dragging) return;
    controller.state.panX += e.clientX - dragging[0];
    controller.state.panY += e.clientY - dragging[1];
    dragging = [e.clientX, e.clientY];
    void render();
  });

  const commit = async () => {
    const result = await controller.commitPending();
    if (result.conflict) {
      banner(
        "Someone else changed this project. Reloaded; your staged fills are kept.",
        "Retry commit",
        () => void commit(),
      );
    } else {
      status(`committed (revision ${result.revision})`);
    }
    refreshUi();
  };
  el.commit.onclick = () => void commit();

  const runPropagate = async (reference: number) => {
    const horizon = parseInt(el.horizon.value, 10) || 0;
    status(`propagating from frame ${reference}, horizon ${horizon}...`);
    try {
      const touched = await controller.propagate(reference, horizon, (f) => {
        status(`propagated frame ${f}`);
      });
      status(`propagation done: frames ${touched.join(", ") || "(none)"}`);
    } catch (err) {
      banner(`propagation failed: ${(err as Error).message}`);
    }
    refreshUi();
  };

  el.propagate.onclick = () => void runPropagate(0);
  el.repropagate.onclick = () => void runPropagate(controller.state.frame);

  el.threshold.oninput = () => {
    controller.state.confidenceThreshold = parseFloat(el.threshold.value);
    el.thresholdValue.textContent = el.threshold.value;
    void render();
  };

  el.overlay.onchange = () => {
    controller.state.overlay = el.overlay.value as never;
    void render();
  };

  refreshUi();
}

void main();
