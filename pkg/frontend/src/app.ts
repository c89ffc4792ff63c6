import { makeClient, ApiError } from "./client.js";
import { chainNormals, isClosed } from "./geometry.js";
import type { Point } from "./geometry.js";
import type { Rgb } from "./document.js";
import {
  initialState,
  paletteCorner,
  reduce,
  serializeDocument,
} from "./state.js";
import type { Action, EditorState, Layer, Tool } from "./state.js";

const CANVAS = 512;

const client = makeClient((window as { SERVICE_URL?: string }).SERVICE_URL ?? "http://127.0.0.1:8000");

let state: EditorState = initialState(CANVAS, CANVAS);

function dispatch(action: Action) {
  state = reduce(state, action);
  render();
}

document.body.innerHTML = `
  <div id="bar"></div>
  <div style="display:flex;gap:12px">
    <div style="position:relative">
      <canvas id="sketch" width="${CANVAS}" height="${CANVAS}" style="border:1px solid #888"></canvas>
      <div id="palette" style="position:absolute;top:4px;right:4px;display:flex;gap:4px"></div>
    </div>
    <img id="preview" width="${CANVAS}" height="${CANVAS}" style="border:1px solid #888" alt="synthesis preview">
  </div>
  <div id="notice" style="color:#b00;min-height:1.2em"></div>
`;

const sketch = document.getElementById("sketch") as HTMLCanvasElement;
const ctx = sketch.getContext("2d")!;
const bar = document.getElementById("bar")!;
const paletteDiv = document.getElementById("palette")!;
const preview = document.getElementById("preview") as HTMLImageElement;
const noticeDiv = document.getElementById("notice")!;

function button(label: string, onClick: () => void) {
  const b = document.createElement("button");
  b.textContent = label;
  b.addEventListener("click", onClick);
  bar.append(b);
  return b;
}

for (const tool of ["contour", "texture", "shading", "eraser"] as Tool[]) {
  button(tool, () => dispatch({ type: "select-tool", tool }));
}
for (const mode of ["pure", "sparse", "dense"] as const) {
  button(mode, () => dispatch({ type: "select-mode", mode }));
}
button("2-string", () => pickBrush("2-string", 2));
button("4-string", () => pickBrush("4-string", 2));
button("undo", () => dispatch({ type: "undo" }));
button("redo", () => dispatch({ type: "redo" }));
button("synthesize", () => synthesizeNow());
button("export", () => exportDocument());

function parseHex(text: string | null): Rgb | null {
  if (!text) return null;
  const m = /^#?([0-9a-f]{6})$/i.exec(text.trim());
  if (!m) return null;
  const v = parseInt(m[1]!, 16);
  return [(v >> 16) & 255, (v >> 8) & 255, v & 255];
}

function pickBrush(kind: "2-string" | "4-string", count: number) {
  const colors: Rgb[] = [];
  for (let i = 0; i < count; i++) {
    const c = parseHex(prompt(`${kind} color ${i + 1} (hex)`));
    if (!c) return;
    colors.push(c);
  }
  dispatch({ type: "set-brush", brush: { kind, colors, spacing: 6 } });
  dispatch({ type: "select-tool", tool: "texture" });
}

// pointer capture: one polyline per drag
let current: Point[] | null = null;

sketch.addEventListener("pointerdown", (e) => {
  current = [[e.offsetX, e.offsetY]];
});
sketch.addEventListener("pointermove", (e) => {
  if (current) current.push([e.offsetX, e.offsetY]);
});
sketch.addEventListener("pointerup", () => {
  if (!current) return;
  if (state.tool === "eraser") {
    eraseNear(current[current.length - 1]!);
  } else {
    dispatch({ type: "draw", path: current });
  }
  current = null;
});

function eraseNear([x, y]: Point) {
  // hit test against every stroke/edge; remove the closest within 8 px
  let best: { layer: Layer; index: number; d: number } | null = null;
  const consider = (layer: Layer, index: number, pts: Point[]) => {
    for (const [px, py] of pts) {
      const d = Math.hypot(px - x, py - y);
      if (d <= 8 && (best === null || d < best.d)) best = { layer, index, d };
    }
  };
  state.doc.contourStrokes.forEach((s, i) => consider("contour", i, s));
  state.doc.shadingStrokes.forEach((s, i) => consider("shading", i, s));
  state.doc.textureEdges.forEach((e, i) => consider("texture", i, e.points));
  if (best !== null) {
    const hit = best as { layer: Layer; index: number };
    dispatch({ type: "erase", layer: hit.layer, index: hit.index });
  }
}

let requested = false;

async function synthesizeNow() {
  if (requested) return; // superseding handled inside the client
  requested = true;
  try {
    const result = await client.synthesizeLatest(serializeDocument(state.doc));
    if (result) dispatch({ type: "synthesized", result });
  } catch (err) {
    const msg =
      err instanceof ApiError && err.status === 422
        ? `contour is not closed: ${err.detail}`
        : String(err);
    noticeDiv.textContent = msg;
  } finally {
    requested = false;
  }
}

function exportDocument() {
  const blob = new Blob([JSON.stringify(serializeDocument(state.doc), null, 2)], {
    type: "application/json",
  });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "design.json";
  a.click();
}

function polyline(pts: Point[]) {
  ctx.beginPath();
  ctx.moveTo(pts[0]![0], pts[0]![1]);
  for (const [x, y] of pts) ctx.lineTo(x, y);
  ctx.stroke();
}

function render() {
  ctx.clearRect(0, 0, CANVAS, CANVAS);

  ctx.strokeStyle = "#000";
  ctx.lineWidth = 1.5;
  for (const s of state.doc.contourStrokes) polyline(s);

  ctx.strokeStyle = "#999";
  ctx.setLineDash([4, 3]);
  for (const s of state.doc.shadingStrokes) polyline(s);
  ctx.setLineDash([]);

  // double-line texture preview: left color at +normal, right at -normal
  for (const e of state.doc.textureEdges) {
    const normals = chainNormals(e.points, isClosed(e.points));
    for (const [side, colors] of [[1, e.left], [-1, e.right]] as const) {
      ctx.beginPath();
      for (let i = 0; i + 1 < e.points.length; i++) {
        const n = normals[i]!;
        const [ax, ay] = e.points[i]!;
        const [bx, by] = e.points[i + 1]!;
        ctx.moveTo(ax + side * n[0], ay + side * n[1]);
        ctx.lineTo(bx + side * n[0], by + side * n[1]);
      }
      ctx.strokeStyle = `rgb(${colors[0]!.join(",")})`;
      ctx.stroke();
    }
  }

  paletteDiv.replaceChildren();
  for (const color of paletteCorner(state.doc)) {
    const sw = document.createElement("button");
    sw.style.cssText = `width:18px;height:18px;background:rgb(${color.join(",")})`;
    sw.title = `recolor ${color.join(",")}`;
    sw.addEventListener("click", () => {
      const to = parseHex(prompt(`replace ${color.join(",")} with (hex)`));
      if (!to) return;
      dispatch({ type: "recolor", from: color, to });
      void synthesizeNow(); // recolor re-requests synthesis
    });
    paletteDiv.append(sw);
  }

  if (state.synthesis) preview.src = `data:image/png;base64,${state.synthesis.image}`;
  noticeDiv.textContent = state.notice ?? "";
}

render();
