import { brushColorCountOk, strokeToEdges } from "./brush.js";
import type { BrushSpec } from "./brush.js";
import { clampToCanvas } from "./geometry.js";
import type { Point } from "./geometry.js";
import { colorsInUse, designDocumentSchema, sameColor } from "./document.js";
import type { DesignDocument, Mode, Rgb, TextureEdge } from "./document.js";

export type Tool = "contour" | "texture" | "shading" | "eraser";
export type Layer = "contour" | "texture" | "shading";

/** The undoable document substate: everything that serializes to a
 * DesignDocument. Tool choice, notices and synthesis results live outside
 * it, so undo never touches them. */
export interface DocState {
  canvas: { w: number; h: number };
  mode: Mode;
  seed: number;
  contourStrokes: Point[][];
  shadingStrokes: Point[][];
  textureEdges: TextureEdge[];
  densePatch: string | null;
}

export interface SynthesisView {
  image: string;
  shading: string;
  warnings: string[];
}

export interface EditorState {
  doc: DocState;
  past: DocState[];
  future: DocState[];
  tool: Tool;
  brush: BrushSpec;
  notice: string | null;
  synthesis: SynthesisView | null;
}

export type Action =
  | { type: "select-tool"; tool: Tool }
  | { type: "select-mode"; mode: Mode }
  | { type: "set-brush"; brush: BrushSpec }
  | { type: "set-seed"; seed: number }
  | { type: "draw"; path: Point[] }
  | { type: "erase"; layer: Layer; index: number }
  | { type: "recolor"; from: Rgb; to: Rgb }
  | { type: "set-dense-patch"; png: string | null }
  | { type: "import-document"; data: unknown }
  | { type: "synthesized"; result: SynthesisView }
  | { type: "undo" }
  | { type: "redo" };

export function initialState(w = 512, h = 512): EditorState {
  return {
    doc: {
      canvas: { w, h },
      mode: "sparse",
      seed: 0,
      contourStrokes: [],
      shadingStrokes: [],
      textureEdges: [],
      densePatch: null,
    },
    past: [],
    future: [],
    tool: "contour",
    brush: { kind: "2-string", colors: [], spacing: 6 },
    notice: null,
    synthesis: null,
  };
}

export function paletteCorner(doc: DocState): Rgb[] {
  return colorsInUse(doc.textureEdges);
}

export function serializeDocument(doc: DocState): DesignDocument {
  return {
    canvas: { w: doc.canvas.w, h: doc.canvas.h },
    mode: doc.mode,
    seed: doc.seed,
    contour_layer: { strokes: doc.contourStrokes },
    texture_layer: {
      canvas: { w: doc.canvas.w, h: doc.canvas.h },
      edges: doc.textureEdges,
    },
    shading_layer: { strokes: doc.shadingStrokes },
    dense_patch: doc.densePatch,
    palette: paletteCorner(doc),
  };
}

function docFromDocument(json: DesignDocument): DocState {
  return {
    canvas: { ...json.canvas },
    mode: json.mode,
    seed: json.seed,
    contourStrokes: json.contour_layer.strokes,
    shadingStrokes: json.shading_layer.strokes,
    textureEdges: json.texture_layer.edges,
    densePatch: json.dense_patch,
  };
}

function withNotice(state: EditorState, notice: string): EditorState {
  return { ...state, notice };
}

/** Commit a document change: push the old snapshot, drop the redo branch. */
function commit(state: EditorState, doc: DocState, notice: string | null = null): EditorState {
  return {
    ...state,
    doc,
    past: [...state.past, state.doc],
    future: [],
    notice,
  };
}

function applyDraw(state: EditorState, path: Point[]): EditorState {
  const { doc, tool, brush } = state;
  const { w, h } = doc.canvas;
  if (path.length < 1) return withNotice(state, "empty stroke");
  const clamped = clampToCanvas(path, w, h);

  if (tool === "contour") {
    return commit(state, { ...doc, contourStrokes: [...doc.contourStrokes, clamped] });
  }
  if (tool === "shading") {
    return commit(state, { ...doc, shadingStrokes: [...doc.shadingStrokes, clamped] });
  }
  if (tool === "texture") {
    if (!brushColorCountOk(brush)) {
      return withNotice(state, "pick brush colors before drawing texture");
    }
    if (clamped.length < 2) {
      return withNotice(state, "texture stroke needs at least 2 points");
    }
    const edges = strokeToEdges(clamped, brush, doc.canvas);
    return commit(state, { ...doc, textureEdges: [...doc.textureEdges, ...edges] });
  }
  return withNotice(state, "select a drawing tool first");
}

function applyErase(state: EditorState, layer: Layer, index: number): EditorState {
  const doc = state.doc;
  const lists: Record<Layer, readonly unknown[]> = {
    contour: doc.contourStrokes,
    texture: doc.textureEdges,
    shading: doc.shadingStrokes,
  };
  if (index < 0 || index >= lists[layer].length) {
    return withNotice(state, `nothing to erase at ${layer}[${index}]`);
  }
  const drop = <T>(xs: T[]): T[] => xs.filter((_, i) => i !== index);
  if (layer === "contour") {
    return commit(state, { ...doc, contourStrokes: drop(doc.contourStrokes) });
  }
  if (layer === "shading") {
    return commit(state, { ...doc, shadingStrokes: drop(doc.shadingStrokes) });
  }
  return commit(state, { ...doc, textureEdges: drop(doc.textureEdges) });
}

function applyRecolor(state: EditorState, from: Rgb, to: Rgb): EditorState {
  const palette = paletteCorner(state.doc);
  if (!palette.some((c) => sameColor(c, from))) {
    return withNotice(state, `color ${from.join(",")} is not in the palette`);
  }
  if (sameColor(from, to)) return withNotice(state, "recolor is a no-op");
  const swap = (c: Rgb): Rgb => (sameColor(c, from) ? [to[0], to[1], to[2]] : c);
  const edges = state.doc.textureEdges.map((e) => ({
    points: e.points,
    left: e.left.map(swap),
    right: e.right.map(swap),
  }));
  return commit(state, { ...state.doc, textureEdges: edges });
}

export function reduce(state: EditorState, action: Action): EditorState {
  switch (action.type) {
    case "select-tool":
      return { ...state, tool: action.tool, notice: null };
    case "set-brush":
      return { ...state, brush: action.brush, notice: null };
    case "select-mode":
      if (action.mode === state.doc.mode) return state;
      if (action.mode === "dense" && state.doc.densePatch === null) {
        return withNotice(state, "dense mode needs a texture patch first");
      }
      return commit(state, { ...state.doc, mode: action.mode });
    case "set-seed":
      if (!Number.isInteger(action.seed) || action.seed < 0) {
        return withNotice(state, "seed must be a non-negative integer");
      }
      if (action.seed === state.doc.seed) return state;
      return commit(state, { ...state.doc, seed: action.seed });
    case "draw":
      return applyDraw(state, action.path);
    case "erase":
      return applyErase(state, action.layer, action.index);
    case "recolor":
      return applyRecolor(state, action.from, action.to);
    case "set-dense-patch":
      if (action.png === null && state.doc.mode === "dense") {
        return withNotice(state, "cannot drop the patch while in dense mode");
      }
      if (action.png === state.doc.densePatch) return state;
      return commit(state, { ...state.doc, densePatch: action.png });
    case "import-document": {
      const parsed = designDocumentSchema.safeParse(action.data);
      if (!parsed.success) {
        return withNotice(state, `import rejected: ${parsed.error.issues[0]?.message}`);
      }
      return commit(state, docFromDocument(parsed.data as DesignDocument));
    }
    case "synthesized":
      return { ...state, synthesis: action.result, notice: null };
    case "undo": {
      const prev = state.past[state.past.length - 1];
      if (prev === undefined) return withNotice(state, "nothing to undo");
      return {
        ...state,
        doc: prev,
        past: state.past.slice(0, -1),
        future: [state.doc, ...state.future],
        notice: null,
      };
    }
    case "redo": {
      const next = state.future[0];
      if (next === undefined) return withNotice(state, "nothing to redo");
      return {
        ...state,
        doc: next,
        past: [...state.past, state.doc],
        future: state.future.slice(1),
        notice: null,
      };
    }
    default: {
      // exhaustive for TS callers; plain JS can still hand us garbage
      const unreachable: never = action;
      void unreachable;
      return withNotice(state, "unknown action");
    }
  }
}
