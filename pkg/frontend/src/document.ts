import { z } from "zod";

import type { Point } from "./geometry.js";

export type Rgb = [number, number, number]; // 8-bit channels

export interface TextureEdge {
  points: Point[];
  left: Rgb[];
  right: Rgb[];
}

export type Mode = "pure" | "sparse" | "dense";

/** The JSON shape the service accepts at /v1/synthesize and the CLI reads.
 * Strokes are vector polylines; the server rasterizes them at submit time. */
export interface DesignDocument {
  canvas: { w: number; h: number };
  mode: Mode;
  seed: number;
  contour_layer: { strokes: Point[][] };
  texture_layer: {
    canvas: { w: number; h: number };
    edges: TextureEdge[];
  };
  shading_layer: { strokes: Point[][] };
  dense_patch: string | null;
  palette: Rgb[];
}

const channel = z.number().int().min(0).max(255);
const rgb = z.tuple([channel, channel, channel]);
const point = z.tuple([z.number().finite(), z.number().finite()]);

const edge = z
  .object({
    points: z.array(point).min(2),
    left: z.array(rgb),
    right: z.array(rgb),
  })
  .refine(
    (e) => e.left.length === e.points.length && e.right.length === e.points.length,
    { message: "edge colors must match point count" },
  );

const canvasDims = z.object({
  w: z.number().int().min(1).max(4096),
  h: z.number().int().min(1).max(4096),
});

function strokesInCanvas(w: number, h: number) {
  return (layer: { strokes: Point[][] }) =>
    layer.strokes.every((s) =>
      s.every(([x, y]) => x >= 0 && x <= w - 1 && y >= 0 && y <= h - 1),
    );
}

export const designDocumentSchema = z
  .object({
    canvas: canvasDims,
    mode: z.enum(["pure", "sparse", "dense"]),
    seed: z.number().int().min(0),
    contour_layer: z.object({ strokes: z.array(z.array(point).min(1)) }),
    texture_layer: z.object({ canvas: canvasDims, edges: z.array(edge) }),
    shading_layer: z.object({ strokes: z.array(z.array(point).min(1)) }),
    dense_patch: z.string().nullable(),
    palette: z.array(rgb),
  })
  .superRefine((doc, ctx) => {
    const { w, h } = doc.canvas;
    if (doc.texture_layer.canvas.w !== w || doc.texture_layer.canvas.h !== h) {
      ctx.addIssue({ code: "custom", message: "texture canvas must match document canvas", path: ["texture_layer", "canvas"] });
    }
    if (!strokesInCanvas(w, h)(doc.contour_layer)) {
      ctx.addIssue({ code: "custom", message: "stroke point outside canvas", path: ["contour_layer"] });
    }
    if (!strokesInCanvas(w, h)(doc.shading_layer)) {
      ctx.addIssue({ code: "custom", message: "stroke point outside canvas", path: ["shading_layer"] });
    }
    if (doc.mode === "dense" && doc.dense_patch === null) {
      ctx.addIssue({ code: "custom", message: "dense mode requires dense_patch", path: ["dense_patch"] });
    }
  });

export function parseDesignDocument(data: unknown): DesignDocument {
  return designDocumentSchema.parse(data) as DesignDocument;
}

export function sameColor(a: Rgb, b: Rgb): boolean {
  return a[0] === b[0] && a[1] === b[1] && a[2] === b[2];
}

/** Distinct colors over all edge flanks, lexicographically sorted. This is
 * the palette corner: it must list exactly the colors present in the layer. */
export function colorsInUse(edges: TextureEdge[]): Rgb[] {
  const seen = new Map<string, Rgb>();
  for (const e of edges) {
    for (const side of [e.left, e.right]) {
      for (const c of side) seen.set(c.join(","), c);
    }
  }
  return [...seen.values()].sort(
    (a, b) => a[0] - b[0] || a[1] - b[1] || a[2] - b[2],
  );
}
