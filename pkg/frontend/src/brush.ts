import { chainNormals, clampToCanvas, densify, isClosed } from "./geometry.js";
import type { Point } from "./geometry.js";
import type { Rgb, TextureEdge } from "./document.js";

export type BrushKind = "2-string" | "4-string";

/** 2-string: colors = (left, right). 4-string: colors = (stripe, ground) or
 * (stripe, left ground, right ground). */
export interface BrushSpec {
  kind: BrushKind;
  colors: Rgb[];
  spacing: number;
}

export function brushColorCountOk(brush: BrushSpec): boolean {
  if (brush.kind === "2-string") return brush.colors.length === 2;
  return brush.colors.length === 2 || brush.colors.length === 3;
}

function constant(c: Rgb, n: number): Rgb[] {
  return new Array(n).fill(0).map(() => [c[0], c[1], c[2]]);
}

/** Client-side string brush. A 2-string stroke yields one bi-colored edge;
 * a 4-string stroke yields a pinstripe pair offset +-spacing/2 along the
 * normal, the facing sides carrying the stripe color. */
export function strokeToEdges(
  path: Point[],
  brush: BrushSpec,
  canvas: { w: number; h: number },
): TextureEdge[] {
  if (path.length < 2) throw new Error("texture stroke needs at least 2 points");
  if (!brushColorCountOk(brush)) throw new Error("brush color count is wrong");

  const closed = isClosed(path);
  const dense = densify(path, closed);

  if (brush.kind === "2-string") {
    const pts = clampToCanvas(dense, canvas.w, canvas.h);
    return [
      {
        points: pts,
        left: constant(brush.colors[0]!, pts.length),
        right: constant(brush.colors[1]!, pts.length),
      },
    ];
  }

  const stripe = brush.colors[0]!;
  const groundL = brush.colors[1]!;
  const groundR = brush.colors.length === 3 ? brush.colors[2]! : brush.colors[1]!;
  const normals = chainNormals(dense, closed);
  const half = brush.spacing / 2;
  const edges: TextureEdge[] = [];
  for (const [side, outer] of [[1, groundL], [-1, groundR]] as const) {
    let rail: Point[] = dense.map((p, i) => [
      p[0] + side * half * normals[i]![0],
      p[1] + side * half * normals[i]![1],
    ]);
    rail = clampToCanvas(densify(rail, closed), canvas.w, canvas.h);
    edges.push({
      points: rail,
      left: constant(side > 0 ? outer : stripe, rail.length),
      right: constant(side > 0 ? stripe : outer, rail.length),
    });
  }
  return edges;
}
