import type { DesignDocument, Rgb } from "./document.js";

export interface SynthesizeResult {
  image: string; // base64 PNG
  shading: string; // base64 16-bit grayscale PNG
  warnings: string[];
}

export interface ExtractResult {
  canvas: { w: number; h: number };
  contour_layer: { strokes: [number, number][][] };
  texture_layer: DesignDocument["texture_layer"];
  contour_png: string;
  bicolor_png: string;
  coverage_png: string;
}

export interface ExpandResult {
  image: string;
  texture_layer: DesignDocument["texture_layer"];
}

export type RecolorMapping =
  | { from: Rgb; to: Rgb }[]
  | { cluster: number; to: Rgb }[];

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

export interface SketchClient {
  health(): Promise<{ status: string }>;
  synthesize(doc: DesignDocument): Promise<SynthesizeResult>;
  /** At most one synthesis counts at a time: a later call supersedes, and a
   * stale response resolves to null instead of overwriting the preview. */
  synthesizeLatest(doc: DesignDocument): Promise<SynthesizeResult | null>;
  extract(imageB64: string): Promise<ExtractResult>;
  expandTexture(patchB64: string, w: number, h: number, seed: number): Promise<ExpandResult>;
  recolorDocument(doc: DesignDocument, mapping: { from: Rgb; to: Rgb }[]): Promise<DesignDocument>;
  recolorImage(imageB64: string, k: number, mapping: { cluster: number; to: Rgb }[]): Promise<string>;
}

export function makeClient(base: string, f: typeof fetch = fetch): SketchClient {
  async function post<T>(path: string, body: unknown): Promise<T> {
    const res = await f(new URL(path, base), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    const payload = await res.json();
    if (!res.ok) {
      const detail = typeof payload?.detail === "string" ? payload.detail : res.statusText;
      throw new ApiError(res.status, detail);
    }
    return payload as T;
  }

  let latest = 0;

  return {
    async health() {
      const res = await f(new URL("/v1/health", base));
      return (await res.json()) as { status: string };
    },
    synthesize(doc) {
      return post<SynthesizeResult>("/v1/synthesize", doc);
    },
    async synthesizeLatest(doc) {
      const id = ++latest;
      const result = await post<SynthesizeResult>("/v1/synthesize", doc);
      return id === latest ? result : null;
    },
    extract(imageB64) {
      return post<ExtractResult>("/v1/extract", { image: imageB64 });
    },
    expandTexture(patchB64, w, h, seed) {
      return post<ExpandResult>("/v1/expand-texture", { patch: patchB64, w, h, seed });
    },
    async recolorDocument(doc, mapping) {
      const out = await post<{ document: DesignDocument }>("/v1/recolor", {
        document: doc,
        mapping,
      });
      return out.document;
    },
    async recolorImage(imageB64, k, mapping) {
      const out = await post<{ image: string }>("/v1/recolor", {
        image: imageB64,
        k,
        mapping,
      });
      return out.image;
    },
  };
}
