export type Point = [number, number];

export function isClosed(pts: Point[]): boolean {
  if (pts.length < 3) return false;
  const a = pts[0]!;
  const b = pts[pts.length - 1]!;
  return a[0] === b[0] && a[1] === b[1];
}

/** Resample a polyline at <= 1 px steps, keeping the duplicate endpoint of
 * closed strokes. Matches the server's densification so previews line up. */
export function densify(pts: Point[], closed: boolean): Point[] {
  const out: Point[] = [pts[0]!];
  for (let i = 0; i + 1 < pts.length; i++) {
    const [ax, ay] = pts[i]!;
    const [bx, by] = pts[i + 1]!;
    const dist = Math.hypot(bx - ax, by - ay);
    if (dist === 0) continue;
    const steps = Math.max(1, Math.ceil(dist));
    for (let k = 1; k <= steps; k++) {
      out.push([ax + ((bx - ax) * k) / steps, ay + ((by - ay) * k) / steps]);
    }
  }
  const first = out[0]!;
  const last = out[out.length - 1]!;
  if (closed && (first[0] !== last[0] || first[1] !== last[1])) {
    out.push([first[0], first[1]]);
  }
  return out;
}

/** Unit normals from central-difference tangents, rotated +90 deg (y down). */
export function chainNormals(pts: Point[], closed: boolean): Point[] {
  const n = pts.length;
  const tang: Point[] = new Array(n);
  const dup =
    closed && pts[0]![0] === pts[n - 1]![0] && pts[0]![1] === pts[n - 1]![1];
  if (closed && dup) {
    const m = n - 1;
    for (let i = 0; i < m; i++) {
      const next = pts[(i + 1) % m]!;
      const prev = pts[(i - 1 + m) % m]!;
      tang[i] = [next[0] - prev[0], next[1] - prev[1]];
    }
    tang[n - 1] = tang[0]!;
  } else if (closed) {
    for (let i = 0; i < n; i++) {
      const next = pts[(i + 1) % n]!;
      const prev = pts[(i - 1 + n) % n]!;
      tang[i] = [next[0] - prev[0], next[1] - prev[1]];
    }
  } else {
    tang[0] = [pts[1]![0] - pts[0]![0], pts[1]![1] - pts[0]![1]];
    tang[n - 1] = [pts[n - 1]![0] - pts[n - 2]![0], pts[n - 1]![1] - pts[n - 2]![1]];
    for (let i = 1; i + 1 < n; i++) {
      tang[i] = [pts[i + 1]![0] - pts[i - 1]![0], pts[i + 1]![1] - pts[i - 1]![1]];
    }
  }
  return tang.map(([tx, ty]) => {
    const len = Math.hypot(-ty, tx);
    return len > 0 ? [-ty / len, tx / len] : [0, 0];
  });
}

export function clampToCanvas(pts: Point[], w: number, h: number): Point[] {
  return pts.map(([x, y]) => [
    Math.min(Math.max(x, 0), w - 1),
    Math.min(Math.max(y, 0), h - 1),
  ]);
}
