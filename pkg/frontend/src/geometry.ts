/**
 * First-quadrant geometry of a two-station protection region
 * { i >= 0, a @ i <= c }, with null c entries meaning an unconstrained row.
 */

export interface Point2D {
  x: number;
  y: number;
}

export interface RegionGeometry {
  /** Convex outline, counter-clockwise from the origin. */
  vertices: Point2D[];
  /** Largest allowed interference on each axis; null when unbounded. */
  xIntercept: number | null;
  yIntercept: number | null;
}

interface HalfPlane {
  // nx * x + ny * y <= limit
  nx: number;
  ny: number;
  limit: number;
}

const EPS = 1e-9;

function intersect(p: HalfPlane, q: HalfPlane): Point2D | null {
  const det = p.nx * q.ny - p.ny * q.nx;
  if (Math.abs(det) < 1e-30) return null;
  return {
    x: (p.limit * q.ny - p.ny * q.limit) / det,
    y: (p.nx * q.limit - p.limit * q.nx) / det,
  };
}

function feasible(pt: Point2D, planes: HalfPlane[]): boolean {
  return planes.every((h) => {
    const scale = Math.max(1, Math.abs(h.limit));
    return h.nx * pt.x + h.ny * pt.y <= h.limit + EPS * scale;
  });
}

/**
 * Region outline clipped to [0, span] on both axes so unbounded regions
 * still draw as a closed shape; for bounded regions any span at least as
 * large as the intercepts leaves the outline untouched.
 */
export function regionGeometry(
  a: number[][],
  c: (number | null)[],
  span: number,
): RegionGeometry {
  const planes: HalfPlane[] = [
    { nx: -1, ny: 0, limit: 0 },
    { nx: 0, ny: -1, limit: 0 },
    { nx: 1, ny: 0, limit: span },
    { nx: 0, ny: 1, limit: span },
  ];
  for (let m = 0; m < c.length; m++) {
    const limit = c[m];
    if (limit === null) continue;
    planes.push({ nx: a[m][0], ny: a[m][1], limit });
  }
  const seen: Point2D[] = [];
  for (let i = 0; i < planes.length; i++) {
    for (let j = i + 1; j < planes.length; j++) {
      const pt = intersect(planes[i], planes[j]);
      if (!pt || !feasible(pt, planes)) continue;
      if (!seen.some((q) => Math.abs(q.x - pt.x) < EPS && Math.abs(q.y - pt.y) < EPS)) {
        seen.push(pt);
      }
    }
  }
  const cx = seen.reduce((s, p) => s + p.x, 0) / Math.max(1, seen.length);
  const cy = seen.reduce((s, p) => s + p.y, 0) / Math.max(1, seen.length);
  seen.sort(
    (p, q) => Math.atan2(p.y - cy, p.x - cx) - Math.atan2(q.y - cy, q.x - cx),
  );
  return {
    vertices: seen,
    xIntercept: axisIntercept(a, c, 0),
    yIntercept: axisIntercept(a, c, 1),
  };
}

/** Largest feasible value on one axis, or null when nothing bounds it. */
export function axisIntercept(
  a: number[][],
  c: (number | null)[],
  axis: 0 | 1,
): number | null {
  let best: number | null = null;
  for (let m = 0; m < c.length; m++) {
    const limit = c[m];
    if (limit === null || a[m][axis] <= 0) continue;
    const cut = limit / a[m][axis];
    if (best === null || cut < best) best = cut;
  }
  return best;
}
