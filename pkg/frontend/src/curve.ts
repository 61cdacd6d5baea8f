// Pure geometry for the health-factor curve; kept DOM-free so the marker
// placement can be tested without a browser.

import type { SweepPoint } from "./types.js";

export interface CurveGeometry {
  width: number;
  height: number;
  padLeft: number;
  padRight: number;
  padTop: number;
  padBottom: number;
}

export const DEFAULT_GEOMETRY: CurveGeometry = {
  width: 560,
  height: 260,
  padLeft: 48,
  padRight: 16,
  padTop: 16,
  padBottom: 32,
};

export interface CurveLayout {
  path: string;
  markerX: number | null;
  liquidationY: number;
  xDomain: [number, number];
  yDomain: [number, number];
}

export function xPixel(depeg: number, domain: [number, number], geom: CurveGeometry): number {
  const [lo, hi] = domain;
  const span = hi - lo || 1;
  const plotWidth = geom.width - geom.padLeft - geom.padRight;
  return geom.padLeft + ((depeg - lo) / span) * plotWidth;
}

export function yPixel(hf: number, domain: [number, number], geom: CurveGeometry): number {
  const [lo, hi] = domain;
  const span = hi - lo || 1;
  const plotHeight = geom.height - geom.padTop - geom.padBottom;
  return geom.padTop + (1 - (hf - lo) / span) * plotHeight;
}

export function layoutCurve(
  points: SweepPoint[],
  criticalDepeg: number | null,
  geom: CurveGeometry = DEFAULT_GEOMETRY,
): CurveLayout | null {
  if (points.length === 0) return null;
  const depegs = points.map((p) => p.depeg);
  const hfs = points.map((p) => p.result.health_factor);
  const xDomain: [number, number] = [Math.min(...depegs), Math.max(...depegs)];
  const yLo = Math.min(...hfs, 1);
  const yHi = Math.max(...hfs, 1);
  const yPad = 0.04 * (yHi - yLo || 1);
  const yDomain: [number, number] = [yLo - yPad, yHi + yPad];

  const path = points
    .map((p, i) => {
      const x = xPixel(p.depeg, xDomain, geom).toFixed(1);
      const y = yPixel(p.result.health_factor, yDomain, geom).toFixed(1);
      return `${i === 0 ? "M" : "L"}${x},${y}`;
    })
    .join(" ");

  let markerX: number | null = null;
  if (
    criticalDepeg !== null &&
    criticalDepeg >= xDomain[0] &&
    criticalDepeg <= xDomain[1]
  ) {
    markerX = Number(xPixel(criticalDepeg, xDomain, geom).toFixed(1));
  }
  return {
    path,
    markerX,
    liquidationY: yPixel(1, yDomain, geom),
    xDomain,
    yDomain,
  };
}
