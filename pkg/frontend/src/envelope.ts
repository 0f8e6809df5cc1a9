/**
 * Geometry for the normalized backbone sketch.
 *
 * The drawn envelope is shape-only: normalized lateral strength rises to
 * 1.0 at zero plastic rotation, holds to rotation a (incipient strength
 * degradation), then drops; rotation b (incipient axial failure) is marked
 * on the axis.  No residual-strength segment is drawn.
 */

export interface Point {
  x: number;
  y: number;
}

export interface EnvelopeGeometry {
  /** pixel-space polyline of the strength envelope */
  curve: Point[];
  /** dashed drop segment at rotation a */
  drop: [Point, Point];
  aMarker: Point; // on the rotation axis
  bMarker: Point; // on the rotation axis
  axisY: number;
  plateauY: number;
  domainMax: number; // rotation (radians) at the right edge
}

export interface ViewBox {
  width: number;
  height: number;
  margin: number;
}

export function envelopeGeometry(
  a: number,
  b: number,
  view: ViewBox = { width: 360, height: 160, margin: 24 },
): EnvelopeGeometry {
  if (!(a >= 0) || !(b >= a)) {
    throw new Error(`invalid backbone parameters: a=${a}, b=${b}`);
  }
  const { width, height, margin } = view;
  const axisY = height - margin;
  const plateauY = margin;
  const innerWidth = width - 2 * margin;

  // rotation domain: give the b marker 15% headroom; degenerate a=b=0
  // still gets a nonzero axis
  const domainMax = Math.max(b, 1e-6) * 1.15;
  const xOf = (rotation: number) => margin + (rotation / domainMax) * innerWidth;

  const xa = xOf(a);
  const xb = xOf(b);
  return {
    curve: [
      { x: xOf(0), y: axisY },
      { x: xOf(0), y: plateauY },
      { x: xa, y: plateauY },
    ],
    drop: [
      { x: xa, y: plateauY },
      { x: xa, y: axisY },
    ],
    aMarker: { x: xa, y: axisY },
    bMarker: { x: xb, y: axisY },
    axisY,
    plateauY,
    domainMax,
  };
}

export function polylinePoints(points: Point[]): string {
  return points.map((p) => `${p.x.toFixed(2)},${p.y.toFixed(2)}`).join(" ");
}
