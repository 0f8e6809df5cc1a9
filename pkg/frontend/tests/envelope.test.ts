import { describe, expect, it } from "vitest";

import { envelopeGeometry, polylinePoints } from "../src/envelope.js";

const VIEW = { width: 360, height: 160, margin: 24 };

describe("envelopeGeometry", () => {
  it("marks b strictly right of a when b > a", () => {
    const geo = envelopeGeometry(0.015, 0.035, VIEW);
    expect(geo.bMarker.x).toBeGreaterThan(geo.aMarker.x);
    expect(geo.aMarker.y).toBe(geo.axisY);
    expect(geo.bMarker.y).toBe(geo.axisY);
  });

  it("a = b gives coincident markers", () => {
    const geo = envelopeGeometry(0.02, 0.02, VIEW);
    expect(geo.aMarker.x).toBe(geo.bMarker.x);
  });

  it("a = 0 pins the a marker to the axis origin", () => {
    const geo = envelopeGeometry(0.0, 0.03, VIEW);
    expect(geo.aMarker.x).toBe(VIEW.margin);
  });

  it("plateau runs from zero rotation to a at full strength", () => {
    const geo = envelopeGeometry(0.01, 0.02, VIEW);
    expect(geo.curve[0]).toEqual({ x: VIEW.margin, y: geo.axisY });
    expect(geo.curve[1]).toEqual({ x: VIEW.margin, y: geo.plateauY });
    expect(geo.curve[2]?.y).toBe(geo.plateauY);
    expect(geo.curve[2]?.x).toBe(geo.aMarker.x);
    // no residual-strength segment: the drop lands on the axis
    expect(geo.drop[1].y).toBe(geo.axisY);
  });

  it("rejects invalid parameter pairs", () => {
    expect(() => envelopeGeometry(-0.01, 0.02, VIEW)).toThrow();
    expect(() => envelopeGeometry(0.03, 0.02, VIEW)).toThrow();
  });

  it("degenerate zero-zero still yields a drawable domain", () => {
    const geo = envelopeGeometry(0, 0, VIEW);
    expect(geo.domainMax).toBeGreaterThan(0);
    expect(geo.aMarker.x).toBe(VIEW.margin);
  });

  it("polylinePoints renders SVG coordinates", () => {
    expect(polylinePoints([{ x: 1, y: 2 }, { x: 3.456, y: 7 }])).toBe(
      "1.00,2.00 3.46,7.00",
    );
  });
});
