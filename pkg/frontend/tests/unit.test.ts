import { describe, expect, it } from "vitest";

import {
  advect,
  DEFAULT_ADVECT,
  FieldSampler,
  mulberry32,
  spawn as spawnParticle,
} from "../src/animation.js";
import {
  barcodeLayout,
  elementsToSvg,
  pairForBar,
  skeletonElements,
  toModel,
  toScreen,
} from "../src/render.js";
import {
  applyValidation,
  initialViewState,
  toggleAnimation,
} from "../src/state.js";
import type { Barcode, FieldMesh, SkeletonPayload } from "../src/types.js";

const samplePayload: SkeletonPayload = {
  document: {
    version: 1,
    singularities: [
      { id: "n0", kind: "boundary", x: null, y: null, value: 0, glyphRadius: 1 },
      { id: "n1", kind: "source", x: -0.5, y: 0, value: 2, glyphRadius: 0.05 },
      { id: "n3", kind: "saddle", x: 0, y: 0, value: 1, glyphRadius: 0.05 },
    ],
    separatrices: [
      {
        id: "e0",
        class: "dashed",
        saddle: { id: "n3", angle: Math.PI },
        extremum: { id: "n1", angle: 0 },
        controlPoints: [[-0.25, 0.1]],
      },
      {
        id: "e2",
        class: "solid",
        saddle: { id: "n3", angle: Math.PI / 2 },
        extremum: { id: "n0", angle: Math.PI / 2 },
        controlPoints: [],
      },
    ],
  },
  curves: {
    e0: [
      [-0.05, 0],
      [-0.25, 0.1],
      [-0.45, 0],
    ],
    e2: [
      [0, 0.05],
      [0, 1],
    ],
  },
  validation: { diagnostics: [], animatable: true },
};

describe("coordinate mapping", () => {
  it("round-trips model and screen space", () => {
    const p: [number, number] = [0.3, -0.7];
    const back = toModel(toScreen(p));
    expect(back[0]).toBeCloseTo(p[0], 12);
    expect(back[1]).toBeCloseTo(p[1], 12);
  });
});

describe("skeleton rendering", () => {
  it("renders dashed class, control points and glyphs", () => {
    const els = skeletonElements(samplePayload, initialViewState());
    const path = els.find((e) => e.entity === "e0")!;
    expect(path.attrs["stroke-dasharray"]).toBeDefined();
    const solid = els.find((e) => e.entity === "e2")!;
    expect(solid.attrs["stroke-dasharray"]).toBeUndefined();
    expect(els.filter((e) => e.role === "control")).toHaveLength(1);
    expect(els.filter((e) => e.role === "glyph")).toHaveLength(2);
    const svg = elementsToSvg(els);
    expect(svg).toContain("<svg");
    expect(svg).toContain('data-entity="e0"');
  });

  it("highlights diagnostic entities in red", () => {
    const view = applyValidation(initialViewState(), {
      animatable: false,
      diagnostics: [
        { code: "CrossingSeparatrices", entities: ["e0", "e2"], message: "x" },
      ],
    });
    const els = skeletonElements(samplePayload, view);
    expect(els.find((e) => e.entity === "e0")!.attrs.stroke).toBe("#d11");
    expect(els.find((e) => e.entity === "e2")!.attrs.stroke).toBe("#d11");
  });
});

describe("view state", () => {
  it("disables animation while the report is non-animatable", () => {
    let view = { ...initialViewState(), animate: true };
    const bad = {
      animatable: false,
      diagnostics: [{ code: "OutOfBounds", entities: ["n1"], message: "m" }],
    };
    view = applyValidation(view, bad);
    expect(view.animate).toBe(false);
    expect(view.highlightedEntities).toEqual(["n1"]);
    view = toggleAnimation(view, bad);
    expect(view.animate).toBe(false);
    const good = { animatable: true, diagnostics: [] };
    view = toggleAnimation(applyValidation(view, good), good);
    expect(view.animate).toBe(true);
  });
});

describe("barcode panel", () => {
  const barcode: Barcode = {
    bars: [
      { dim: "essential", birth: 0, death: 3, birthSing: "n0", deathSing: "n2" },
      { dim: 1, birth: 1, death: 2, birthSing: "n3", deathSing: "n1" },
      { dim: 0, birth: 0.5, death: 0.8, birthSing: "n4", deathSing: "n5" },
    ],
  };

  it("lays out one row per bar, longest first, x proportional to values", () => {
    const rows = barcodeLayout(barcode, 360, 18, 10);
    expect(rows).toHaveLength(3);
    expect(rows[0].bar.dim).toBe("essential");
    expect(rows[0].x1 - rows[0].x0).toBeGreaterThan(rows[1].x1 - rows[1].x0);
    const span = (v: number) => 10 + (v / 3) * 340;
    expect(rows[1].x0).toBeCloseTo(span(1), 9);
    expect(rows[1].x1).toBeCloseTo(span(2), 9);
  });

  it("maps bars to cancellation candidates, none for the essential bar", () => {
    expect(pairForBar(barcode.bars[0])).toBeNull();
    expect(pairForBar(barcode.bars[1])).toEqual({ extremum: "n1", saddle: "n3" });
    expect(pairForBar(barcode.bars[2])).toEqual({ extremum: "n4", saddle: "n5" });
  });
});

describe("particle advection", () => {
  const mesh: FieldMesh = {
    vertices: [
      [-1, -1],
      [1, -1],
      [1, 1],
      [-1, 1],
    ],
    triangles: [
      [0, 1, 2],
      [0, 2, 3],
    ],
    vectors: [
      [1, 0],
      [1, 0],
      [1, 0],
      [1, 0],
    ],
  };

  it("moves particles along the field deterministically", () => {
    const sampler = new FieldSampler(mesh);
    const a = [{ x: 0, y: 0, age: 0 }];
    advect(a, sampler, mulberry32(1), DEFAULT_ADVECT);
    expect(a[0].x).toBeGreaterThan(0);
    expect(a[0].y).toBe(0);
    const b = [{ x: 0, y: 0, age: 0 }];
    advect(b, sampler, mulberry32(1), DEFAULT_ADVECT);
    expect(b[0]).toEqual(a[0]);
  });

  it("respawns particles leaving the disk", () => {
    const sampler = new FieldSampler(mesh);
    const particles = [{ x: 0.999, y: 0, age: 0 }];
    advect(particles, sampler, mulberry32(5), DEFAULT_ADVECT);
    expect(Math.hypot(particles[0].x, particles[0].y)).toBeLessThan(1);
    expect(particles[0].age).toBe(0);
  });

  it("spawn stays inside the disk", () => {
    const rand = mulberry32(3);
    for (let i = 0; i < 50; i++) {
      const p = spawnParticle(rand);
      expect(p.x * p.x + p.y * p.y).toBeLessThan(0.9);
    }
  });
});
