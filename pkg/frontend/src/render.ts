/** Pure rendering: skeleton SVG elements and barcode panel geometry.
 * Everything here maps server payloads to drawable primitives; no state. */

import type { Bar, Barcode, CandidatePair, SkeletonPayload } from "./types.js";
import type { ViewState } from "./state.js";

export const VIEW_SIZE = 640;

export function toScreen([x, y]: [number, number], size = VIEW_SIZE): [number, number] {
  return [((x + 1.1) / 2.2) * size, ((1.1 - y) / 2.2) * size];
}

export function toModel([px, py]: [number, number], size = VIEW_SIZE): [number, number] {
  return [(px / size) * 2.2 - 1.1, 1.1 - (py / size) * 2.2];
}

const GLYPH_FILL: Record<string, string> = {
  source: "#d62728",
  sink: "#1f77b4",
  saddle: "#2ca02c",
};

export interface SvgElement {
  tag: "circle" | "path";
  attrs: Record<string, string>;
  entity: string | null;
  role: "boundary" | "separatrix" | "glyph" | "control" | "candidate";
}

/** Drawable skeleton: boundary circle, separatrix paths (dashed for
 * saddle-source), yellow control point handles, singularity glyphs.
 * Entities named by the latest diagnostics render in red. */
export function skeletonElements(
  payload: SkeletonPayload,
  view: ViewState,
  size = VIEW_SIZE,
): SvgElement[] {
  const red = new Set(view.highlightedEntities);
  const out: SvgElement[] = [];
  const [cx, cy] = toScreen([0, 0], size);
  out.push({
    tag: "circle",
    entity: null,
    role: "boundary",
    attrs: {
      cx: String(cx),
      cy: String(cy),
      r: String(size / 2.2),
      fill: "none",
      stroke: red.size && payloadHasBoundaryIssue(payload, red) ? "#d11" : "#1f77b4",
      "stroke-width": "3",
    },
  });
  if (!view.showSkeleton) {
    return out;
  }
  for (const sep of payload.document.separatrices) {
    const pts = payload.curves[sep.id] ?? [];
    const d = pts
      .map((p, i) => `${i === 0 ? "M" : "L"} ${toScreen(p, size).map((v) => v.toFixed(2)).join(" ")}`)
      .join(" ");
    const attrs: Record<string, string> = {
      d,
      fill: "none",
      stroke: red.has(sep.id) ? "#d11" : "#333",
      "stroke-width": red.has(sep.id) ? "2.6" : "1.6",
    };
    if (sep.class === "dashed") {
      attrs["stroke-dasharray"] = "7 5";
    }
    out.push({ tag: "path", entity: sep.id, role: "separatrix", attrs });
    sep.controlPoints.forEach((p, index) => {
      const [px, py] = toScreen(p, size);
      out.push({
        tag: "circle",
        entity: `${sep.id}:${index}`,
        role: "control",
        attrs: {
          cx: px.toFixed(2),
          cy: py.toFixed(2),
          r: "4",
          fill: "#ffd700",
          stroke: "#333",
        },
      });
    });
  }
  for (const sing of payload.document.singularities) {
    if (sing.x === null || sing.y === null) {
      continue;
    }
    const [px, py] = toScreen([sing.x, sing.y], size);
    const r = Math.max(5, (sing.glyphRadius / 2.2) * size);
    out.push({
      tag: "circle",
      entity: sing.id,
      role: "glyph",
      attrs: {
        cx: px.toFixed(2),
        cy: py.toFixed(2),
        r: r.toFixed(2),
        fill: GLYPH_FILL[sing.kind] ?? "#999",
        "fill-opacity": "0.85",
        stroke: red.has(sing.id) ? "#d11" : "#222",
        "stroke-width": red.has(sing.id) ? "3" : "1",
      },
    });
  }
  if (view.simplificationMode && view.highlightedPair) {
    const line = candidateConnector(payload, view.highlightedPair, size);
    if (line) {
      out.push(line);
    }
  }
  return out;
}

function payloadHasBoundaryIssue(payload: SkeletonPayload, red: Set<string>): boolean {
  const boundary = payload.document.singularities.find((s) => s.kind === "boundary");
  return boundary !== undefined && red.has(boundary.id);
}

/** Purple dotted connector between an eligible pair (simplification mode). */
export function candidateConnector(
  payload: SkeletonPayload,
  pair: CandidatePair,
  size = VIEW_SIZE,
): SvgElement | null {
  const byId = new Map(payload.document.singularities.map((s) => [s.id, s]));
  const a = byId.get(pair.extremum);
  const b = byId.get(pair.saddle);
  if (!a || !b || a.x === null || b.x === null || a.y === null || b.y === null) {
    return null;
  }
  const [x1, y1] = toScreen([a.x, a.y], size);
  const [x2, y2] = toScreen([b.x, b.y], size);
  return {
    tag: "path",
    entity: `${pair.extremum},${pair.saddle}`,
    role: "candidate",
    attrs: {
      d: `M ${x1.toFixed(2)} ${y1.toFixed(2)} L ${x2.toFixed(2)} ${y2.toFixed(2)}`,
      stroke: "#8a2be2",
      "stroke-width": "2.4",
      "stroke-dasharray": "2 6",
      fill: "none",
    },
  };
}

export function elementsToSvg(elements: SvgElement[], size = VIEW_SIZE): string {
  const body = elements
    .map((e) => {
      const attrs = Object.entries(e.attrs)
        .map(([k, v]) => `${k}="${v}"`)
        .join(" ");
      const data = e.entity ? ` data-entity="${e.entity}" data-role="${e.role}"` : "";
      return `<${e.tag} ${attrs}${data}/>`;
    })
    .join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${size}" height="${size}" ` +
    `viewBox="0 0 ${size} ${size}">\n${body}\n</svg>`
  );
}

export interface BarGeometry {
  bar: Bar;
  x0: number;
  x1: number;
  y: number;
  height: number;
  color: string;
}

/** Barcode panel layout: one horizontal bar per persistence pair, x mapped
 * from function values, longest (the essential pair) on top. */
export function barcodeLayout(
  barcode: Barcode,
  width = 360,
  rowHeight = 18,
  pad = 10,
): BarGeometry[] {
  const bars = [...barcode.bars].sort(
    (a, b) => b.death - b.birth - (a.death - a.birth),
  );
  if (!bars.length) {
    return [];
  }
  const lo = Math.min(...bars.map((b) => b.birth));
  const hi = Math.max(...bars.map((b) => b.death));
  const span = hi - lo || 1;
  const sx = (v: number) => pad + ((v - lo) / span) * (width - 2 * pad);
  return bars.map((bar, i) => ({
    bar,
    x0: sx(bar.birth),
    x1: sx(bar.death),
    y: pad + i * rowHeight,
    height: rowHeight * 0.6,
    color: bar.dim === "essential" ? "#444" : bar.dim === 0 ? "#1f77b4" : "#d62728",
  }));
}

/** The candidate pair a clicked bar proposes (none for the essential bar). */
export function pairForBar(bar: Bar): CandidatePair | null {
  if (bar.dim === "essential") {
    return null;
  }
  if (bar.dim === 0) {
    return { extremum: bar.birthSing, saddle: bar.deathSing };
  }
  return { extremum: bar.deathSing, saddle: bar.birthSing };
}
