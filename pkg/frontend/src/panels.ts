/** DOM wiring of the five panels. All topology changes round-trip through
 * the service; the panels re-render from the returned payloads. */

import { Session, ServiceError } from "./api.js";
import {
  advect,
  DEFAULT_ADVECT,
  FieldSampler,
  mulberry32,
  Particle,
  spawn,
} from "./animation.js";
import {
  barcodeLayout,
  elementsToSvg,
  pairForBar,
  skeletonElements,
  toModel,
  toScreen,
  VIEW_SIZE,
} from "./render.js";
import {
  applyValidation,
  highlightPair,
  initialViewState,
  setSimplificationMode,
  toggleAnimation,
  ViewState,
} from "./state.js";
import type {
  Barcode,
  CandidatePair,
  MoveKind,
  SkeletonPayload,
  ValidationReport,
} from "./types.js";

const MOVE_KINDS: MoveKind[] = [
  "face-min",
  "face-max",
  "edge-min",
  "edge-max",
  "vertex-min",
  "vertex-max",
];

export class App {
  view: ViewState = initialViewState();
  payload: SkeletonPayload | null = null;
  barcode: Barcode | null = null;
  candidates: CandidatePair[] = [];
  pendingMove: MoveKind | null = null;
  moveMode: "manual" | "semi-automatic" = "semi-automatic";
  particles: Particle[] = [];
  private rand = mulberry32(20240817);
  private timer: ReturnType<typeof setInterval> | null = null;
  private sampler: FieldSampler | null = null;

  constructor(
    private session: Session,
    private root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    this.root.innerHTML = layout();
    this.bindControls();
    await this.refresh(await this.session.skeleton());
  }

  private el<T extends HTMLElement>(id: string): T {
    return this.root.querySelector(`#${id}`) as T;
  }

  private async refresh(payload: SkeletonPayload): Promise<void> {
    this.payload = payload;
    this.view = applyValidation(this.view, payload.validation);
    try {
      this.barcode = await this.session.barcode();
    } catch {
      this.barcode = null; // structurally broken mid-wiring: no barcode yet
    }
    this.candidates = this.view.simplificationMode
      ? (await this.session.candidates()).pairs
      : [];
    await this.redrawHistory();
    this.redraw();
  }

  private redraw(): void {
    if (!this.payload) return;
    this.el("flow-svg").innerHTML = elementsToSvg(
      skeletonElements(this.payload, this.view),
    );
    this.renderBarcode();
    this.renderFunctionPanel();
    this.renderWarnings(this.payload.validation);
    const animBtn = this.el<HTMLButtonElement>("toggle-anim");
    animBtn.disabled = !this.payload.validation.animatable;
    animBtn.textContent = this.view.animate ? "stop animation" : "animate flow";
    this.bindFlowInteractions();
  }

  private renderWarnings(report: ValidationReport): void {
    const box = this.el("warnings");
    box.innerHTML = report.diagnostics
      .map((d) => `<div class="warning">${d.code}: ${d.message}</div>`)
      .join("");
  }

  private renderFunctionPanel(): void {
    if (!this.payload) return;
    const rows = this.payload.document.singularities
      .map(
        (s) =>
          `<div class="value-row"><span>${s.id} (${s.kind})</span>` +
          `<input type="number" step="0.1" value="${s.value}" data-sing="${s.id}"/></div>`,
      )
      .join("");
    const panel = this.el("function-panel");
    panel.innerHTML = rows;
    panel.querySelectorAll("input").forEach((input) => {
      input.addEventListener("change", async () => {
        const sing = input.getAttribute("data-sing")!;
        try {
          await this.refresh(await this.session.setValue(sing, Number(input.value)));
        } catch (err) {
          this.flashError(err);
          await this.refresh(await this.session.skeleton());
        }
      });
    });
  }

  private renderBarcode(): void {
    const host = this.el("barcode-panel");
    if (!this.barcode) {
      host.innerHTML = "<em>barcode unavailable</em>";
      return;
    }
    const rows = barcodeLayout(this.barcode);
    const bars = rows
      .map(
        (g, i) =>
          `<rect x="${g.x0}" y="${g.y}" width="${Math.max(1, g.x1 - g.x0)}" ` +
          `height="${g.height}" fill="${g.color}" data-bar="${i}"/>`,
      )
      .join("");
    const h = rows.length ? rows[rows.length - 1].y + 30 : 40;
    host.innerHTML = `<svg width="360" height="${h}">${bars}</svg>`;
    host.querySelectorAll("rect").forEach((rect) => {
      rect.addEventListener("click", () => {
        const g = rows[Number(rect.getAttribute("data-bar"))];
        const pair = pairForBar(g.bar);
        const eligible =
          pair &&
          this.candidates.some(
            (c) => c.extremum === pair.extremum && c.saddle === pair.saddle,
          );
        this.view = highlightPair(this.view, eligible ? pair : null);
        this.redraw();
      });
    });
  }

  private async redrawHistory(): Promise<void> {
    const { entries, cursor } = await this.session.history();
    this.el("history-panel").innerHTML = entries
      .map((e) => {
        const op = (e.command.op as string) ?? "?";
        const cls = e.outcome === "rejected" ? "rejected" : "applied";
        return `<div class="${cls}">#${e.seq} ${op}${
          e.error ? ` (${e.error.code})` : ""
        }</div>`;
      })
      .join("") || "<em>empty</em>";
    this.el<HTMLButtonElement>("undo").disabled = cursor === 0;
  }

  private bindControls(): void {
    const palette = this.el("moves-panel");
    palette.innerHTML =
      MOVE_KINDS.map(
        (k) => `<button data-move="${k}">${k}</button>`,
      ).join("") +
      `<label><input type="checkbox" id="manual-mode"/> manual</label>`;
    palette.querySelectorAll("button").forEach((btn) => {
      btn.addEventListener("click", () => {
        this.pendingMove = btn.getAttribute("data-move") as MoveKind;
      });
    });
    this.el<HTMLInputElement>("manual-mode").addEventListener("change", (ev) => {
      this.moveMode = (ev.target as HTMLInputElement).checked
        ? "manual"
        : "semi-automatic";
    });

    this.el("undo").addEventListener("click", async () => {
      try {
        await this.refresh(await this.session.undo());
      } catch (err) {
        this.flashError(err);
      }
    });
    this.el("redo").addEventListener("click", async () => {
      try {
        await this.refresh(await this.session.redo());
      } catch (err) {
        this.flashError(err);
      }
    });
    this.el("toggle-anim").addEventListener("click", async () => {
      if (!this.payload) return;
      this.view = toggleAnimation(this.view, this.payload.validation);
      if (this.view.animate) {
        await this.startAnimation();
      } else {
        this.stopAnimation();
      }
      this.redraw();
    });
    this.el("simplify-mode").addEventListener("click", async () => {
      this.view = setSimplificationMode(this.view, !this.view.simplificationMode);
      this.candidates = this.view.simplificationMode
        ? (await this.session.candidates()).pairs
        : [];
      this.redraw();
    });
    this.el("apply-simplify").addEventListener("click", async () => {
      if (!this.view.highlightedPair) return;
      try {
        const result = await this.session.simplify(this.view.highlightedPair);
        this.view = highlightPair(this.view, null);
        await this.refresh(result);
      } catch (err) {
        this.flashError(err);
      }
    });
  }

  private bindFlowInteractions(): void {
    const svgHost = this.el("flow-svg");
    svgHost.onclick = async (ev) => {
      if (!this.pendingMove) return;
      const rect = svgHost.getBoundingClientRect();
      const [mx, my] = toModel([
        ((ev.clientX - rect.left) / rect.width) * VIEW_SIZE,
        ((ev.clientY - rect.top) / rect.height) * VIEW_SIZE,
      ]);
      const target = this.targetFor(this.pendingMove, ev, [mx, my]);
      if (!target) return;
      try {
        await this.refresh(
          await this.session.move({
            kind: this.pendingMove,
            target,
            mode: this.moveMode,
          }),
        );
      } catch (err) {
        this.flashError(err);
      } finally {
        this.pendingMove = null;
      }
    };
  }

  private targetFor(
    kind: MoveKind,
    ev: MouseEvent,
    model: [number, number],
  ): Record<string, unknown> | null {
    const hit = ev.target as Element;
    const entity = hit.getAttribute?.("data-entity");
    const role = hit.getAttribute?.("data-role");
    if (kind.startsWith("face")) {
      return { point: model };
    }
    if (kind.startsWith("edge")) {
      return role === "separatrix" && entity ? { separatrix: entity } : null;
    }
    if (role === "glyph" && entity) {
      const ang = Math.atan2(model[1], model[0]);
      return { singularity: entity, sectorFrom: ang - 0.6, sectorTo: ang + 0.6 };
    }
    return null;
  }

  private async startAnimation(): Promise<void> {
    const mesh = await this.session.field(48);
    this.sampler = new FieldSampler(mesh);
    this.particles = Array.from({ length: 400 }, () => spawn(this.rand));
    const canvas = this.el<HTMLCanvasElement>("flow-canvas");
    const ctx = canvas.getContext("2d")!;
    this.stopAnimation();
    this.timer = setInterval(() => {
      if (!this.sampler) return;
      advect(this.particles, this.sampler, this.rand, DEFAULT_ADVECT);
      ctx.fillStyle = "rgba(255,255,255,0.12)";
      ctx.fillRect(0, 0, canvas.width, canvas.height);
      ctx.fillStyle = "#135";
      for (const p of this.particles) {
        const [sx, sy] = toScreen([p.x, p.y]);
        ctx.fillRect(sx, sy, 1.6, 1.6);
      }
    }, 33);
  }

  private stopAnimation(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private flashError(err: unknown): void {
    const msg =
      err instanceof ServiceError
        ? `${err.detail.code ?? err.status}: ${err.detail.message ?? ""}`
        : String(err);
    const box = this.el("warnings");
    box.innerHTML = `<div class="warning">${msg}</div>` + box.innerHTML;
  }
}

function layout(): string {
  return `
  <div class="panels">
    <section id="flow" class="panel">
      <h2>Flow visualization</h2>
      <div class="stack">
        <canvas id="flow-canvas" width="${VIEW_SIZE}" height="${VIEW_SIZE}"></canvas>
        <div id="flow-svg"></div>
      </div>
      <button id="toggle-anim">animate flow</button>
      <div id="warnings"></div>
    </section>
    <section id="moves" class="panel">
      <h2>Elementary moves</h2>
      <div id="moves-panel"></div>
    </section>
    <section id="function" class="panel">
      <h2>Function adjustment</h2>
      <div id="function-panel"></div>
    </section>
    <section id="history" class="panel">
      <h2>History</h2>
      <button id="undo">undo</button>
      <button id="redo">redo</button>
      <div id="history-panel"></div>
    </section>
    <section id="barcode" class="panel">
      <h2>Barcode</h2>
      <button id="simplify-mode">simplification mode</button>
      <button id="apply-simplify">simplify highlighted pair</button>
      <div id="barcode-panel"></div>
    </section>
  </div>`;
}
