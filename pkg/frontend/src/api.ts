/** Typed client for the morseflow HTTP service. The UI holds no topology
 * logic: every mutation round-trips through these calls. */

import type {
  Barcode,
  CandidatePair,
  FieldMesh,
  HistoryEntry,
  MoveRequestBody,
  SkeletonPayload,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public detail: { code?: string; message?: string; [k: string]: unknown },
  ) {
    super(detail.message ?? `service error ${status}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  if (!res.ok) {
    let detail: ServiceError["detail"] = {};
    try {
      const body = (await res.json()) as { detail?: ServiceError["detail"] };
      detail = body.detail ?? body;
    } catch {
      detail = { message: res.statusText };
    }
    throw new ServiceError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class Session {
  constructor(
    readonly base: string,
    readonly id: string,
  ) {}

  private url(path: string): string {
    return `${this.base}/session/${this.id}${path}`;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return request<T>(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  skeleton(): Promise<SkeletonPayload> {
    return request(this.url("/skeleton"));
  }

  move(body: MoveRequestBody): Promise<SkeletonPayload & { created: unknown }> {
    return this.post("/move", body);
  }

  connect(body: {
    saddle: string;
    saddleAngle: number;
    extremum: string;
    extremumAngle: number;
    class: "dashed" | "solid";
  }): Promise<SkeletonPayload> {
    return this.post("/connect", body);
  }

  disconnect(separatrix: string): Promise<SkeletonPayload> {
    return this.post("/disconnect", { separatrix });
  }

  drag(singularity: string, x: number, y: number): Promise<SkeletonPayload> {
    return this.post("/drag", { singularity, x, y });
  }

  controlPoint(body: {
    action: "move" | "add" | "remove";
    separatrix: string;
    index: number;
    x?: number;
    y?: number;
  }): Promise<SkeletonPayload> {
    return this.post("/control-point", body);
  }

  setValue(singularity: string, value: number): Promise<SkeletonPayload> {
    return this.post("/value", { singularity, value });
  }

  barcode(): Promise<Barcode> {
    return request(this.url("/barcode"));
  }

  candidates(): Promise<{ pairs: CandidatePair[] }> {
    return request(this.url("/simplify/candidates"));
  }

  simplify(pair: CandidatePair): Promise<SkeletonPayload & { barcode: Barcode }> {
    return this.post("/simplify", pair);
  }

  undo(n = 1): Promise<SkeletonPayload> {
    return this.post("/undo", { n });
  }

  redo(n = 1): Promise<SkeletonPayload> {
    return this.post("/redo", { n });
  }

  history(): Promise<{ entries: HistoryEntry[]; cursor: number }> {
    return request(this.url("/history"));
  }

  field(resolution = 64): Promise<FieldMesh> {
    return request(this.url(`/field?resolution=${resolution}`));
  }

  exportDocument(): Promise<unknown> {
    return request(this.url("/export"));
  }
}

export async function createSession(base: string): Promise<Session> {
  const body = await request<{ session: string }>(`${base}/session`, {
    method: "POST",
  });
  return new Session(base, body.session);
}
