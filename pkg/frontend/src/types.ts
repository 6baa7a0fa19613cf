/** Wire types mirroring the service JSON schemas. */

export interface SingularityDoc {
  id: string;
  kind: "source" | "sink" | "saddle" | "boundary";
  x: number | null;
  y: number | null;
  value: number;
  glyphRadius: number;
}

export interface AttachmentDoc {
  id: string;
  angle: number;
}

export interface SeparatrixDoc {
  id: string;
  class: "dashed" | "solid";
  saddle: AttachmentDoc;
  extremum: AttachmentDoc;
  controlPoints: [number, number][];
}

export interface SkeletonDoc {
  version: number;
  singularities: SingularityDoc[];
  separatrices: SeparatrixDoc[];
}

export interface Diagnostic {
  code: string;
  entities: string[];
  message: string;
}

export interface ValidationReport {
  diagnostics: Diagnostic[];
  animatable: boolean;
}

export interface SkeletonPayload {
  document: SkeletonDoc;
  curves: Record<string, [number, number][]>;
  validation: ValidationReport;
}

export interface Bar {
  dim: 0 | 1 | "essential";
  birth: number;
  death: number;
  birthSing: string;
  deathSing: string;
}

export interface Barcode {
  bars: Bar[];
}

export interface CandidatePair {
  extremum: string;
  saddle: string;
}

export interface FieldMesh {
  vertices: [number, number][];
  triangles: [number, number, number][];
  vectors: [number, number][];
}

export interface HistoryEntry {
  seq: number;
  command: Record<string, unknown>;
  outcome: "applied" | "rejected";
  error?: { code: string; message: string };
}

export type MoveKind =
  | "face-min"
  | "face-max"
  | "edge-min"
  | "edge-max"
  | "vertex-min"
  | "vertex-max";

export interface MoveRequestBody {
  kind: MoveKind;
  target: Record<string, unknown>;
  mode: "manual" | "semi-automatic";
  values?: { extremum: number; saddle: number };
}
