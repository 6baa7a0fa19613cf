/** View state of the five-panel UI. Rendering is a pure function of
 * (document, barcode, diagnostics, ViewState); this module owns the state
 * transitions and keeps the animation toggle consistent with validation. */

import type { CandidatePair, Diagnostic, ValidationReport } from "./types.js";

export interface ViewState {
  showSkeleton: boolean;
  showFlow: boolean;
  animate: boolean;
  selected: string | null;
  highlightedEntities: string[];
  simplificationMode: boolean;
  highlightedPair: CandidatePair | null;
}

export function initialViewState(): ViewState {
  return {
    showSkeleton: true,
    showFlow: false,
    animate: false,
    selected: null,
    highlightedEntities: [],
    simplificationMode: false,
    highlightedPair: null,
  };
}

/** Fold a fresh validation report into the view: diagnostics become red
 * highlights and a non-animatable report forces the animation toggle off. */
export function applyValidation(state: ViewState, report: ValidationReport): ViewState {
  const highlighted = entitiesOf(report.diagnostics);
  return {
    ...state,
    highlightedEntities: highlighted,
    animate: report.animatable ? state.animate : false,
  };
}

export function toggleAnimation(state: ViewState, report: ValidationReport): ViewState {
  if (!report.animatable) {
    // flow animation is not allowed while the debugger reports errors
    return { ...state, animate: false };
  }
  return { ...state, animate: !state.animate };
}

export function entitiesOf(diagnostics: Diagnostic[]): string[] {
  const out = new Set<string>();
  for (const d of diagnostics) {
    for (const e of d.entities) {
      out.add(e);
    }
  }
  return [...out].sort();
}

export function selectEntity(state: ViewState, id: string | null): ViewState {
  return { ...state, selected: id };
}

export function setSimplificationMode(state: ViewState, on: boolean): ViewState {
  return { ...state, simplificationMode: on, highlightedPair: null };
}

export function highlightPair(state: ViewState, pair: CandidatePair | null): ViewState {
  return { ...state, highlightedPair: pair };
}
