"""Design studio core for Morse vector fields on the sphere.

The sphere is modeled as the closed unit disk whose boundary circle is the
global sink. The package covers the embedded topological skeleton and its
editing operations, the six elementary moves with pair cancellation,
configuration validation, extended-persistence barcodes with
persistence-guided simplification, numerical vector field synthesis with
streamline tracing, an undoable command history, a JSON/HTTP service, and a
batch CLI.
"""

from .model import (
    Attachment,
    SepClass,
    Separatrix,
    SingKind,
    Singularity,
    Skeleton,
    new_default,
    new_minimal,
)
from .embedding import Cell, compute_cells, locate_cell
from .validator import Diagnostic, ValidationReport, segments_intersect, validate
from .moves import MoveKind, MoveOutcome, MoveRequest, apply_move, assign_default_values, cancel_pair
from .persistence import Bar, Barcode, compute_barcode, eligible_pairs, set_value, simplify
from .fieldsynth import (
    DetectedSingularity,
    FieldParams,
    VectorFieldMesh,
    auxiliary_field,
    basis_field,
    extract_singularities,
    generate_mesh,
    synthesize,
    trace_streamline,
)
from .history import Document, HistoryEntry, HistoryStack, load, replay, save
from .isomorphism import skeletons_isomorphic

__version__ = "0.1.0"

__all__ = [
    "Attachment",
    "Bar",
    "Barcode",
    "Cell",
    "DetectedSingularity",
    "Diagnostic",
    "Document",
    "FieldParams",
    "HistoryEntry",
    "HistoryStack",
    "MoveKind",
    "MoveOutcome",
    "MoveRequest",
    "SepClass",
    "Separatrix",
    "SingKind",
    "Singularity",
    "Skeleton",
    "ValidationReport",
    "VectorFieldMesh",
    "apply_move",
    "assign_default_values",
    "auxiliary_field",
    "basis_field",
    "cancel_pair",
    "compute_barcode",
    "compute_cells",
    "eligible_pairs",
    "extract_singularities",
    "generate_mesh",
    "load",
    "locate_cell",
    "new_default",
    "new_minimal",
    "replay",
    "save",
    "set_value",
    "segments_intersect",
    "simplify",
    "skeletons_isomorphic",
    "synthesize",
    "trace_streamline",
    "validate",
]
