from .domain_exceptions import (
    DegenerateFitError,
    DegenerateMidpointError,
    DegeneratePyramidError,
    DomainException,
    GenerationError,
    InvalidAnnotationError,
    InvalidGridError,
    InvalidRectError,
    NoGlobalMatchError,
    NonContiguousSpanError,
    SchemaError,
    StructureConflictError,
    UnderdeterminedExtentError,
    VanishedCellError
)
from .mask_targets import GlobalTarget, LocalTarget, gpma_targets, lpma_targets
from .metrics import (
    DetectionScore,
    RelationScore,
    detection_score,
    empty_cell_detection_score,
    relation_score,
    teds_struct,
    tree_edit_distance
)
from .predictions import GlobalPrediction, ProposalPrediction
from .rect import Rect
from .refinement import PlaneFit, RefinedBox, RescoredMask, fit_plane, match_global_region, refine_box, rescore
from .scalar_map import ScalarMap
from .statuses import CliqueOrdering, Direction, MergeStrategy, SideStatus
from .structure_recovery import (
    CellBox,
    EmptyCell,
    IndexAssignment,
    RecoveryConfig,
    RelationGraph,
    assign_indices,
    find_empty_cells,
    match_cells,
    merge_empty_cells,
    recover
)
from .table_annotation import CellAnnotation, TableAnnotation, derive_aligned_boxes, relations_from_annotation
from .table_grid import GridCell, TableGrid, grid_from_annotation, grid_to_annotation, validate_grid

__all__ = [
    'CellAnnotation', 'CellBox', 'CliqueOrdering', 'DegenerateFitError', 'DegenerateMidpointError',
    'DegeneratePyramidError', 'DetectionScore', 'Direction', 'DomainException', 'EmptyCell',
    'GenerationError', 'GlobalPrediction', 'GlobalTarget', 'GridCell', 'IndexAssignment',
    'InvalidAnnotationError', 'InvalidGridError', 'InvalidRectError', 'LocalTarget', 'MergeStrategy',
    'NoGlobalMatchError', 'NonContiguousSpanError', 'PlaneFit', 'ProposalPrediction', 'Rect',
    'RecoveryConfig', 'RefinedBox', 'RelationGraph', 'RelationScore', 'RescoredMask', 'ScalarMap',
    'SchemaError', 'SideStatus', 'StructureConflictError', 'TableAnnotation', 'TableGrid',
    'UnderdeterminedExtentError', 'VanishedCellError',
    'assign_indices', 'derive_aligned_boxes', 'detection_score', 'empty_cell_detection_score',
    'find_empty_cells', 'fit_plane', 'gpma_targets', 'grid_from_annotation', 'grid_to_annotation',
    'lpma_targets', 'match_cells', 'match_global_region', 'merge_empty_cells', 'recover', 'refine_box',
    'relation_score', 'relations_from_annotation', 'rescore', 'teds_struct', 'tree_edit_distance',
    'validate_grid'
]
