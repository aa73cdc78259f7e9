from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Protocol, Tuple

from .domain_exceptions import (
    InvalidAnnotationError,
    InvalidRectError,
    SchemaError,
    UnderdeterminedExtentError
)
from .json_fields import int_field, optional_rect_field, pair_field, require_keys
from .rect import Rect

Edge = Tuple[int, int]
EdgeSet = FrozenSet[Edge]


class GridSpan(Protocol):
    id: int
    row_start: int
    row_end: int
    col_start: int
    col_end: int


@dataclass(frozen=True)
class CellAnnotation:
    """Ячейка размеченной таблицы - Value Object"""
    id: int
    text_rect: Optional[Rect]
    row_start: int
    row_end: int
    col_start: int
    col_end: int

    def __post_init__(self):
        if min(self.row_start, self.row_end, self.col_start, self.col_end) < 0:
            raise InvalidAnnotationError(f"Cell {self.id}: grid indices must be non-negative")
        if self.row_start > self.row_end or self.col_start > self.col_end:
            raise InvalidAnnotationError(f"Cell {self.id}: span start exceeds span end")

    @property
    def is_empty(self) -> bool:
        return self.text_rect is None

    @property
    def row_span(self) -> int:
        return self.row_end - self.row_start + 1

    @property
    def col_span(self) -> int:
        return self.col_end - self.col_start + 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.id,
            'text_rect': self.text_rect.to_list() if self.text_rect else None,
            'row': [self.row_start, self.row_end],
            'col': [self.col_start, self.col_end]
        }


@dataclass(frozen=True)
class TableAnnotation:
    """Разметка таблицы - Aggregate: изображение и ячейки сетки"""
    image_width: int
    image_height: int
    cells: Tuple[CellAnnotation, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'cells', tuple(self.cells))
        if self.image_width <= 0 or self.image_height <= 0:
            raise InvalidAnnotationError("Image dimensions must be positive")
        if not self.cells:
            raise InvalidAnnotationError("Table has no cells")
        ids = [c.id for c in self.cells]
        if len(set(ids)) != len(ids):
            raise InvalidAnnotationError("Cell ids must be unique")
        problems = tiling_violations(self.cells)
        if problems:
            raise InvalidAnnotationError("; ".join(problems))

    @property
    def n_rows(self) -> int:
        return max(c.row_end for c in self.cells) + 1

    @property
    def n_cols(self) -> int:
        return max(c.col_end for c in self.cells) + 1

    @property
    def non_empty_cells(self) -> List[CellAnnotation]:
        return [c for c in self.cells if not c.is_empty]

    def cell(self, cell_id: int) -> CellAnnotation:
        for c in self.cells:
            if c.id == cell_id:
                return c
        raise KeyError(cell_id)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'image_width': self.image_width,
            'image_height': self.image_height,
            'cells': [c.to_dict() for c in self.cells]
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "<memory>") -> 'TableAnnotation':
        """Разобрать JSON-документ аннотации, отвергая неизвестные поля"""
        require_keys(data, {'image_width', 'image_height', 'cells'}, path, "")
        cells = []
        if not isinstance(data['cells'], list):
            raise SchemaError(path, "cells", "expected a list")
        for i, raw in enumerate(data['cells']):
            prefix = f"cells[{i}]"
            require_keys(raw, {'id', 'text_rect', 'row', 'col'}, path, prefix)
            cells.append(CellAnnotation(
                id=int_field(raw['id'], path, f"{prefix}.id"),
                text_rect=optional_rect_field(raw['text_rect'], path, f"{prefix}.text_rect"),
                row_start=int_field(pair_field(raw['row'], path, f"{prefix}.row")[0], path, f"{prefix}.row"),
                row_end=int_field(raw['row'][1], path, f"{prefix}.row"),
                col_start=int_field(pair_field(raw['col'], path, f"{prefix}.col")[0], path, f"{prefix}.col"),
                col_end=int_field(raw['col'][1], path, f"{prefix}.col")
            ))
        return cls(
            image_width=int_field(data['image_width'], path, "image_width"),
            image_height=int_field(data['image_height'], path, "image_height"),
            cells=tuple(cells)
        )


def tiling_violations(cells: Iterable[GridSpan]) -> List[str]:
    """Проверить, что ячейки покрывают прямоугольник сетки ровно один раз"""
    cells = list(cells)
    if not cells:
        return ["hole: grid is empty"]
    n_rows = max(c.row_end for c in cells) + 1
    n_cols = max(c.col_end for c in cells) + 1
    owners: Dict[Tuple[int, int], List[int]] = {}
    for c in cells:
        for r in range(c.row_start, c.row_end + 1):
            for col in range(c.col_start, c.col_end + 1):
                owners.setdefault((r, col), []).append(c.id)
    problems = []
    for r in range(n_rows):
        for col in range(n_cols):
            ids = owners.get((r, col), [])
            if not ids:
                problems.append(f"hole at ({r}, {col})")
            elif len(ids) > 1:
                problems.append(f"overlap at ({r}, {col}): cells {sorted(ids)}")
    return problems


def adjacency_edges(cells: Iterable[GridSpan]) -> Tuple[EdgeSet, EdgeSet]:
    """Горизонтальные и вертикальные пары соседей по индексам сетки"""
    cells = list(cells)
    h_edges, v_edges = set(), set()
    for a in cells:
        for b in cells:
            if a.id == b.id:
                continue
            rows_meet = a.row_start <= b.row_end and b.row_start <= a.row_end
            cols_meet = a.col_start <= b.col_end and b.col_start <= a.col_end
            if rows_meet and a.col_end + 1 == b.col_start:
                h_edges.add(canonical_edge(a.id, b.id))
            if cols_meet and a.row_end + 1 == b.row_start:
                v_edges.add(canonical_edge(a.id, b.id))
    return frozenset(h_edges), frozenset(v_edges)


def canonical_edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


def relations_from_annotation(ann: TableAnnotation) -> Tuple[EdgeSet, EdgeSet]:
    return adjacency_edges(ann.cells)


def derive_aligned_boxes(ann: TableAnnotation) -> Dict[int, Rect]:
    """Выровненные рамки: текстовые рамки, растянутые до границ строк и столбцов

    Границы строки берутся только из непустых ячеек, занимающих ровно эту строку;
    ячейки со спаном получают объединение границ.
    """
    row_top, row_bottom, col_left, col_right = line_extents(ann)
    aligned = {}
    for c in ann.cells:
        try:
            aligned[c.id] = Rect(col_left[c.col_start], row_top[c.row_start],
                                 col_right[c.col_end], row_bottom[c.row_end])
        except InvalidRectError as e:
            raise InvalidAnnotationError(f"Cell {c.id}: aligned box is degenerate ({e})") from e
    return aligned


def line_extents(ann: TableAnnotation) -> Tuple[List[float], List[float], List[float], List[float]]:
    """Границы каждой строки (верх, низ) и столбца (лево, право)"""
    row_top: Dict[int, float] = {}
    row_bottom: Dict[int, float] = {}
    col_left: Dict[int, float] = {}
    col_right: Dict[int, float] = {}
    for c in ann.non_empty_cells:
        t = c.text_rect
        if c.row_span == 1:
            r = c.row_start
            row_top[r] = min(row_top.get(r, t.y1), t.y1)
            row_bottom[r] = max(row_bottom.get(r, t.y2), t.y2)
        if c.col_span == 1:
            col = c.col_start
            col_left[col] = min(col_left.get(col, t.x1), t.x1)
            col_right[col] = max(col_right.get(col, t.x2), t.x2)
    for r in range(ann.n_rows):
        if r not in row_top:
            raise UnderdeterminedExtentError("row", r)
    for col in range(ann.n_cols):
        if col not in col_left:
            raise UnderdeterminedExtentError("column", col)
    return ([row_top[r] for r in range(ann.n_rows)],
            [row_bottom[r] for r in range(ann.n_rows)],
            [col_left[c] for c in range(ann.n_cols)],
            [col_right[c] for c in range(ann.n_cols)])
