from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

from .domain_exceptions import SchemaError
from .rect import Rect
from .json_fields import int_field, optional_rect_field, pair_field, rect_field, require_keys
from .table_annotation import (
    CellAnnotation,
    EdgeSet,
    GridSpan,
    TableAnnotation,
    adjacency_edges,
    canonical_edge,
    derive_aligned_boxes
)

Footprint = Tuple[int, int, int, int, bool]


@dataclass(frozen=True)
class GridCell:
    """Ячейка восстановленной сетки"""
    id: int
    aligned_rect: Rect
    row_start: int
    row_end: int
    col_start: int
    col_end: int
    is_empty: bool = False
    text_rect: Optional[Rect] = None

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
            'col': [self.col_start, self.col_end],
            'aligned_rect': self.aligned_rect.to_list(),
            'is_empty': self.is_empty
        }


@dataclass(frozen=True)
class Violation:
    """Нарушение инварианта сетки"""
    rule: str
    ids: Tuple[int, ...]
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.rule} {list(self.ids)} {self.detail}".strip()


@dataclass(frozen=True)
class TableGrid:
    """Логическая структура таблицы: ячейки со спанами и рёбра соседства"""
    cells: Tuple[GridCell, ...]
    h_edges: EdgeSet = field(default_factory=frozenset)
    v_edges: EdgeSet = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, 'cells', tuple(self.cells))
        object.__setattr__(self, 'h_edges', frozenset(self.h_edges))
        object.__setattr__(self, 'v_edges', frozenset(self.v_edges))

    @classmethod
    def with_adjacency(cls, cells: Iterable[GridCell]) -> 'TableGrid':
        """Построить сетку, вычислив рёбра по индексам ячеек"""
        cells = tuple(cells)
        h_edges, v_edges = adjacency_edges(cells)
        return cls(cells, h_edges, v_edges)

    @property
    def n_rows(self) -> int:
        return max(c.row_end for c in self.cells) + 1 if self.cells else 0

    @property
    def n_cols(self) -> int:
        return max(c.col_end for c in self.cells) + 1 if self.cells else 0

    @property
    def empty_cells(self) -> List[GridCell]:
        return [c for c in self.cells if c.is_empty]

    @property
    def non_empty_cells(self) -> List[GridCell]:
        return [c for c in self.cells if not c.is_empty]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'cells': [c.to_dict() for c in self.cells],
            'h_edges': [list(e) for e in sorted(self.h_edges)],
            'v_edges': [list(e) for e in sorted(self.v_edges)]
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "<memory>") -> 'TableGrid':
        require_keys(data, {'cells', 'h_edges', 'v_edges'}, path, "")
        cells = []
        if not isinstance(data['cells'], list):
            raise SchemaError(path, "cells", "expected a list")
        for i, raw in enumerate(data['cells']):
            prefix = f"cells[{i}]"
            require_keys(raw, {'id', 'text_rect', 'row', 'col', 'aligned_rect', 'is_empty'},
                          path, prefix)
            row = pair_field(raw['row'], path, f"{prefix}.row")
            col = pair_field(raw['col'], path, f"{prefix}.col")
            if not isinstance(raw['is_empty'], bool):
                raise SchemaError(path, f"{prefix}.is_empty", "expected a boolean")
            cells.append(GridCell(
                id=int_field(raw['id'], path, f"{prefix}.id"),
                aligned_rect=rect_field(raw['aligned_rect'], path, f"{prefix}.aligned_rect"),
                row_start=int_field(row[0], path, f"{prefix}.row"),
                row_end=int_field(row[1], path, f"{prefix}.row"),
                col_start=int_field(col[0], path, f"{prefix}.col"),
                col_end=int_field(col[1], path, f"{prefix}.col"),
                is_empty=raw['is_empty'],
                text_rect=optional_rect_field(raw['text_rect'], path, f"{prefix}.text_rect")
            ))
        return cls(tuple(cells),
                   _edges(data['h_edges'], path, "h_edges"),
                   _edges(data['v_edges'], path, "v_edges"))


def _edges(value: Any, path: str, name: str) -> FrozenSet[Tuple[int, int]]:
    if not isinstance(value, list):
        raise SchemaError(path, name, "expected a list of id pairs")
    edges = set()
    for i, pair in enumerate(value):
        a, b = pair_field(pair, path, f"{name}[{i}]")
        edges.add(canonical_edge(int_field(a, path, f"{name}[{i}]"), int_field(b, path, f"{name}[{i}]")))
    return frozenset(edges)


def validate_grid(grid: TableGrid) -> List[Violation]:
    """Список нарушений инвариантов; пустой список - сетка корректна"""
    violations: List[Violation] = []
    ids = [c.id for c in grid.cells]
    seen = set()
    for cell_id in ids:
        if cell_id in seen:
            violations.append(Violation("duplicate-id", (cell_id,)))
        seen.add(cell_id)
    if not grid.cells:
        return [Violation("hole", (), "grid has no cells")]
    for c in grid.cells:
        if c.row_start > c.row_end or c.col_start > c.col_end or min(c.row_start, c.col_start) < 0:
            violations.append(Violation("bad-span", (c.id,)))
    if any(v.rule == "bad-span" for v in violations):
        return violations

    owners: Dict[Tuple[int, int], List[int]] = {}
    for c in grid.cells:
        for r in range(c.row_start, c.row_end + 1):
            for col in range(c.col_start, c.col_end + 1):
                owners.setdefault((r, col), []).append(c.id)
    for r in range(grid.n_rows):
        for col in range(grid.n_cols):
            claimed = owners.get((r, col), [])
            if not claimed:
                violations.append(Violation("hole", (), f"at ({r}, {col})"))
            elif len(claimed) > 1:
                violations.append(Violation("overlap", tuple(sorted(claimed)), f"at ({r}, {col})"))

    for name, edges in (("h_edges", grid.h_edges), ("v_edges", grid.v_edges)):
        for a, b in sorted(edges):
            if a == b:
                violations.append(Violation("self-edge", (a,), name))
            elif a not in seen or b not in seen:
                violations.append(Violation("dangling-edge", (a, b), name))
    return violations


def grid_from_annotation(ann: TableAnnotation) -> TableGrid:
    """Эталонная сетка: выровненные рамки и соседство из разметки"""
    aligned = derive_aligned_boxes(ann)
    cells = [GridCell(c.id, aligned[c.id], c.row_start, c.row_end, c.col_start, c.col_end,
                      is_empty=c.is_empty, text_rect=c.text_rect)
             for c in ann.cells]
    return TableGrid.with_adjacency(cells)


def grid_to_annotation(grid: TableGrid, image_width: int, image_height: int) -> TableAnnotation:
    """Обратное преобразование; для непустых ячеек без текста берётся выровненная рамка"""
    cells = []
    for c in grid.cells:
        text = None if c.is_empty else (c.text_rect or c.aligned_rect)
        cells.append(CellAnnotation(c.id, text, c.row_start, c.row_end, c.col_start, c.col_end))
    return TableAnnotation(image_width, image_height, tuple(cells))


def structure_signature(cells: Iterable[GridSpan]) -> List[Footprint]:
    """Отсортированные следы ячеек в сетке с признаком пустоты"""
    result = []
    for c in cells:
        empty = c.is_empty
        result.append((c.row_start, c.row_end, c.col_start, c.col_end, bool(empty)))
    return sorted(result)
