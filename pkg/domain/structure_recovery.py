import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from .domain_exceptions import (
    InvalidGridError,
    NonContiguousSpanError,
    StructureConflictError,
    UnderdeterminedExtentError
)
from .rect import Rect
from .scalar_map import ScalarMap
from .statuses import CliqueOrdering, Direction, MergeStrategy
from .table_annotation import EdgeSet, canonical_edge
from .table_grid import GridCell, TableGrid, validate_grid

logger = logging.getLogger(__name__)

DEFAULT_MERGE_RATIO = 0.5
# Пиксель сегментации считается «единицей» при значении не ниже этого порога
FOREGROUND_LEVEL = 0.5

Position = Tuple[int, int]


@dataclass(frozen=True)
class CellBox:
    """Выровненная рамка непустой ячейки"""
    id: int
    rect: Rect
    text_rect: Optional[Rect] = None


@dataclass(frozen=True)
class RelationGraph:
    """Граф рамок: рёбра горизонтальной и вертикальной связи"""
    nodes: Tuple[CellBox, ...]
    h_edges: EdgeSet = field(default_factory=frozenset)
    v_edges: EdgeSet = field(default_factory=frozenset)

    def node(self, node_id: int) -> CellBox:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)


@dataclass(frozen=True)
class IndexAssignment:
    """Индексы строк и столбцов каждого узла"""
    rows: Dict[int, FrozenSet[int]]
    cols: Dict[int, FrozenSet[int]]

    @property
    def n_rows(self) -> int:
        return max((max(r) for r in self.rows.values()), default=-1) + 1

    @property
    def n_cols(self) -> int:
        return max((max(c) for c in self.cols.values()), default=-1) + 1

    def span(self, node_id: int) -> Tuple[int, int, int, int]:
        rows, cols = self.rows[node_id], self.cols[node_id]
        return min(rows), max(rows), min(cols), max(cols)

    def occupancy(self) -> Dict[Position, int]:
        """Владелец каждой занятой позиции сетки"""
        owner: Dict[Position, int] = {}
        for node_id in sorted(self.rows):
            for r in sorted(self.rows[node_id]):
                for c in sorted(self.cols[node_id]):
                    if (r, c) in owner:
                        raise StructureConflictError(
                            f"nodes {owner[(r, c)]} and {node_id} both claim ({r}, {c})")
                    owner[(r, c)] = node_id
        return owner


@dataclass(frozen=True)
class EmptyCell:
    """Пустая ячейка с выровненной рамкой"""
    row_start: int
    row_end: int
    col_start: int
    col_end: int
    rect: Rect

    @property
    def positions(self) -> List[Position]:
        return [(r, c) for r in range(self.row_start, self.row_end + 1)
                for c in range(self.col_start, self.col_end + 1)]


@dataclass(frozen=True)
class MergeLink:
    """Голосование по полосе между двумя соседними пустыми ячейками"""
    a: Position
    b: Position
    direction: Direction
    ratio: float
    linked: bool


@dataclass(frozen=True)
class MergeResult:
    cells: Tuple[EmptyCell, ...]
    links: Tuple[MergeLink, ...]

    @property
    def merge_count(self) -> int:
        """Число пар, проголосовавших за слияние; не растёт с порогом"""
        return sum(1 for link in self.links if link.linked)

    @property
    def absorbed_count(self) -> int:
        """Сколько одиночных ячеек поглощено прямоугольными группами"""
        return sum((c.row_end - c.row_start + 1) * (c.col_end - c.col_start + 1) - 1
                   for c in self.cells)


@dataclass(frozen=True)
class RecoveryConfig:
    """Параметры восстановления структуры"""
    merge_ratio: float = DEFAULT_MERGE_RATIO
    merge_strategy: MergeStrategy = MergeStrategy.VOTE
    clique_ordering: CliqueOrdering = CliqueOrdering.SHARED_BAND

    def __post_init__(self):
        if not 0 <= self.merge_ratio <= 1:
            raise ValueError(f"merge_ratio must lie in [0, 1], got {self.merge_ratio}")

    def to_dict(self) -> Dict[str, object]:
        return {
            'merge_ratio': self.merge_ratio,
            'merge_strategy': self.merge_strategy.value,
            'clique_ordering': self.clique_ordering.value
        }


def match_cells(boxes: Sequence[CellBox]) -> RelationGraph:
    """Связать рамки, если середина одной попадает в диапазон другой"""
    boxes = tuple(boxes)
    h_edges, v_edges = set(), set()
    for i, a in enumerate(boxes):
        for b in boxes[i + 1:]:
            ra, rb = a.rect, b.rect
            if rb.y1 <= ra.y_mid <= rb.y2 or ra.y1 <= rb.y_mid <= ra.y2:
                h_edges.add(canonical_edge(a.id, b.id))
            if rb.x1 <= ra.x_mid <= rb.x2 or ra.x1 <= rb.x_mid <= ra.x2:
                v_edges.add(canonical_edge(a.id, b.id))
    return RelationGraph(boxes, frozenset(h_edges), frozenset(v_edges))


def _sorted_cliques(graph: RelationGraph, edges: EdgeSet, axis: str,
                    ordering: CliqueOrdering) -> List[List[int]]:
    g = nx.Graph()
    g.add_nodes_from(n.id for n in graph.nodes)
    g.add_edges_from(edges)
    rects = {n.id: n.rect for n in graph.nodes}

    def key(clique: List[int]):
        members = [rects[i] for i in clique]
        if axis == 'y':
            lo, hi = max(r.y1 for r in members), min(r.y2 for r in members)
            mean_main = float(np.mean([r.y_mid for r in members]))
            mean_cross = float(np.mean([r.x_mid for r in members]))
        else:
            lo, hi = max(r.x1 for r in members), min(r.x2 for r in members)
            mean_main = float(np.mean([r.x_mid for r in members]))
            mean_cross = float(np.mean([r.y_mid for r in members]))
        primary = (lo + hi) / 2 if ordering == CliqueOrdering.SHARED_BAND else mean_main
        return primary, mean_cross, min(clique)

    return sorted((sorted(c) for c in nx.find_cliques(g)), key=key)


def _indices_from_cliques(cliques: List[List[int]], node_ids: Iterable[int],
                          axis_name: str) -> Dict[int, FrozenSet[int]]:
    indices: Dict[int, Set[int]] = {node_id: set() for node_id in node_ids}
    for rank, clique in enumerate(cliques):
        for node_id in clique:
            indices[node_id].add(rank)
    for node_id, found in indices.items():
        if max(found) - min(found) + 1 != len(found):
            raise NonContiguousSpanError(node_id, axis_name, found)
    return {node_id: frozenset(found) for node_id, found in indices.items()}


def assign_indices(graph: RelationGraph,
                   ordering: CliqueOrdering = CliqueOrdering.SHARED_BAND) -> IndexAssignment:
    """Номера строк и столбцов по рангам максимальных клик"""
    node_ids = [n.id for n in graph.nodes]
    row_cliques = _sorted_cliques(graph, graph.h_edges, 'y', ordering)
    col_cliques = _sorted_cliques(graph, graph.v_edges, 'x', ordering)
    return IndexAssignment(
        rows=_indices_from_cliques(row_cliques, node_ids, "row"),
        cols=_indices_from_cliques(col_cliques, node_ids, "column")
    )


def _line_extent(graph: RelationGraph, indices: Dict[int, FrozenSet[int]],
                 line: int, axis: str) -> Tuple[float, float]:
    """Границы строки (столбца) по узлам, занимающим ровно её"""
    owners = [graph.node(node_id).rect for node_id, found in sorted(indices.items())
              if found == frozenset((line,))]
    if not owners:
        raise UnderdeterminedExtentError("row" if axis == 'y' else "column", line)
    if axis == 'y':
        return min(r.y1 for r in owners), max(r.y2 for r in owners)
    return min(r.x1 for r in owners), max(r.x2 for r in owners)


def find_empty_cells(assign: IndexAssignment, graph: RelationGraph) -> List[EmptyCell]:
    """Вакантные позиции сетки как пустые ячейки 1x1"""
    owner = assign.occupancy()
    vacancies = []
    row_extents: Dict[int, Tuple[float, float]] = {}
    col_extents: Dict[int, Tuple[float, float]] = {}
    for r in range(assign.n_rows):
        for c in range(assign.n_cols):
            if (r, c) in owner:
                continue
            if r not in row_extents:
                row_extents[r] = _line_extent(graph, assign.rows, r, 'y')
            if c not in col_extents:
                col_extents[c] = _line_extent(graph, assign.cols, c, 'x')
            (y1, y2), (x1, x2) = row_extents[r], col_extents[c]
            vacancies.append(EmptyCell(r, r, c, c, Rect(x1, y1, x2, y2)))
    return vacancies


def strip_ratio(a: Rect, b: Rect, direction: Direction, seg: ScalarMap) -> float:
    """Доля пикселей переднего плана в полосе между соседними рамками"""
    if direction == Direction.HORIZONTAL:
        left, right = (a, b) if a.x1 <= b.x1 else (b, a)
        x1, x2 = left.x2, right.x1
        y1, y2 = max(a.y1, b.y1), min(a.y2, b.y2)
    else:
        top, bottom = (a, b) if a.y1 <= b.y1 else (b, a)
        y1, y2 = top.y2, bottom.y1
        x1, x2 = max(a.x1, b.x1), min(a.x2, b.x2)
    if x1 >= x2 or y1 >= y2:
        return 1.0
    c0, r0, c1, r1 = Rect(x1, y1, x2, y2).pixel_bounds()
    c0, r0, c1, r1 = max(c0, 0), max(r0, 0), min(c1, seg.width), min(r1, seg.height)
    if c1 <= c0 or r1 <= r0:
        return 1.0
    return float(np.mean(seg.values[r0:r1, c0:c1] >= FOREGROUND_LEVEL))


def _vote_links(cells: Sequence[EmptyCell], seg: Optional[ScalarMap], ratio_threshold: float,
                strategy: MergeStrategy) -> List[MergeLink]:
    by_position = {(c.row_start, c.col_start): c for c in cells}
    links = []
    for (r, c), cell in sorted(by_position.items()):
        for direction, neighbour in ((Direction.HORIZONTAL, (r, c + 1)), (Direction.VERTICAL, (r + 1, c))):
            other = by_position.get(neighbour)
            if other is None:
                continue
            if strategy == MergeStrategy.VOTE:
                ratio = strip_ratio(cell.rect, other.rect, direction, seg)
                linked = ratio > ratio_threshold
            else:
                ratio = 1.0 if strategy == MergeStrategy.MAXIMUM else 0.0
                linked = strategy == MergeStrategy.MAXIMUM
            links.append(MergeLink((r, c), neighbour, direction, ratio, linked))
    return links


def _group_rectangles(positions: Sequence[Position], links: Sequence[MergeLink]) -> List[List[Position]]:
    """Жадное объединение по связям, пока группы остаются прямоугольниками"""
    linked = {frozenset((l.a, l.b)) for l in links if l.linked}
    group_of: Dict[Position, int] = {p: i for i, p in enumerate(positions)}
    members: Dict[int, Set[Position]] = {i: {p} for i, p in enumerate(positions)}

    def acceptable(union: Set[Position]) -> bool:
        rows = [p[0] for p in union]
        cols = [p[1] for p in union]
        height, width = max(rows) - min(rows) + 1, max(cols) - min(cols) + 1
        if height * width != len(union):
            return False
        for (r, c) in union:
            for neighbour in ((r, c + 1), (r + 1, c)):
                if neighbour in union and frozenset(((r, c), neighbour)) not in linked:
                    return False
        return True

    changed = True
    while changed:
        changed = False
        for link in links:
            if not link.linked:
                continue
            ga, gb = group_of[link.a], group_of[link.b]
            if ga == gb:
                continue
            union = members[ga] | members[gb]
            if not acceptable(union):
                continue
            keep, drop = min(ga, gb), max(ga, gb)
            members[keep] = union
            for p in members.pop(drop):
                group_of[p] = keep
            changed = True
    return [sorted(members[g]) for g in sorted(members)]


def merge_empty_cells(vacancies: Sequence[EmptyCell], seg: Optional[ScalarMap],
                      ratio_threshold: float = DEFAULT_MERGE_RATIO,
                      strategy: MergeStrategy = MergeStrategy.VOTE) -> MergeResult:
    """Слить соседние пустые ячейки по голосованию пикселей сегментации"""
    if not 0 <= ratio_threshold <= 1:
        raise ValueError(f"ratio_threshold must lie in [0, 1], got {ratio_threshold}")
    if strategy == MergeStrategy.VOTE and seg is None and vacancies:
        raise ValueError("pixel voting needs a segmentation map")
    links = _vote_links(vacancies, seg, ratio_threshold, strategy)
    rect_of = {(c.row_start, c.col_start): c.rect for c in vacancies}
    groups = _group_rectangles(sorted(rect_of), links)
    merged = []
    for group in groups:
        rows = [p[0] for p in group]
        cols = [p[1] for p in group]
        merged.append(EmptyCell(min(rows), max(rows), min(cols), max(cols),
                                Rect.bounding(rect_of[p] for p in group)))
    merged.sort(key=lambda e: (e.row_start, e.col_start))
    return MergeResult(tuple(merged), tuple(links))


def recover(boxes: Sequence[CellBox], seg: Optional[ScalarMap],
            config: RecoveryConfig = RecoveryConfig()) -> TableGrid:
    """Сопоставление ячеек, поиск и слияние пустых ячеек, сборка сетки"""
    if not boxes:
        raise ValueError("recovery needs at least one box")
    graph = match_cells(boxes)
    assign = assign_indices(graph, config.clique_ordering)
    vacancies = find_empty_cells(assign, graph)
    merged = merge_empty_cells(vacancies, seg, config.merge_ratio, config.merge_strategy)

    cells = []
    for node in graph.nodes:
        r0, r1, c0, c1 = assign.span(node.id)
        cells.append(GridCell(node.id, node.rect, r0, r1, c0, c1, text_rect=node.text_rect))
    next_id = max(n.id for n in graph.nodes) + 1
    for offset, empty in enumerate(merged.cells):
        cells.append(GridCell(next_id + offset, empty.rect, empty.row_start, empty.row_end,
                              empty.col_start, empty.col_end, is_empty=True))

    grid = TableGrid.with_adjacency(cells)
    violations = validate_grid(grid)
    if violations:
        raise InvalidGridError(violations)
    logger.debug("recovered %dx%d grid with %d empty cells", grid.n_rows, grid.n_cols, len(merged.cells))
    return grid
