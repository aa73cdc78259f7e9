from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from apted import APTED, Config
from apted.helpers import Tree

from .domain_exceptions import InvalidGridError
from .rect import Rect
from .statuses import Direction
from .table_annotation import TableAnnotation, canonical_edge, derive_aligned_boxes, relations_from_annotation
from .table_grid import GridCell, TableGrid, validate_grid

DEFAULT_IOU = 0.5
DEFAULT_DETECTION_IOU = 0.7

RelationRecord = Tuple[int, int, Direction]


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 1.0


def _harmonic(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass(frozen=True)
class RelationScore:
    """Счётчики отношений соседства; сумма даёт микро-усреднение"""
    correct: int = 0
    predicted: int = 0
    ground_truth: int = 0

    @property
    def precision(self) -> float:
        return _ratio(self.correct, self.predicted)

    @property
    def recall(self) -> float:
        return _ratio(self.correct, self.ground_truth)

    @property
    def f1(self) -> float:
        return _harmonic(self.precision, self.recall)

    def __add__(self, other: 'RelationScore') -> 'RelationScore':
        if not isinstance(other, RelationScore):
            raise TypeError("Can only add RelationScore to RelationScore")
        return RelationScore(self.correct + other.correct,
                             self.predicted + other.predicted,
                             self.ground_truth + other.ground_truth)

    def to_dict(self) -> Dict[str, float]:
        return {'correct': self.correct, 'predicted': self.predicted,
                'ground_truth': self.ground_truth, 'precision': self.precision,
                'recall': self.recall, 'f1': self.f1}


@dataclass(frozen=True)
class DetectionScore:
    """Счётчики обнаружения рамок при пороге IoU"""
    matched: int = 0
    predicted: int = 0
    ground_truth: int = 0

    @property
    def precision(self) -> float:
        return _ratio(self.matched, self.predicted)

    @property
    def recall(self) -> float:
        return _ratio(self.matched, self.ground_truth)

    @property
    def hmean(self) -> float:
        return _harmonic(self.precision, self.recall)

    def __add__(self, other: 'DetectionScore') -> 'DetectionScore':
        if not isinstance(other, DetectionScore):
            raise TypeError("Can only add DetectionScore to DetectionScore")
        return DetectionScore(self.matched + other.matched,
                              self.predicted + other.predicted,
                              self.ground_truth + other.ground_truth)

    def to_dict(self) -> Dict[str, float]:
        return {'matched': self.matched, 'predicted': self.predicted,
                'ground_truth': self.ground_truth, 'precision': self.precision,
                'recall': self.recall, 'hmean': self.hmean}


def greedy_match(pred: Dict[int, Rect], gt: Dict[int, Rect], iou_threshold: float) -> Dict[int, int]:
    """Взаимно-однозначное сопоставление по убыванию IoU"""
    if not 0 < iou_threshold <= 1:
        raise ValueError(f"iou_threshold must lie in (0, 1], got {iou_threshold}")
    candidates = []
    for pid, prect in pred.items():
        for gid, grect in gt.items():
            iou = prect.iou(grect)
            if iou >= iou_threshold:
                candidates.append((-iou, pid, gid))
    candidates.sort()
    matching: Dict[int, int] = {}
    used: Set[int] = set()
    for _, pid, gid in candidates:
        if pid in matching or gid in used:
            continue
        matching[pid] = gid
        used.add(gid)
    return matching


def _relation_records(h_edges: Iterable[Tuple[int, int]], v_edges: Iterable[Tuple[int, int]],
                      keep: Set[int]) -> Set[RelationRecord]:
    records = set()
    for direction, edges in ((Direction.HORIZONTAL, h_edges), (Direction.VERTICAL, v_edges)):
        for a, b in edges:
            if a in keep and b in keep:
                records.add((*canonical_edge(a, b), direction))
    return records


def _match_cells(pred: TableGrid, gt: TableAnnotation, iou_threshold: float) -> Dict[int, int]:
    gt_text = {c.id: c.text_rect for c in gt.non_empty_cells}
    by_text = {c.id: c.text_rect for c in pred.non_empty_cells if c.text_rect is not None}
    matching = greedy_match(by_text, gt_text, iou_threshold)
    # Ячейки без текстовой рамки сравниваются по выровненным рамкам
    rest = {c.id: c.aligned_rect for c in pred.non_empty_cells if c.text_rect is None}
    if rest:
        gt_aligned = derive_aligned_boxes(gt)
        free = {gid: gt_aligned[gid] for gid in gt_text if gid not in set(matching.values())}
        matching.update(greedy_match(rest, free, iou_threshold))
    return matching


def relations_count(gt: TableAnnotation) -> int:
    """Число эталонных отношений между непустыми ячейками"""
    gt_h, gt_v = relations_from_annotation(gt)
    return len(_relation_records(gt_h, gt_v, {c.id for c in gt.non_empty_cells}))


def relation_score(pred: TableGrid, gt: TableAnnotation, iou_threshold: float = DEFAULT_IOU) -> RelationScore:
    """Точность и полнота отношений соседства между непустыми ячейками"""
    violations = validate_grid(pred)
    if violations:
        raise InvalidGridError(violations)
    matching = _match_cells(pred, gt, iou_threshold)

    pred_records = _relation_records(pred.h_edges, pred.v_edges, {c.id for c in pred.non_empty_cells})
    gt_h, gt_v = relations_from_annotation(gt)
    gt_records = _relation_records(gt_h, gt_v, {c.id for c in gt.non_empty_cells})

    correct = 0
    for a, b, direction in pred_records:
        if a in matching and b in matching:
            if (*canonical_edge(matching[a], matching[b]), direction) in gt_records:
                correct += 1
    return RelationScore(correct, len(pred_records), len(gt_records))


class StructNode(Tree):
    """Узел дерева структуры: table -> tr -> td(rowspan, colspan)"""

    def __init__(self, tag: str, rowspan: Optional[int] = None, colspan: Optional[int] = None,
                 *children: 'StructNode'):
        self.tag = tag
        self.name = tag
        self.rowspan = rowspan
        self.colspan = colspan
        self.children = list(children)

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.children)

    def bracket(self) -> str:
        """Скобочная запись дерева"""
        if self.tag == 'td':
            label = f"td:{self.rowspan}x{self.colspan}"
        else:
            label = self.tag
        return "{" + label + "".join(child.bracket() for child in self.children) + "}"


class StructConfig(Config):
    """Стоимости правок: вставка и удаление 1, замена 1 при разных тегах или спанах"""

    def rename(self, node1: StructNode, node2: StructNode) -> float:
        if (node1.tag != node2.tag or node1.rowspan != node2.rowspan or
                node1.colspan != node2.colspan):
            return 1.0
        return 0.0

    def children(self, node: StructNode) -> List[StructNode]:
        return node.children


def struct_tree(cells: Sequence[GridCell], n_rows: int) -> StructNode:
    """Ячейка висит на строке, где она начинается, как в HTML"""
    rows = []
    for r in range(n_rows):
        starting = sorted((c for c in cells if c.row_start == r), key=lambda c: c.col_start)
        rows.append(StructNode('tr', None, None,
                               *(StructNode('td', c.row_span, c.col_span) for c in starting)))
    return StructNode('table', None, None, *rows)


def tree_edit_distance(t1: StructNode, t2: StructNode) -> float:
    return float(APTED(t1, t2, StructConfig()).compute_edit_distance())


def teds_between(t1: StructNode, t2: StructNode) -> float:
    return 1.0 - tree_edit_distance(t1, t2) / max(t1.size(), t2.size())


def _grid_tree(grid: TableGrid) -> StructNode:
    violations = validate_grid(grid)
    if violations:
        raise InvalidGridError(violations)
    return struct_tree(grid.cells, grid.n_rows)


def teds_struct(pred: TableGrid, gt: TableAnnotation) -> float:
    """TEDS только по структуре таблицы"""
    gt_cells = [GridCell(c.id, Rect(0, 0, 1, 1), c.row_start, c.row_end, c.col_start, c.col_end,
                         is_empty=c.is_empty) for c in gt.cells]
    return teds_between(_grid_tree(pred), struct_tree(gt_cells, gt.n_rows))


def detection_score(pred: Sequence[Rect], gt: Sequence[Rect],
                    iou_threshold: float = DEFAULT_DETECTION_IOU) -> DetectionScore:
    """Обнаружение рамок: однозначное жадное сопоставление по IoU"""
    matching = greedy_match(dict(enumerate(pred)), dict(enumerate(gt)), iou_threshold)
    return DetectionScore(len(matching), len(pred), len(gt))


def aligned_detection_score(pred: TableGrid, gt: TableAnnotation,
                            iou_threshold: float = DEFAULT_DETECTION_IOU) -> DetectionScore:
    """Обнаружение выровненных рамок непустых ячеек"""
    aligned = derive_aligned_boxes(gt)
    return detection_score([c.aligned_rect for c in pred.non_empty_cells],
                           [aligned[c.id] for c in gt.non_empty_cells], iou_threshold)


def empty_cell_detection_score(pred: TableGrid, gt: TableAnnotation,
                               iou_threshold: float = DEFAULT_DETECTION_IOU) -> DetectionScore:
    """Обнаружение выровненных рамок пустых ячеек"""
    aligned = derive_aligned_boxes(gt)
    return detection_score([c.aligned_rect for c in pred.empty_cells],
                           [aligned[c.id] for c in gt.cells if c.is_empty], iou_threshold)
