import unittest
from functools import lru_cache

import numpy as np

from domain import (
    CellAnnotation, GridCell, InvalidGridError, Rect, RelationScore, TableAnnotation, TableGrid,
    detection_score, empty_cell_detection_score, grid_from_annotation, grid_to_annotation, relation_score,
    teds_struct, tree_edit_distance
)
from domain.metrics import StructNode, relations_count
from infrastructure.synthetic_tables import SynthConfig, SyntheticTableGenerator

LABELS = (('td', 1, 1), ('td', 1, 2), ('td', 2, 1), ('tr', None, None))


def full_2x2() -> TableAnnotation:
    return TableAnnotation(100, 80, (
        CellAnnotation(0, Rect(10, 10, 30, 20), 0, 0, 0, 0),
        CellAnnotation(1, Rect(50, 12, 70, 18), 0, 0, 1, 1),
        CellAnnotation(2, Rect(12, 40, 28, 50), 1, 1, 0, 0),
        CellAnnotation(3, Rect(52, 40, 68, 52), 1, 1, 1, 1),
    ))


def to_struct(tree) -> StructNode:
    (tag, rowspan, colspan), children = tree
    return StructNode(tag, rowspan, colspan, *(to_struct(child) for child in children))


def size(forest) -> int:
    return sum(1 + size(children) for _, children in forest)


@lru_cache(maxsize=None)
def forest_distance(f, g) -> int:
    """Расстояние между упорядоченными лесами по рекуррентному определению"""
    if not f and not g:
        return 0
    if not f:
        return size(g)
    if not g:
        return size(f)
    (v_label, v_children), (w_label, w_children) = f[-1], g[-1]
    return min(
        forest_distance(f[:-1] + v_children, g) + 1,
        forest_distance(f, g[:-1] + w_children) + 1,
        forest_distance(v_children, w_children) + forest_distance(f[:-1], g[:-1]) + (v_label != w_label)
    )


def random_tree(rng: np.random.Generator, n: int):
    parents = [None] + [int(rng.integers(0, i)) for i in range(1, n)]
    labels = [LABELS[int(rng.integers(0, len(LABELS)))] for _ in range(n)]

    def build(i):
        return labels[i], tuple(build(j) for j in range(n) if parents[j] == i)
    return build(0)


class TestTreeEditDistance(unittest.TestCase):
    """Тесты расстояния редактирования деревьев"""

    def test_colspan_substitution(self):
        """Тест: замена colspan стоит 1"""
        a = StructNode('table', None, None, StructNode('tr', None, None, StructNode('td', 1, 1)))
        b = StructNode('table', None, None, StructNode('tr', None, None, StructNode('td', 1, 2)))
        self.assertEqual(tree_edit_distance(a, b), 1.0)

    def test_bracket(self):
        """Тест скобочной записи"""
        tree = StructNode('table', None, None, StructNode('tr', None, None, StructNode('td', 2, 1)))
        self.assertEqual(tree.bracket(), "{table{tr{td:2x1}}}")
        self.assertEqual(tree.size(), 3)

    def test_matches_brute_force(self):
        """Тест: совпадение с перебором на случайных деревьях до 8 узлов"""
        rng = np.random.Generator(np.random.PCG64(3))
        for _ in range(150):
            a = random_tree(rng, int(rng.integers(1, 9)))
            b = random_tree(rng, int(rng.integers(1, 9)))
            expected = forest_distance((a,), (b,))
            self.assertEqual(tree_edit_distance(to_struct(a), to_struct(b)), float(expected))


class TestTeds(unittest.TestCase):
    """Тесты TEDS по структуре"""

    def test_identical(self):
        """Тест: совпадающие структуры дают 1"""
        ann = full_2x2()
        self.assertEqual(teds_struct(grid_from_annotation(ann), ann), 1.0)

    def test_extra_cell(self):
        """Тест: сетка 1x2 против эталона 1x1 даёт 0.75"""
        gt = TableAnnotation(40, 20, (CellAnnotation(0, Rect(5, 5, 15, 15), 0, 0, 0, 0),))
        pred = TableGrid.with_adjacency([GridCell(0, Rect(0, 0, 20, 20), 0, 0, 0, 0),
                                         GridCell(1, Rect(20, 0, 40, 20), 0, 0, 1, 1)])
        self.assertEqual(teds_struct(pred, gt), 0.75)

    def test_invalid_grid(self):
        """Тест: сетка с дырой не оценивается"""
        pred = TableGrid.with_adjacency([GridCell(0, Rect(0, 0, 10, 10), 0, 0, 0, 0),
                                         GridCell(1, Rect(20, 20, 30, 30), 1, 1, 1, 1)])
        with self.assertRaises(InvalidGridError):
            teds_struct(pred, full_2x2())

    def test_range_on_random_pairs(self):
        """Тест: на случайных парах таблиц TEDS лежит в [0, 1] и симметричен"""
        generator = SyntheticTableGenerator(SynthConfig(span_prob=0.3, empty_prob=0.3))
        tables = [generator.generate_table(seed) for seed in range(12)]
        for a in tables:
            for b in tables:
                score = teds_struct(grid_from_annotation(a), b)
                self.assertGreaterEqual(score, 0.0)
                self.assertLessEqual(score, 1.0)
                self.assertAlmostEqual(score, teds_struct(grid_from_annotation(b), a), places=12)
            self.assertEqual(teds_struct(grid_from_annotation(a), a), 1.0)


class TestRelationScore(unittest.TestCase):
    """Тесты точности и полноты отношений соседства"""

    def test_identical(self):
        """Тест: эталонная сетка даёт P = R = F1 = 1"""
        ann = full_2x2()
        score = relation_score(grid_from_annotation(ann), ann)
        self.assertEqual((score.correct, score.predicted, score.ground_truth), (4, 4, 4))
        self.assertEqual(score.f1, 1.0)
        self.assertEqual(relations_count(ann), 4)

    def test_missing_relation(self):
        """Тест: одно отношение не предсказано - R = 0.75, P = 1"""
        ann = full_2x2()
        grid = grid_from_annotation(ann)
        pred = TableGrid(grid.cells, grid.h_edges - {(2, 3)}, grid.v_edges)
        score = relation_score(pred, ann)
        self.assertEqual(score.recall, 0.75)
        self.assertEqual(score.precision, 1.0)

    def test_unmatched_box(self):
        """Тест: рамка без пары в эталоне теряет свои отношения"""
        ann = full_2x2()
        grid = grid_from_annotation(ann)
        cells = [c if c.id != 3 else GridCell(3, c.aligned_rect, 1, 1, 1, 1, text_rect=Rect(80, 60, 95, 75))
                 for c in grid.cells]
        score = relation_score(TableGrid.with_adjacency(cells), ann)
        self.assertEqual((score.correct, score.predicted, score.ground_truth), (2, 4, 4))
        self.assertEqual(score.precision, 0.5)

    def test_empty_sets(self):
        """Тест: без отношений точность и полнота равны 1"""
        ann = TableAnnotation(30, 30, (CellAnnotation(0, Rect(5, 5, 20, 15), 0, 0, 0, 0),))
        score = relation_score(grid_from_annotation(ann), ann)
        self.assertEqual((score.precision, score.recall, score.f1), (1.0, 1.0, 1.0))

    def test_empty_cells_ignored(self):
        """Тест: отношения с пустыми ячейками не считаются"""
        ann = TableAnnotation(100, 80, full_2x2().cells[:3] + (CellAnnotation(3, None, 1, 1, 1, 1),))
        self.assertEqual(relations_count(ann), 2)
        score = relation_score(grid_from_annotation(ann), ann)
        self.assertEqual((score.correct, score.predicted), (2, 2))

    def test_swap_exchanges_precision_and_recall(self):
        """Тест: обмен предсказания и эталона меняет местами P и R"""
        gt = full_2x2()
        # Строка 0 и строка 2 целиком, между ними ячейки 1 и 2
        spans = {0: (0, 0, 0, 1), 1: (1, 1, 0, 0), 2: (1, 1, 1, 1), 3: (2, 2, 0, 1)}
        pred = TableGrid.with_adjacency([GridCell(c.id, c.text_rect, *spans[c.id], text_rect=c.text_rect)
                                         for c in gt.cells])
        forward = relation_score(pred, gt)
        backward = relation_score(grid_from_annotation(gt), grid_to_annotation(pred, 100, 80))
        self.assertEqual((forward.correct, forward.predicted, forward.ground_truth), (2, 5, 4))
        self.assertEqual((backward.correct, backward.predicted, backward.ground_truth), (2, 4, 5))
        self.assertEqual((forward.precision, forward.recall), (backward.recall, backward.precision))

    def test_micro_average(self):
        """Тест: сложение счётчиков"""
        total = RelationScore(2, 4, 4) + RelationScore(3, 3, 4)
        self.assertEqual((total.correct, total.predicted, total.ground_truth), (5, 7, 8))
        self.assertAlmostEqual(total.precision, 5 / 7)
        with self.assertRaises(TypeError):
            total + 1


class TestDetectionScore(unittest.TestCase):
    """Тесты обнаружения рамок"""

    def test_threshold(self):
        """Тест: IoU 0.82 проходит порог 0.7, IoU 0.33 - нет"""
        gt = [Rect(0, 0, 10, 10), Rect(21, 0, 31, 10)]
        self.assertEqual(detection_score([Rect(0, 0, 10, 10), Rect(20, 0, 30, 10)], gt).matched, 2)
        self.assertEqual(detection_score([Rect(0, 0, 10, 10), Rect(26, 0, 36, 10)], gt).matched, 1)

    def test_one_to_one(self):
        """Тест: две одинаковые рамки сопоставляются только с одной эталонной"""
        score = detection_score([Rect(0, 0, 10, 10), Rect(0, 0, 10, 10)], [Rect(0, 0, 10, 10)])
        self.assertEqual((score.matched, score.precision, score.recall), (1, 0.5, 1.0))

    def test_empty_cells(self):
        """Тест: пустые ячейки эталонной сетки находятся полностью"""
        ann = TableAnnotation(100, 80, full_2x2().cells[:3] + (CellAnnotation(3, None, 1, 1, 1, 1),))
        score = empty_cell_detection_score(grid_from_annotation(ann), ann)
        self.assertEqual((score.matched, score.predicted, score.ground_truth), (1, 1, 1))


if __name__ == '__main__':
    unittest.main()
