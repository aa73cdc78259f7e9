import unittest

import numpy as np

from domain import (
    CellBox, EmptyCell, IndexAssignment, MergeStrategy, NonContiguousSpanError, RecoveryConfig,
    Rect, ScalarMap, UnderdeterminedExtentError, assign_indices, derive_aligned_boxes,
    find_empty_cells, match_cells, merge_empty_cells, recover, validate_grid
)
from domain.statuses import CliqueOrdering, Direction
from domain.structure_recovery import RelationGraph, strip_ratio
from infrastructure.synthetic_tables import SynthConfig, SyntheticTableGenerator


def band_oracle(rects, axis: str):
    """Полосы - минимальные по включению интервалы; узлу достаются вложенные в него полосы"""
    lo, hi = ('y1', 'y2') if axis == 'y' else ('x1', 'x2')
    intervals = {(getattr(r, lo), getattr(r, hi)) for r in rects.values()}
    bands = sorted(i for i in intervals
                   if not any(j != i and i[0] <= j[0] and j[1] <= i[1] for j in intervals))
    return {node_id: frozenset(k for k, band in enumerate(bands)
                               if getattr(r, lo) <= band[0] and band[1] <= getattr(r, hi))
            for node_id, r in rects.items()}


class TestMatchCells(unittest.TestCase):
    """Тесты сопоставления рамок"""

    def test_horizontal(self):
        """Тест: середина B по y внутри A - горизонтальное ребро"""
        graph = match_cells([CellBox(0, Rect(0, 0, 10, 10)), CellBox(1, Rect(12, 1, 20, 9))])
        self.assertEqual(graph.h_edges, {(0, 1)})
        self.assertEqual(graph.v_edges, frozenset())

    def test_vertical(self):
        """Тест: рамки друг под другом - вертикальное ребро"""
        graph = match_cells([CellBox(0, Rect(0, 0, 10, 10)), CellBox(2, Rect(0, 12, 10, 20))])
        self.assertEqual(graph.h_edges, frozenset())
        self.assertEqual(graph.v_edges, {(0, 2)})

    def test_diagonal(self):
        """Тест: диагональные рамки не связаны"""
        graph = match_cells([CellBox(0, Rect(0, 0, 10, 10)), CellBox(3, Rect(12, 12, 20, 20))])
        self.assertEqual((graph.h_edges, graph.v_edges), (frozenset(), frozenset()))


class TestAssignIndices(unittest.TestCase):
    """Тесты нумерации строк и столбцов"""

    def test_missing_corner(self):
        """Тест: 2x2 без ячейки (1, 1)"""
        boxes = [CellBox(0, Rect(0, 0, 10, 10)), CellBox(1, Rect(12, 0, 22, 10)), CellBox(2, Rect(0, 12, 10, 22))]
        graph = match_cells(boxes)
        assign = assign_indices(graph)
        self.assertEqual(assign.rows, {0: {0}, 1: {0}, 2: {1}})
        self.assertEqual(assign.cols, {0: {0}, 1: {1}, 2: {0}})
        vacancies = find_empty_cells(assign, graph)
        self.assertEqual([(v.row_start, v.col_start) for v in vacancies], [(1, 1)])
        self.assertEqual(vacancies[0].rect, Rect(12, 12, 22, 22))

    def test_single_row(self):
        """Тест: полная строка 1x3 - одна клика"""
        boxes = [CellBox(i, Rect(12 * i, 0, 12 * i + 10, 10)) for i in range(3)]
        assign = assign_indices(match_cells(boxes))
        self.assertEqual(assign.rows, {0: {0}, 1: {0}, 2: {0}})
        self.assertEqual(assign.cols, {0: {0}, 1: {1}, 2: {2}})

    def test_row_span(self):
        """Тест: X на две строки рядом с B0 и B1"""
        boxes = [CellBox(0, Rect(0, 0, 10, 22)), CellBox(1, Rect(12, 0, 22, 10)), CellBox(2, Rect(12, 12, 22, 22))]
        graph = match_cells(boxes)
        self.assertEqual(graph.h_edges, {(0, 1), (0, 2)})
        assign = assign_indices(graph)
        self.assertEqual(assign.rows[0], {0, 1})
        self.assertEqual(assign.span(0), (0, 1, 0, 0))

    def test_block_span_leaves_no_vacancies(self):
        """Тест: 3x3 с ячейкой 2x2 в левом верхнем углу и пятью одиночными"""
        boxes = [
            CellBox(0, Rect(0, 0, 22, 22)),
            CellBox(1, Rect(24, 0, 34, 10)), CellBox(2, Rect(24, 12, 34, 22)),
            CellBox(3, Rect(0, 24, 10, 34)), CellBox(4, Rect(12, 24, 22, 34)), CellBox(5, Rect(24, 24, 34, 34)),
        ]
        graph = match_cells(boxes)
        assign = assign_indices(graph)
        self.assertEqual(assign.span(0), (0, 1, 0, 1))
        self.assertEqual(find_empty_cells(assign, graph), [])

    def test_member_mean_ordering(self):
        """Тест: порядок по средним центрам на таблице без спанов совпадает с порядком по полосам"""
        boxes = [CellBox(3 * r + c, Rect(12 * c, 12 * r, 12 * c + 10, 12 * r + 10)) for r in range(2) for c in range(3)]
        graph = match_cells(boxes)
        by_band = assign_indices(graph)
        by_mean = assign_indices(graph, CliqueOrdering.MEMBER_MEAN)
        self.assertEqual(by_band, by_mean)
        self.assertEqual(by_mean.span(5), (1, 1, 2, 2))

    def test_non_contiguous(self):
        """Тест: узел в первой и третьей строке, но не во второй"""
        nodes = (CellBox(0, Rect(0, 0, 10, 30)), CellBox(1, Rect(12, 0, 22, 8)),
                 CellBox(2, Rect(12, 10, 22, 18)), CellBox(3, Rect(12, 20, 22, 30)))
        graph = RelationGraph(nodes, frozenset({(0, 1), (0, 3)}), frozenset())
        with self.assertRaises(NonContiguousSpanError) as ctx:
            assign_indices(graph)
        self.assertEqual(ctx.exception.node_id, 0)

    def test_underdetermined_column(self):
        """Тест: вакансия в столбце без одиночной ячейки"""
        nodes = (CellBox(0, Rect(0, 0, 10, 10)), CellBox(1, Rect(0, 12, 22, 22)))
        graph = RelationGraph(nodes)
        assign = IndexAssignment(rows={0: frozenset({0}), 1: frozenset({1})},
                                 cols={0: frozenset({0}), 1: frozenset({0, 1})})
        with self.assertRaises(UnderdeterminedExtentError) as ctx:
            find_empty_cells(assign, graph)
        self.assertEqual((ctx.exception.axis, ctx.exception.index), ("column", 1))

    def test_band_oracle_small_tables(self):
        """Тест: совпадение с перебором полос на таблицах до 4x4"""
        generator = SyntheticTableGenerator(SynthConfig(rows=(1, 4), cols=(1, 4), span_prob=0.3, empty_prob=0.2))
        self._check_oracle(generator, range(400))

    def test_band_oracle_large_tables(self):
        """Тест: совпадение с перебором полос на 500 больших таблицах"""
        generator = SyntheticTableGenerator(SynthConfig(rows=(5, 8), cols=(5, 8), span_prob=0.25))
        self._check_oracle(generator, range(1000, 1500))

    def _check_oracle(self, generator, seeds):
        for seed in seeds:
            ann = generator.generate_table(seed)
            aligned = derive_aligned_boxes(ann)
            rects = {c.id: aligned[c.id] for c in ann.non_empty_cells}
            assign = assign_indices(match_cells([CellBox(i, r) for i, r in rects.items()]))
            self.assertEqual(assign.rows, band_oracle(rects, 'y'), f"seed {seed}")
            self.assertEqual(assign.cols, band_oracle(rects, 'x'), f"seed {seed}")
            expected_rows = {c.id: frozenset(range(c.row_start, c.row_end + 1)) for c in ann.non_empty_cells}
            self.assertEqual(band_oracle(rects, 'y'), expected_rows)


class TestMergeEmptyCells(unittest.TestCase):
    """Тесты слияния пустых ячеек"""

    def setUp(self):
        self.block = [
            EmptyCell(0, 0, 0, 0, Rect(0, 0, 10, 10)), EmptyCell(0, 0, 1, 1, Rect(14, 0, 24, 10)),
            EmptyCell(1, 1, 0, 0, Rect(0, 14, 10, 24)), EmptyCell(1, 1, 1, 1, Rect(14, 14, 24, 24)),
        ]

    def test_foreground_strip_merges(self):
        """Тест: полоса целиком передний план - слияние в ячейку 1x2"""
        result = merge_empty_cells(self.block[:2], ScalarMap(np.ones((24, 24))), 0.5)
        self.assertEqual(len(result.cells), 1)
        merged = result.cells[0]
        self.assertEqual((merged.row_start, merged.row_end, merged.col_start, merged.col_end), (0, 0, 0, 1))
        self.assertEqual(merged.rect, Rect(0, 0, 24, 10))
        self.assertEqual(result.merge_count, 1)
        self.assertEqual(result.absorbed_count, 1)

    def test_background_strip_keeps_cells(self):
        """Тест: полоса фон - ячейки остаются отдельными"""
        result = merge_empty_cells(self.block[:2], ScalarMap.zeros(24, 24), 0.5)
        self.assertEqual(len(result.cells), 2)
        self.assertEqual(result.links[0].ratio, 0.0)

    def test_only_top_pair(self):
        """Тест: блок 2x2, передний план только между верхними ячейками"""
        seg = np.zeros((24, 24))
        seg[0:10, 10:14] = 1.0
        result = merge_empty_cells(self.block, ScalarMap(seg), 0.5)
        spans = [(c.row_start, c.row_end, c.col_start, c.col_end) for c in result.cells]
        self.assertEqual(spans, [(0, 0, 0, 1), (1, 1, 0, 0), (1, 1, 1, 1)])

    def test_touching_rects_ratio_one(self):
        """Тест: полоса нулевой площади считается долей 1"""
        ratio = strip_ratio(Rect(0, 0, 10, 10), Rect(10, 0, 20, 10), Direction.HORIZONTAL, ScalarMap.zeros(20, 10))
        self.assertEqual(ratio, 1.0)

    def test_strategies(self):
        """Тест: максимум сливает весь блок, минимум не сливает ничего"""
        maximum = merge_empty_cells(self.block, None, 0.5, MergeStrategy.MAXIMUM)
        self.assertEqual([(c.row_start, c.row_end, c.col_start, c.col_end) for c in maximum.cells], [(0, 1, 0, 1)])
        minimum = merge_empty_cells(self.block, None, 0.5, MergeStrategy.MINIMUM)
        self.assertEqual(len(minimum.cells), 4)

    def test_l_shape_is_not_merged(self):
        """Тест: связи в форме буквы L не дают непрямоугольной ячейки"""
        seg = np.zeros((24, 24))
        seg[0:10, 10:14] = 1.0
        seg[10:14, 0:10] = 1.0
        result = merge_empty_cells(self.block, ScalarMap(seg), 0.5)
        self.assertEqual(len(result.cells), 3)
        self.assertEqual(result.merge_count, 2)
        self.assertEqual(result.absorbed_count, 1)


class TestRecover(unittest.TestCase):
    """Тесты полного восстановления сетки"""

    def test_single_box(self):
        """Тест: одна рамка - сетка 1x1 без рёбер"""
        grid = recover([CellBox(0, Rect(5, 5, 20, 15))], None)
        self.assertEqual((grid.n_rows, grid.n_cols, len(grid.cells)), (1, 1, 1))
        self.assertEqual((grid.h_edges, grid.v_edges), (frozenset(), frozenset()))

    def test_header_span_and_empty_cell(self):
        """Тест: заголовок на два столбца и одна пустая ячейка"""
        boxes = [CellBox(0, Rect(10, 10, 90, 20)), CellBox(1, Rect(10, 30, 40, 40)),
                 CellBox(2, Rect(60, 30, 90, 40)), CellBox(3, Rect(10, 50, 40, 60))]
        grid = recover(boxes, ScalarMap.zeros(100, 70))
        self.assertEqual(validate_grid(grid), [])
        by_id = {c.id: c for c in grid.cells}
        self.assertEqual((by_id[0].col_start, by_id[0].col_end), (0, 1))
        self.assertEqual(len(grid.empty_cells), 1)
        empty = grid.empty_cells[0]
        self.assertEqual(empty.id, 4)
        self.assertEqual((empty.row_start, empty.col_start), (2, 1))
        self.assertEqual(empty.aligned_rect, Rect(60, 50, 90, 60))
        self.assertEqual(grid.h_edges, {(1, 2), (3, 4)})
        self.assertEqual(grid.v_edges, {(0, 1), (0, 2), (1, 3), (2, 4)})

    def test_config_defaults(self):
        """Тест значений конфигурации по умолчанию"""
        self.assertEqual(RecoveryConfig().to_dict(),
                         {'merge_ratio': 0.5, 'merge_strategy': 'vote', 'clique_ordering': 'shared-band'})
        with self.assertRaises(ValueError):
            RecoveryConfig(merge_ratio=1.5)


if __name__ == '__main__':
    unittest.main()
