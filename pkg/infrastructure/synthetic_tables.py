import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from domain.domain_exceptions import GenerationError
from domain.rect import Rect
from domain.table_annotation import CellAnnotation, TableAnnotation
from application.interfaces import TableGenerator

logger = logging.getLogger(__name__)

IntRange = Tuple[int, int]
Footprint = Tuple[int, int, int, int]


@dataclass(frozen=True)
class SynthConfig:
    """Параметры синтетических таблиц и шума детектора

    Генератор случайных чисел - numpy PCG64, инициализируемый целым seed.
    """
    rng_seed: int = 0
    rows: IntRange = (2, 6)
    cols: IntRange = (2, 5)
    span_prob: float = 0.15
    max_span: int = 3
    empty_prob: float = 0.15
    cell_width: IntRange = (40, 90)
    cell_height: IntRange = (18, 32)
    text_inset_x: IntRange = (2, 8)
    text_inset_y: IntRange = (2, 4)
    margin: int = 10
    jitter: float = 0.0
    pyramid_noise: float = 0.0
    flip_rate: float = 0.0
    max_attempts: int = 200

    def __post_init__(self):
        for name in ('span_prob', 'empty_prob', 'jitter', 'flip_rate'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if not 0.0 <= self.pyramid_noise <= 1.0:
            raise ValueError(f"pyramid_noise must lie in [0, 1], got {self.pyramid_noise}")
        for name in ('rows', 'cols', 'cell_width', 'cell_height', 'text_inset_x', 'text_inset_y'):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} range is empty: {lo} > {hi}")
            object.__setattr__(self, name, (int(lo), int(hi)))
        if self.rows[0] < 1 or self.cols[0] < 1 or self.max_span < 1:
            raise ValueError("rows, cols and max_span must be at least 1")
        if self.text_inset_x[0] < 2 or self.text_inset_y[0] < 2:
            raise ValueError("text insets must be at least 2 px to keep gaps between lines")
        if self.cell_width[0] <= 2 * self.text_inset_x[1] + 8:
            raise ValueError("cell_width minimum leaves too little room for text")
        if self.cell_height[0] <= 2 * self.text_inset_y[1] + 4:
            raise ValueError("cell_height minimum leaves too little room for text")
        if self.margin < 0 or self.max_attempts < 1:
            raise ValueError("margin must be >= 0 and max_attempts >= 1")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for name in ('rows', 'cols', 'cell_width', 'cell_height', 'text_inset_x', 'text_inset_y'):
            data[name] = list(data[name])
        return data


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _nested_or_disjoint(a: Tuple[int, int], b: Tuple[int, int]) -> bool:
    if a[1] < b[0] or b[1] < a[0]:
        return True
    return (a[0] <= b[0] and b[1] <= a[1]) or (b[0] <= a[0] and a[1] <= b[1])


class SyntheticTableGenerator(TableGenerator):
    """Генератор восстановимых таблиц со спанами и пустыми ячейками"""

    def __init__(self, config: SynthConfig = SynthConfig()):
        self.config = config

    def generate_table(self, seed: int) -> TableAnnotation:
        rng = make_rng(seed)
        for attempt in range(self.config.max_attempts):
            n_rows = int(rng.integers(self.config.rows[0], self.config.rows[1] + 1))
            n_cols = int(rng.integers(self.config.cols[0], self.config.cols[1] + 1))
            footprints = self._place_cells(rng, n_rows, n_cols)
            empty = [bool(rng.random() < self.config.empty_prob) for _ in footprints]
            if self._recoverable(footprints, empty, n_rows, n_cols):
                return self._layout(rng, n_rows, n_cols, footprints, empty)
            logger.debug("seed %s attempt %d is not recoverable, retrying", seed, attempt)
        raise GenerationError(f"no recoverable table after {self.config.max_attempts} attempts (seed {seed})")

    def _place_cells(self, rng: np.random.Generator, n_rows: int, n_cols: int) -> List[Footprint]:
        """Разместить ячейки по сетке построчно; спаны не пересекаются частично"""
        occupied = np.zeros((n_rows, n_cols), dtype=bool)
        row_spans: List[Tuple[int, int]] = []
        col_spans: List[Tuple[int, int]] = []
        footprints = []
        for r in range(n_rows):
            for c in range(n_cols):
                if occupied[r, c]:
                    continue
                rs, cs = 1, 1
                if rng.random() < self.config.span_prob:
                    rs = min(int(rng.integers(1, self.config.max_span + 1)), n_rows - r)
                    cs = min(int(rng.integers(1, self.config.max_span + 1)), n_cols - c)
                    rows, cols = (r, r + rs - 1), (c, c + cs - 1)
                    fits = not occupied[r:r + rs, c:c + cs].any()
                    fits = fits and (rs == 1 or all(_nested_or_disjoint(rows, s) for s in row_spans))
                    fits = fits and (cs == 1 or all(_nested_or_disjoint(cols, s) for s in col_spans))
                    if not fits:
                        rs, cs = 1, 1
                occupied[r:r + rs, c:c + cs] = True
                if rs > 1:
                    row_spans.append((r, r + rs - 1))
                if cs > 1:
                    col_spans.append((c, c + cs - 1))
                footprints.append((r, r + rs - 1, c, c + cs - 1))
        return footprints

    @staticmethod
    def _recoverable(footprints: List[Footprint], empty: List[bool], n_rows: int, n_cols: int) -> bool:
        """Каждая строка и столбец содержит непустую ячейку без спана по этой оси"""
        rows = {f[0] for f, e in zip(footprints, empty) if not e and f[0] == f[1]}
        cols = {f[2] for f, e in zip(footprints, empty) if not e and f[2] == f[3]}
        return len(rows) == n_rows and len(cols) == n_cols

    def _layout(self, rng: np.random.Generator, n_rows: int, n_cols: int,
                footprints: List[Footprint], empty: List[bool]) -> TableAnnotation:
        cfg = self.config
        widths = rng.integers(cfg.cell_width[0], cfg.cell_width[1] + 1, size=n_cols)
        heights = rng.integers(cfg.cell_height[0], cfg.cell_height[1] + 1, size=n_rows)
        col_edges = cfg.margin + np.concatenate(([0], np.cumsum(widths)))
        row_edges = cfg.margin + np.concatenate(([0], np.cumsum(heights)))

        x_ranges = self._axis_ranges(rng, [(f[2], f[3]) for f in footprints], empty,
                                     col_edges, cfg.text_inset_x)
        y_ranges = self._axis_ranges(rng, [(f[0], f[1]) for f in footprints], empty,
                                     row_edges, cfg.text_inset_y)
        cells = []
        for i, (r0, r1, c0, c1) in enumerate(footprints):
            text = None
            if not empty[i]:
                (x1, x2), (y1, y2) = x_ranges[i], y_ranges[i]
                text = Rect(float(x1), float(y1), float(x2), float(y2))
            cells.append(CellAnnotation(i, text, r0, r1, c0, c1))
        return TableAnnotation(int(col_edges[-1] + cfg.margin), int(row_edges[-1] + cfg.margin), tuple(cells))

    @staticmethod
    def _axis_ranges(rng: np.random.Generator, spans: List[Tuple[int, int]], empty: List[bool],
                     edges: np.ndarray, inset: IntRange) -> List[Optional[Tuple[int, int]]]:
        """Текстовые интервалы по одной оси

        Ячейки без спана лежат в своей полосе с отступами; ячейки со спаном -
        внутри границ, уже заданных ячейками без спана.
        """
        ranges: List[Optional[Tuple[int, int]]] = [None] * len(spans)
        lo: Dict[int, int] = {}
        hi: Dict[int, int] = {}
        for i, (s, e) in enumerate(spans):
            if empty[i] or s != e:
                continue
            a = int(edges[s] + rng.integers(inset[0], inset[1] + 1))
            b = int(edges[s + 1] - rng.integers(inset[0], inset[1] + 1))
            ranges[i] = (a, b)
            lo[s] = min(lo.get(s, a), a)
            hi[s] = max(hi.get(s, b), b)
        for i, (s, e) in enumerate(spans):
            if empty[i] or s == e:
                continue
            left, right = lo[s], hi[e]
            slack = (right - left) // 5
            a = left + int(rng.integers(0, slack + 1))
            b = right - int(rng.integers(0, slack + 1))
            ranges[i] = (a, b)
        return ranges
