import logging
from typing import Dict, List, Tuple

import numpy as np

from domain.mask_targets import gpma_targets, pyramid_patch
from domain.predictions import GlobalPrediction, ProposalPrediction
from domain.rect import Rect
from domain.scalar_map import ScalarMap
from domain.table_annotation import TableAnnotation
from application.interfaces import Detector
from .synthetic_tables import SynthConfig, make_rng

logger = logging.getLogger(__name__)


class SimulatedDetector(Detector):
    """Fake детектор: идеальные карты, искажённые ограниченным шумом"""

    def __init__(self, config: SynthConfig = SynthConfig()):
        """
        Args:
            config: доли дрожания рамок, амплитуда шума пирамид и вероятность
                инверсии пикселей сегментации берутся отсюда
        """
        self.config = config

    def detect(self, ann: TableAnnotation, aligned: Dict[int, Rect],
               seed: int) -> Tuple[List[ProposalPrediction], GlobalPrediction]:
        return self.corrupt_predictions(ann, aligned, seed)

    def corrupt_predictions(self, ann: TableAnnotation, aligned: Dict[int, Rect],
                            seed: int) -> Tuple[List[ProposalPrediction], GlobalPrediction]:
        rng = make_rng(seed)
        proposals = [self._proposal(rng, ann, aligned[cell.id], cell.id, cell.text_rect)
                     for cell in ann.non_empty_cells]

        ideal = gpma_targets(ann, aligned)
        pyr_h = self._noisy(rng, ideal.pyr_h.values)
        pyr_v = self._noisy(rng, ideal.pyr_v.values)
        seg = ideal.seg.values
        if self.config.flip_rate > 0:
            flips = rng.random(seg.shape) < self.config.flip_rate
            seg = np.where(flips, 1.0 - seg, seg)
            logger.debug("seed %s: flipped %d segmentation pixels", seed, int(flips.sum()))
        return proposals, GlobalPrediction(ScalarMap(seg), ScalarMap(pyr_h), ScalarMap(pyr_v))

    def _proposal(self, rng: np.random.Generator, ann: TableAnnotation, true_box: Rect,
                  cell_id: int, text: Rect) -> ProposalPrediction:
        box = self._jittered(rng, ann, true_box, text)
        # Идеальная локальная пирамида - это пирамида истинной рамки на растре предложения
        patch_h, patch_v = pyramid_patch(box.pixel_bounds(), true_box, text.x_mid, text.y_mid)
        return ProposalPrediction(cell_id, box, text,
                                  ScalarMap(self._noisy(rng, patch_h)),
                                  ScalarMap(self._noisy(rng, patch_v)))

    def _jittered(self, rng: np.random.Generator, ann: TableAnnotation,
                  true_box: Rect, text: Rect) -> Rect:
        """Сдвинуть каждую сторону на долю протяжённости; текст остаётся внутри"""
        shifts = rng.uniform(-1.0, 1.0, size=4) * self.config.jitter
        shifts *= np.array([true_box.width, true_box.height, true_box.width, true_box.height])
        x1 = min(max(true_box.x1 + shifts[0], 0.0), text.x1)
        y1 = min(max(true_box.y1 + shifts[1], 0.0), text.y1)
        x2 = max(min(true_box.x2 + shifts[2], float(ann.image_width)), text.x2)
        y2 = max(min(true_box.y2 + shifts[3], float(ann.image_height)), text.y2)
        return Rect(float(x1), float(y1), float(x2), float(y2))

    def _noisy(self, rng: np.random.Generator, values: np.ndarray) -> np.ndarray:
        amplitude = self.config.pyramid_noise
        values = np.asarray(values, dtype=np.float64)
        if amplitude == 0:
            return values.astype(np.float32)
        noise = rng.uniform(-amplitude, amplitude, size=values.shape)
        return np.clip(values + noise, 0.0, 1.0).astype(np.float32)
