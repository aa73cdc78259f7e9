from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .domain_exceptions import DegeneratePyramidError, VanishedCellError
from .rect import Rect
from .scalar_map import ScalarMap
from .table_annotation import TableAnnotation

# Каждая сторона выровненной рамки масштабируется на 0.95 относительно центра
SHRINK_FACTOR = 0.95


@dataclass(frozen=True)
class LocalTarget:
    """Цели LPMA для одного предложения"""
    proposal: Rect
    text_rect: Rect
    mask: ScalarMap
    pyr_h: ScalarMap
    pyr_v: ScalarMap


@dataclass(frozen=True)
class GlobalTarget:
    """Цели GPMA для всего изображения"""
    seg: ScalarMap
    pyr_h: ScalarMap
    pyr_v: ScalarMap


def pyramid_profile(coords: np.ndarray, lo: float, mid: float, hi: float) -> np.ndarray:
    """Линейный подъём от lo к пику mid и спуск к hi, обрезанный в [0, 1]"""
    if not lo < mid < hi:
        raise DegeneratePyramidError(f"pyramid peak {mid} must lie strictly inside ({lo}, {hi})")
    coords = np.asarray(coords, dtype=np.float64)
    rising = (coords - lo) / (mid - lo)
    falling = (hi - coords) / (hi - mid)
    return np.clip(np.where(coords <= mid, rising, falling), 0.0, 1.0)


def pyramid_patch(bounds: Tuple[int, int, int, int], extent: Rect,
                  peak_x: float, peak_y: float) -> Tuple[np.ndarray, np.ndarray]:
    """Горизонтальная и вертикальная пирамиды на прямоугольнике пикселей bounds

    Координата пикселя - его индекс в изображении; нули пирамиды на краях extent.
    """
    c0, r0, c1, r1 = bounds
    cols = pyramid_profile(np.arange(c0, c1), extent.x1, peak_x, extent.x2)
    rows = pyramid_profile(np.arange(r0, r1), extent.y1, peak_y, extent.y2)
    pyr_h = np.broadcast_to(cols[None, :], (r1 - r0, c1 - c0))
    pyr_v = np.broadcast_to(rows[:, None], (r1 - r0, c1 - c0))
    return pyr_h, pyr_v


def lpma_targets(proposal: Rect, text_rect: Rect) -> LocalTarget:
    """Бинарная маска текста и пирамиды внутри предложения"""
    if not proposal.contains(text_rect):
        raise ValueError(f"text rect {text_rect} must lie inside proposal {proposal}")
    c0, r0, c1, r1 = proposal.pixel_bounds()
    width, height = c1 - c0, r1 - r0
    if width < 1 or height < 1:
        raise ValueError(f"proposal {proposal} rasterizes to no pixels")

    # Локальные координаты: индекс пикселя относительно начала растра предложения
    x_mid = text_rect.x_mid - c0
    y_mid = text_rect.y_mid - r0
    if not (0 < x_mid < width and 0 < y_mid < height):
        raise DegeneratePyramidError(
            f"text midpoint ({x_mid}, {y_mid}) lies on the border of a {width}x{height} proposal")
    local_extent = Rect(float(c0), float(r0), float(c0 + width), float(r0 + height))
    pyr_h, pyr_v = pyramid_patch((c0, r0, c1, r1), local_extent, text_rect.x_mid, text_rect.y_mid)

    mask = np.zeros((height, width), dtype=np.float32)
    tc0, tr0, tc1, tr1 = text_rect.pixel_bounds()
    mask[max(tr0 - r0, 0):max(tr1 - r0, 0), max(tc0 - c0, 0):max(tc1 - c0, 0)] = 1.0
    return LocalTarget(proposal, text_rect, ScalarMap(mask), ScalarMap(pyr_h), ScalarMap(pyr_v))


def shrunk_pixel_bounds(aligned: Rect, width: int, height: int) -> Tuple[int, int, int, int]:
    """Растр сжатой рамки, обрезанный по изображению"""
    c0, r0, c1, r1 = aligned.scaled(SHRINK_FACTOR).pixel_bounds()
    return max(c0, 0), max(r0, 0), min(c1, width), min(r1, height)


def gpma_targets(ann: TableAnnotation, aligned: Dict[int, Rect]) -> GlobalTarget:
    """Глобальная сегментация всех ячеек и пирамиды непустых ячеек"""
    width, height = ann.image_width, ann.image_height
    seg = np.zeros((height, width), dtype=np.float32)
    pyr_h = np.zeros((height, width), dtype=np.float32)
    pyr_v = np.zeros((height, width), dtype=np.float32)

    for cell in ann.cells:
        box = aligned[cell.id]
        c0, r0, c1, r1 = shrunk_pixel_bounds(box, width, height)
        if c1 <= c0 or r1 <= r0:
            raise VanishedCellError(f"cell {cell.id} with aligned box {box} vanishes after shrinking")
        seg[r0:r1, c0:c1] = 1.0
        if cell.is_empty:
            continue
        # Пик - середина текста, нули - на границах несжатой выровненной рамки
        patch_h, patch_v = pyramid_patch((c0, r0, c1, r1), box,
                                         cell.text_rect.x_mid, cell.text_rect.y_mid)
        pyr_h[r0:r1, c0:c1] = patch_h
        pyr_v[r0:r1, c0:c1] = patch_v

    return GlobalTarget(ScalarMap(seg), ScalarMap(pyr_h), ScalarMap(pyr_v))
