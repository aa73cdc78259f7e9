import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .domain_exceptions import (
    DegenerateFitError,
    DegenerateMidpointError,
    InvalidRectError,
    NoGlobalMatchError
)
from .predictions import GlobalPrediction, ProposalPrediction
from .rect import Rect
from .scalar_map import ScalarMap
from .statuses import SideStatus

logger = logging.getLogger(__name__)

DEFAULT_SEG_THRESHOLD = 0.5
DEFAULT_ITERATIONS = 1
# Порог числа обусловленности нормальной матрицы
MAX_CONDITION = 1e12
MIN_SLOPE = 1e-9
# Доля ширины, на которую прижимается середина текста, оказавшаяся на краю рамки
MIDPOINT_MARGIN = 0.01

SIDES = ('x1', 'y1', 'x2', 'y2')


@dataclass(frozen=True)
class GlobalMatch:
    """Связная область P глобальной сегментации и её пересечение P_o с рамкой"""
    region: np.ndarray
    overlap: np.ndarray


@dataclass(frozen=True)
class PlaneFit:
    """Плоскость z = a*x + b*y + c"""
    a: float
    b: float
    c: float

    def z(self, x: float, y: float) -> float:
        return self.a * x + self.b * y + self.c


@dataclass(frozen=True)
class RescoredMask:
    """Пересчитанные пирамиды в окне рамки; support - пиксели P_o"""
    window: Tuple[int, int, int, int]
    pyr_h: ScalarMap
    pyr_v: ScalarMap
    support: np.ndarray
    x_mid: float
    y_mid: float
    image_width: int
    image_height: int
    local_only: bool = False


@dataclass(frozen=True)
class RefinedBox:
    """Результат уточнения одного предложения"""
    id: int
    input_box: Rect
    rect: Rect
    side_status: Dict[str, SideStatus] = field(default_factory=dict)
    midpoint_clamped: bool = False
    local_only: bool = False

    def to_dict(self) -> Dict[str, object]:
        return {
            'id': self.id,
            'input_box': self.input_box.to_list(),
            'refined': self.rect.to_list(),
            'side_status': {side: self.side_status[side].value for side in SIDES},
            'midpoint_clamped': self.midpoint_clamped,
            'local_only': self.local_only
        }


def match_global_region(box: Rect, seg: ScalarMap,
                        threshold: float = DEFAULT_SEG_THRESHOLD) -> GlobalMatch:
    """Найти 4-связную компоненту сегментации с наибольшим пересечением с рамкой"""
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    labels, count = ndimage.label(seg.binarized(threshold))
    window = box_window(box, seg.width, seg.height)
    c0, r0, c1, r1 = window
    if count == 0 or c1 <= c0 or r1 <= r0:
        raise NoGlobalMatchError(f"no segmentation component intersects {box}")

    # Метки нумеруются в порядке развёртки; при равенстве argmax берёт меньшую
    overlap_counts = np.bincount(labels[r0:r1, c0:c1].ravel(), minlength=count + 1)
    overlap_counts[0] = 0
    if overlap_counts.max() == 0:
        raise NoGlobalMatchError(f"no segmentation component intersects {box}")
    best = int(np.argmax(overlap_counts))

    region = labels == best
    overlap = np.zeros_like(region)
    overlap[r0:r1, c0:c1] = region[r0:r1, c0:c1]
    return GlobalMatch(region, overlap)


def box_window(box: Rect, width: int, height: int) -> Tuple[int, int, int, int]:
    """Растр рамки, обрезанный по изображению"""
    c0, r0, c1, r1 = box.pixel_bounds()
    return max(c0, 0), max(r0, 0), min(c1, width), min(r1, height)


def rescore(pred: ProposalPrediction, global_pred: GlobalPrediction, overlap: np.ndarray,
            x_mid: Optional[float] = None, y_mid: Optional[float] = None) -> RescoredMask:
    """Смешать локальные и глобальные пирамиды с весами по расстоянию до середины текста"""
    box = pred.box
    x_mid = pred.text_rect.x_mid if x_mid is None else x_mid
    y_mid = pred.text_rect.y_mid if y_mid is None else y_mid
    if not (box.x1 < x_mid < box.x2 and box.y1 < y_mid < box.y2):
        raise DegenerateMidpointError(
            f"proposal {pred.id}: text midpoint ({x_mid}, {y_mid}) is not inside {box}")

    window = box_window(box, global_pred.width, global_pred.height)
    c0, r0, c1, r1 = window
    support = overlap[r0:r1, c0:c1]
    if not support.any():
        raise NoGlobalMatchError(f"proposal {pred.id}: empty overlap region")

    bc0, br0, _, _ = box.pixel_bounds()
    local_h = pred.pyr_h_local.values[r0 - br0:r1 - br0, c0 - bc0:c1 - bc0]
    local_v = pred.pyr_v_local.values[r0 - br0:r1 - br0, c0 - bc0:c1 - bc0]
    global_h = global_pred.pyr_h_global.values[r0:r1, c0:c1]
    global_v = global_pred.pyr_v_global.values[r0:r1, c0:c1]

    weight_x = _local_weight(np.arange(c0, c1, dtype=np.float64), box.x1, x_mid, box.x2)
    weight_y = _local_weight(np.arange(r0, r1, dtype=np.float64), box.y1, y_mid, box.y2)
    pyr_h = _blend(local_h, global_h, weight_x[None, :])
    pyr_v = _blend(local_v, global_v, weight_y[:, None])
    return RescoredMask(window, ScalarMap(pyr_h), ScalarMap(pyr_v), support.copy(),
                        x_mid, y_mid, global_pred.width, global_pred.height)


def _local_weight(coords: np.ndarray, lo: float, mid: float, hi: float) -> np.ndarray:
    """Вес локального предсказания: 0 на краю рамки, 1 в середине текста"""
    left = (coords - lo) / (mid - lo)
    right = (coords - hi) / (mid - hi)
    return np.clip(np.where(coords <= mid, left, right), 0.0, 1.0)


def _blend(local: np.ndarray, glob: np.ndarray, weight: np.ndarray) -> np.ndarray:
    # G + w*(L - G): при L == G результат совпадает с G бит в бит
    local = local.astype(np.float64)
    glob = glob.astype(np.float64)
    return np.clip(glob + weight * (local - glob), 0.0, 1.0)


def local_only_mask(pred: ProposalPrediction, image_width: int, image_height: int,
                    x_mid: float, y_mid: float) -> RescoredMask:
    """Запасной вариант без глобального совпадения: только локальные пирамиды"""
    window = box_window(pred.box, image_width, image_height)
    c0, r0, c1, r1 = window
    bc0, br0, _, _ = pred.box.pixel_bounds()
    pyr_h = pred.pyr_h_local.values[r0 - br0:r1 - br0, c0 - bc0:c1 - bc0]
    pyr_v = pred.pyr_v_local.values[r0 - br0:r1 - br0, c0 - bc0:c1 - bc0]
    support = np.ones(pyr_h.shape, dtype=bool)
    return RescoredMask(window, ScalarMap(pyr_h), ScalarMap(pyr_v), support,
                        x_mid, y_mid, image_width, image_height, local_only=True)


def fit_plane(points: Sequence[Sequence[float]]) -> PlaneFit:
    """Плоскость наименьших квадратов через нормальные уравнения 3x3"""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 3:
        raise DegenerateFitError(f"need at least 3 points (x, y, z), got shape {pts.shape}")

    # Центрирование не меняет решение, но улучшает обусловленность
    x_mean, y_mean = pts[:, 0].mean(), pts[:, 1].mean()
    x = pts[:, 0] - x_mean
    y = pts[:, 1] - y_mean
    z = pts[:, 2]
    normal = np.array([
        [np.dot(x, x), np.dot(x, y), x.sum()],
        [np.dot(x, y), np.dot(y, y), y.sum()],
        [x.sum(), y.sum(), float(len(pts))]
    ])
    rhs = np.array([np.dot(x, z), np.dot(y, z), z.sum()])

    condition = np.linalg.cond(normal)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise DegenerateFitError(f"normal matrix is ill-conditioned (cond={condition:.3g})")
    try:
        a, b, c = np.linalg.solve(normal, rhs)
    except np.linalg.LinAlgError as e:
        raise DegenerateFitError(str(e)) from e
    return PlaneFit(float(a), float(b), float(c - a * x_mean - b * y_mean))


def side_boundary(primary: np.ndarray, secondary: np.ndarray, values: np.ndarray,
                  lines: np.ndarray) -> float:
    """Ноль плоскости, усреднённый по строкам (столбцам) lines

    Плоскость подгоняется по точкам полуобласти, а среднее берётся по всем
    строкам P_o; строки, где ноль не определён, пропускаются.
    """
    plane = fit_plane(np.column_stack((primary, secondary, values)))
    if abs(plane.a) <= MIN_SLOPE:
        raise DegenerateFitError(f"plane is flat along the refined axis (a={plane.a:.3g})")
    zeros = -(plane.b * np.unique(lines) + plane.c) / plane.a
    zeros = zeros[np.isfinite(zeros)]
    if zeros.size == 0:
        raise DegenerateFitError("no row of the overlap region has a finite boundary")
    return float(np.mean(zeros))


def _refine_sides(box: Rect, rescored: RescoredMask) -> Tuple[Dict[str, float], Dict[str, SideStatus]]:
    c0, r0, c1, r1 = rescored.window
    xs, ys = np.meshgrid(np.arange(c0, c1, dtype=np.float64), np.arange(r0, r1, dtype=np.float64))
    support = rescored.support
    f_h = rescored.pyr_h.values.astype(np.float64)
    f_v = rescored.pyr_v.values.astype(np.float64)

    rows, cols = ys[support], xs[support]
    halves = {
        'x1': (support & (xs >= box.x1) & (xs <= rescored.x_mid), xs, ys, f_h, rows),
        'x2': (support & (xs >= rescored.x_mid) & (xs <= box.x2), xs, ys, f_h, rows),
        'y1': (support & (ys >= box.y1) & (ys <= rescored.y_mid), ys, xs, f_v, cols),
        'y2': (support & (ys >= rescored.y_mid) & (ys <= box.y2), ys, xs, f_v, cols),
    }
    coords = {'x1': box.x1, 'y1': box.y1, 'x2': box.x2, 'y2': box.y2}
    status = {}
    for side, (sel, primary, secondary, values, lines) in halves.items():
        try:
            value = side_boundary(primary[sel], secondary[sel], values[sel], lines)
            if not np.isfinite(value):
                raise DegenerateFitError(f"non-finite boundary for side {side}")
            coords[side] = value
            status[side] = SideStatus.REFINED
        except DegenerateFitError as e:
            logger.debug("side %s kept its input coordinate: %s", side, e)
            status[side] = SideStatus.DEGENERATE_FIT
    return coords, status


def refine_box(pred: ProposalPrediction, rescored: RescoredMask,
               iterations: int = DEFAULT_ITERATIONS,
               global_pred: Optional[GlobalPrediction] = None,
               seg_threshold: float = DEFAULT_SEG_THRESHOLD,
               midpoint_clamped: bool = False) -> RefinedBox:
    """Уточнить границы рамки по нулям плоскостей, подогнанных к пирамидам

    Повторные итерации (нужен global_pred) заново находят P_o и пересчитывают
    пирамиды для уже уточнённой рамки.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    current = pred
    status = {side: SideStatus.KEPT for side in SIDES}
    local_only = rescored.local_only
    for step in range(iterations):
        coords, step_status = _refine_sides(current.box, rescored)
        coords['x1'] = min(max(coords['x1'], 0.0), rescored.image_width)
        coords['x2'] = min(max(coords['x2'], 0.0), rescored.image_width)
        coords['y1'] = min(max(coords['y1'], 0.0), rescored.image_height)
        coords['y2'] = min(max(coords['y2'], 0.0), rescored.image_height)
        try:
            refined = Rect(coords['x1'], coords['y1'], coords['x2'], coords['y2'])
        except InvalidRectError:
            logger.warning("proposal %s: refined sides are out of order, keeping %s", pred.id, current.box)
            break
        for side in SIDES:
            # Сторона считается уточнённой, если её уточнила хотя бы одна итерация
            if step == 0 or step_status[side] == SideStatus.REFINED:
                status[side] = step_status[side]
        current = _rewindow(current, refined, rescored.image_width, rescored.image_height, global_pred)
        if step + 1 == iterations or global_pred is None:
            break
        rescored, clamped, local_only = build_rescored(current, global_pred, seg_threshold)
        midpoint_clamped = midpoint_clamped or clamped
    return RefinedBox(pred.id, pred.box, current.box, status, midpoint_clamped, local_only)


def _rewindow(pred: ProposalPrediction, box: Rect, image_width: int, image_height: int,
              global_pred: Optional[GlobalPrediction]) -> ProposalPrediction:
    """Перенести локальные карты на новую рамку; новые пиксели берутся из глобальных карт"""
    if box == pred.box:
        return pred
    nc0, nr0, nc1, nr1 = box.pixel_bounds()
    oc0, or0, oc1, or1 = pred.box.pixel_bounds()
    maps = []
    for local, name in ((pred.pyr_h_local, 'pyr_h_global'), (pred.pyr_v_local, 'pyr_v_global')):
        out = np.zeros((nr1 - nr0, nc1 - nc0), dtype=np.float32)
        if global_pred is not None:
            gc0, gr0 = max(nc0, 0), max(nr0, 0)
            gc1, gr1 = min(nc1, image_width), min(nr1, image_height)
            if gc1 > gc0 and gr1 > gr0:
                out[gr0 - nr0:gr1 - nr0, gc0 - nc0:gc1 - nc0] = \
                    getattr(global_pred, name).values[gr0:gr1, gc0:gc1]
        ic0, ir0 = max(nc0, oc0), max(nr0, or0)
        ic1, ir1 = min(nc1, oc1), min(nr1, or1)
        if ic1 > ic0 and ir1 > ir0:
            out[ir0 - nr0:ir1 - nr0, ic0 - nc0:ic1 - nc0] = \
                local.values[ir0 - or0:ir1 - or0, ic0 - oc0:ic1 - oc0]
        maps.append(ScalarMap(out))
    text = pred.text_rect
    return ProposalPrediction(pred.id, box, text, maps[0], maps[1])


def clamped_midpoint(pred: ProposalPrediction) -> Tuple[float, float, bool]:
    """Середина текста, прижатая внутрь открытого интервала рамки"""
    box, text = pred.box, pred.text_rect
    margin_x = box.width * MIDPOINT_MARGIN
    margin_y = box.height * MIDPOINT_MARGIN
    x_mid = min(max(text.x_mid, box.x1 + margin_x), box.x2 - margin_x)
    y_mid = min(max(text.y_mid, box.y1 + margin_y), box.y2 - margin_y)
    clamped = x_mid != text.x_mid or y_mid != text.y_mid
    if clamped:
        logger.debug("proposal %s: text midpoint clamped into %s", pred.id, box)
    return x_mid, y_mid, clamped


def build_rescored(pred: ProposalPrediction, global_pred: GlobalPrediction,
                   seg_threshold: float = DEFAULT_SEG_THRESHOLD) -> Tuple[RescoredMask, bool, bool]:
    """Найти P_o и пересчитать пирамиды; без совпадения - только локальные карты"""
    x_mid, y_mid, clamped = clamped_midpoint(pred)
    try:
        match = match_global_region(pred.box, global_pred.seg, seg_threshold)
        return rescore(pred, global_pred, match.overlap, x_mid, y_mid), clamped, False
    except NoGlobalMatchError as e:
        logger.debug("proposal %s: %s, refining from local maps only", pred.id, e)
        return local_only_mask(pred, global_pred.width, global_pred.height, x_mid, y_mid), clamped, True


def refine_proposal(pred: ProposalPrediction, global_pred: GlobalPrediction,
                    seg_threshold: float = DEFAULT_SEG_THRESHOLD,
                    iterations: int = DEFAULT_ITERATIONS) -> RefinedBox:
    """Полный цикл уточнения одного предложения"""
    rescored, clamped, _ = build_rescored(pred, global_pred, seg_threshold)
    return refine_box(pred, rescored, iterations, global_pred, seg_threshold,
                      midpoint_clamped=clamped or pred.text_clamped)
