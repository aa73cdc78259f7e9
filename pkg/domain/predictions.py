from dataclasses import dataclass

from .rect import Rect
from .scalar_map import ScalarMap


@dataclass(frozen=True)
class ProposalPrediction:
    """Одна обнаруженная выровненная рамка с локальными пирамидами"""
    id: int
    box: Rect
    text_rect: Rect
    pyr_h_local: ScalarMap
    pyr_v_local: ScalarMap
    text_clamped: bool = False

    def __post_init__(self):
        if not self.box.contains(self.text_rect):
            # Текст, вылезший за рамку предсказателя, прижимается к рамке
            inside = self.box.intersection(self.text_rect) or self.box
            object.__setattr__(self, 'text_rect', inside)
            object.__setattr__(self, 'text_clamped', True)
        c0, r0, c1, r1 = self.box.pixel_bounds()
        for name in ('pyr_h_local', 'pyr_v_local'):
            local = getattr(self, name)
            if (local.width, local.height) != (c1 - c0, r1 - r0):
                raise ValueError(f"proposal {self.id}: {name} is {local.width}x{local.height}, "
                                 f"box rasterizes to {c1 - c0}x{r1 - r0}")


@dataclass(frozen=True)
class GlobalPrediction:
    """Глобальные карты: вероятности сегментации и пирамиды"""
    seg: ScalarMap
    pyr_h_global: ScalarMap
    pyr_v_global: ScalarMap

    def __post_init__(self):
        shapes = {m.values.shape for m in (self.seg, self.pyr_h_global, self.pyr_v_global)}
        if len(shapes) != 1:
            raise ValueError(f"global maps must share image dimensions, got {sorted(shapes)}")

    @property
    def width(self) -> int:
        return self.seg.width

    @property
    def height(self) -> int:
        return self.seg.height
