import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .domain_exceptions import InvalidRectError


@dataclass(frozen=True)
class Rect:
    """Value Object для прямоугольника в пикселях изображения

    Пиксель (px, py) лежит внутри, если x1 <= px + 0.5 < x2 и y1 <= py + 0.5 < y2.
    """
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        coords = (self.x1, self.y1, self.x2, self.y2)
        if not all(math.isfinite(c) for c in coords):
            raise InvalidRectError(f"Rect coordinates must be finite: {coords}")
        if min(coords) < 0:
            raise InvalidRectError(f"Rect coordinates must be non-negative: {coords}")
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise InvalidRectError(f"Rect must have positive extent: {coords}")

    @classmethod
    def from_list(cls, values: Sequence[float]) -> 'Rect':
        if len(values) != 4:
            raise InvalidRectError(f"Rect needs 4 coordinates, got {len(values)}")
        return cls(*(float(v) for v in values))

    @classmethod
    def bounding(cls, rects: Iterable['Rect']) -> 'Rect':
        """Наименьший прямоугольник, покрывающий все данные"""
        rects = list(rects)
        if not rects:
            raise InvalidRectError("Cannot bound an empty set of rects")
        return cls(min(r.x1 for r in rects), min(r.y1 for r in rects),
                   max(r.x2 for r in rects), max(r.y2 for r in rects))

    def to_list(self) -> List[float]:
        return [self.x1, self.y1, self.x2, self.y2]

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def x_mid(self) -> float:
        return (self.x1 + self.x2) / 2

    @property
    def y_mid(self) -> float:
        return (self.y1 + self.y2) / 2

    def contains(self, other: 'Rect') -> bool:
        return (self.x1 <= other.x1 and self.y1 <= other.y1 and
                other.x2 <= self.x2 and other.y2 <= self.y2)

    def intersection(self, other: 'Rect') -> Optional['Rect']:
        x1, y1 = max(self.x1, other.x1), max(self.y1, other.y1)
        x2, y2 = min(self.x2, other.x2), min(self.y2, other.y2)
        if x1 >= x2 or y1 >= y2:
            return None
        return Rect(x1, y1, x2, y2)

    def iou(self, other: 'Rect') -> float:
        inter = self.intersection(other)
        if inter is None:
            return 0.0
        return inter.area / (self.area + other.area - inter.area)

    def scaled(self, factor: float) -> 'Rect':
        """Масштабировать относительно центра"""
        half_w = self.width * factor / 2
        half_h = self.height * factor / 2
        return Rect(self.x_mid - half_w, self.y_mid - half_h,
                    self.x_mid + half_w, self.y_mid + half_h)

    def translated(self, dx: float, dy: float) -> 'Rect':
        return Rect(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)

    def clamped(self, width: float, height: float) -> 'Rect':
        """Обрезать по границам изображения"""
        return Rect(min(max(self.x1, 0.0), width), min(max(self.y1, 0.0), height),
                    min(max(self.x2, 0.0), width), min(max(self.y2, 0.0), height))

    def pixel_bounds(self) -> Tuple[int, int, int, int]:
        """Полуоткрытые диапазоны пикселей (col0, row0, col1, row1)"""
        return (math.ceil(self.x1 - 0.5), math.ceil(self.y1 - 0.5),
                math.ceil(self.x2 - 0.5), math.ceil(self.y2 - 0.5))

    @property
    def pixel_count(self) -> int:
        c0, r0, c1, r1 = self.pixel_bounds()
        return max(c1 - c0, 0) * max(r1 - r0, 0)

    def __str__(self) -> str:
        return f"({self.x1:g}, {self.y1:g}, {self.x2:g}, {self.y2:g})"
