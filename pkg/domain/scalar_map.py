from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ScalarMap:
    """Одноканальная карта значений на пиксельной сетке (строки - y)"""
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float32)
        if values.ndim != 2:
            raise ValueError(f"ScalarMap needs a 2-D array, got shape {values.shape}")
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, width: int, height: int) -> 'ScalarMap':
        return cls(np.zeros((height, width), dtype=np.float32))

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    def is_binary(self) -> bool:
        return bool(np.isin(self.values, (0.0, 1.0)).all())

    def in_unit_range(self) -> bool:
        return bool(((self.values >= 0.0) & (self.values <= 1.0)).all())

    def binarized(self, threshold: float) -> np.ndarray:
        """Булева маска пикселей со значением не ниже порога"""
        return self.values >= threshold

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScalarMap):
            return False
        return self.values.shape == other.values.shape and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.values.shape, self.values.tobytes()))
