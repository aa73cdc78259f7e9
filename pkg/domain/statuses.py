from enum import Enum


class Direction(Enum):
    """Направление отношения соседства"""
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


class SideStatus(Enum):
    """Итог уточнения одной стороны рамки"""
    REFINED = "refined"
    DEGENERATE_FIT = "degenerate-fit"
    KEPT = "kept"


class MergeStrategy(Enum):
    """Стратегии слияния пустых ячеек"""
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    VOTE = "vote"


class CliqueOrdering(Enum):
    """Порядок клик при нумерации строк/столбцов"""
    SHARED_BAND = "shared-band"
    MEMBER_MEAN = "member-mean"
