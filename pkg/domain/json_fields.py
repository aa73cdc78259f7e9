from typing import Any, List, Optional

from .domain_exceptions import InvalidRectError, SchemaError
from .rect import Rect


def require_keys(data: Any, keys: set, path: str, prefix: str) -> None:
    if not isinstance(data, dict):
        raise SchemaError(path, prefix or "<root>", "expected an object")
    unknown = set(data) - keys
    if unknown:
        name = sorted(unknown)[0]
        raise SchemaError(path, f"{prefix}.{name}" if prefix else name, "unknown field")
    missing = keys - set(data)
    if missing:
        name = sorted(missing)[0]
        raise SchemaError(path, f"{prefix}.{name}" if prefix else name, "missing field")


def int_field(value: Any, path: str, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, name, f"expected an integer, got {value!r}")
    return value


def pair_field(value: Any, path: str, name: str) -> List[Any]:
    if not isinstance(value, list) or len(value) != 2:
        raise SchemaError(path, name, "expected [start, end]")
    return value


def optional_rect_field(value: Any, path: str, name: str) -> Optional[Rect]:
    if value is None:
        return None
    return rect_field(value, path, name)


def rect_field(value: Any, path: str, name: str) -> Rect:
    """Разобрать [x1, y1, x2, y2] с привязкой ошибки к полю"""
    if (not isinstance(value, list) or len(value) != 4 or
            not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise SchemaError(path, name, "expected [x1, y1, x2, y2] numbers")
    try:
        return Rect.from_list(value)
    except InvalidRectError as e:
        raise SchemaError(path, name, str(e)) from e
