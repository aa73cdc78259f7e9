import json
import os
import tempfile
from pathlib import Path
from typing import Any, Union

from domain.domain_exceptions import SchemaError

PathLike = Union[str, Path]


def write_bytes_atomic(path: PathLike, data: bytes) -> None:
    """Записать во временный файл рядом с целью и переименовать поверх неё"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(data: Any) -> bytes:
    return (json.dumps(data, indent=2, sort_keys=True) + "\n").encode('utf-8')


def write_json_atomic(path: PathLike, data: Any) -> None:
    write_bytes_atomic(path, dump_json(data))


def read_json(path: PathLike) -> Any:
    try:
        with open(path, 'rb') as f:
            return json.loads(f.read().decode('utf-8'))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise SchemaError(str(path), "<root>", f"not a JSON document: {e}") from e
