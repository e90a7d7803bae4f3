"""``key = value`` configuration files mapped onto dataclasses."""

from __future__ import annotations

import dataclasses
import typing
from pathlib import Path

from .errors import DataError


def read_kv(path) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _coerce(raw, tp):
    origin = typing.get_origin(tp)
    if origin is typing.Union or (origin is not None and type(None) in typing.get_args(tp)):
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if raw in ("", "none", "None"):
            return None
        return _coerce(raw, args[0])
    if tp is bool:
        low = str(raw).lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if origin in (tuple, list):
        (inner, *_) = typing.get_args(tp) or (str,)
        items = raw if isinstance(raw, (list, tuple)) else [s for s in str(raw).replace(",", " ").split()]
        return tuple(_coerce(s, inner) for s in items)
    if tp in (int, float, str):
        return tp(raw)
    return raw


def apply_overrides(obj, values: dict):
    """Return a copy of dataclass ``obj`` with string (or typed) ``values``
    applied; keys that are not fields of ``obj`` are ignored."""
    hints = typing.get_type_hints(type(obj))
    changes = {}
    for f in dataclasses.fields(obj):
        if f.name in values and values[f.name] is not None:
            try:
                changes[f.name] = _coerce(values[f.name], hints[f.name])
            except (TypeError, ValueError) as exc:
                raise DataError(f"bad value for {f.name}: {values[f.name]!r} ({exc})") from None
    return dataclasses.replace(obj, **changes)


def field_names(cls):
    return {f.name for f in dataclasses.fields(cls)}


def write_kv(obj) -> str:
    lines = []
    for f in dataclasses.fields(obj):
        v = getattr(obj, f.name)
        if isinstance(v, (tuple, list)):
            v = ",".join(str(x) for x in v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
