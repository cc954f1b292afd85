from typing import Any, Sequence

from ansfd.errors import InvalidParameterError


def as_float(name: str, value: Any) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as e:
        raise InvalidParameterError(f"{name}: expected a number, got {value!r}") from e


def as_int(name: str, value: Any) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as e:
        raise InvalidParameterError(f"{name}: expected an integer, got {value!r}") from e


def _items(value: Any) -> Sequence[Any]:
    if isinstance(value, (list, tuple)):
        return value
    return [v for v in str(value).split(",") if v.strip()]


def float_list(name: str, value: Any) -> list[float]:
    """Comma-separated text (or a JSON list) of numbers."""
    return [as_float(name, v) for v in _items(value)]


def int_list(name: str, value: Any) -> list[int]:
    return [as_int(name, v) for v in _items(value)]


def bracket(value: Any) -> tuple[float, float]:
    """``lo:hi`` text or a two-element list."""
    parts = list(value) if isinstance(value, (list, tuple)) else str(value).split(":")
    if len(parts) != 2:
        raise InvalidParameterError(f"bracket: expected lo:hi, got {value!r}")
    return as_float("bracket", parts[0]), as_float("bracket", parts[1])


def grid(value: Any) -> dict[str, list[float]]:
    """
    Parse a sweep grid such as ``h=0.1,0.05:eta=1,2,3``.

    Returns
    -------
    dict[str, list[float]]
        Values per axis; only ``h`` and ``eta`` are recognised.
    """
    axes: dict[str, list[float]] = {}
    for segment in filter(None, str(value).split(":")):
        key, sep, values = segment.partition("=")
        key = key.strip()
        if not sep or key not in ("h", "eta"):
            raise InvalidParameterError(f"grid: unexpected axis {segment!r} (use h=...:eta=...)")
        axes[key] = float_list(f"grid {key}", values)
    if not axes.get("h"):
        raise InvalidParameterError("grid: at least one h value is required")
    return axes
