"""
Helper utility functions.

Shared helpers keep numerical payloads consistent across the analyses. These utilities handle array coercion for the pydantic models, normalization of command-line style values, and the order-preserving parallel map used by the sampling loops.
"""

import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import Annotated, Any, TypeVar

import numpy as np
from pydantic import PlainSerializer, PlainValidator

logger = logging.getLogger(__name__)

THREADS_ENV = "JACOBILAB_THREADS"

T = TypeVar("T")
U = TypeVar("U")


def _as_array(value: Any, ndim: int) -> np.ndarray:
    """Coerce to a read-only float64 array of the given rank.

    :param value: Array-like value
    :type value: Any
    :param ndim: Expected number of dimensions
    :type ndim: int
    :raises ValueError: If the rank does not match or an entry is not a real number
    :return: Read-only copy of the value
    :rtype: np.ndarray
    """
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"Expected an array of real numbers: {exc}") from exc
    if arr.ndim != ndim:
        raise ValueError(f"Expected a {ndim}-dimensional array, found shape {arr.shape}")
    arr.flags.writeable = False
    return arr


def _to_list(value: np.ndarray) -> list:
    return value.tolist()


Vector = Annotated[
    np.ndarray,
    PlainValidator(lambda v: _as_array(v, 1)),
    PlainSerializer(_to_list, return_type=list),
]
Matrix = Annotated[
    np.ndarray,
    PlainValidator(lambda v: _as_array(v, 2)),
    PlainSerializer(_to_list, return_type=list),
]
Tensor4 = Annotated[
    np.ndarray,
    PlainValidator(lambda v: _as_array(v, 4)),
    PlainSerializer(_to_list, return_type=list),
]


def _normalize_sign(value: None | int | str) -> int | None:
    """Normalize `"+"`/`"-"` style signs to `+1`/`-1`."""

    if value is None:
        return None
    if isinstance(value, bool):
        raise TypeError("Expected value type of int or sign string")
    if isinstance(value, int):
        if value in (1, -1):
            return value
        raise ValueError(f"Sign must be +1 or -1. Found {value}")
    if isinstance(value, str):
        normalized = value.strip()
        if normalized in {"+", "+1", "1", "plus"}:
            return 1
        if normalized in {"-", "-1", "minus"}:
            return -1
        raise ValueError("Value must be one of +, +1, 1, plus or -, -1, minus")
    raise TypeError("Expected value type of int or sign string")


def _normalize_float_list(value: None | str | Iterable[float]) -> list[float] | None:
    """Normalize a comma separated string, or an iterable of numbers, to a list of floats."""

    if value is None:
        return None
    if isinstance(value, str):
        items = [item.strip() for item in value.split(",") if item.strip()]
        try:
            return [float(item) for item in items]
        except ValueError as exc:
            msg = f"Value must be a comma separated list of numbers. Found {value if len(value) <= 26 else value[:23] + '...'}"
            raise ValueError(msg) from exc
    return [float(item) for item in value]


def _thread_count(threads: int | None = None) -> int:
    """Resolve the worker thread count.

    An explicit positive value wins. Otherwise the `JACOBILAB_THREADS` environment variable is read; anything absent or invalid means a single thread.

    :param threads: Explicit thread count
    :type threads: int | None
    :return: Number of worker threads, at least one
    :rtype: int
    """
    if threads is not None:
        return max(1, int(threads))

    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        count = int(raw)
    except ValueError:
        logger.warning("Ignoring invalid %s=%r", THREADS_ENV, raw)
        return 1
    return max(1, count)


def _parallel_map(
    fn: Callable[[T], U], items: Iterable[T], threads: int | None = None
) -> list[U]:
    """Apply `fn` to every item, preserving input order.

    :param fn: Function to apply
    :type fn: Callable[[T], U]
    :param items: Inputs
    :type items: Iterable[T]
    :param threads: Worker thread count, see `_thread_count`
    :type threads: int | None
    :return: Results in input order
    :rtype: list[U]
    """
    count = _thread_count(threads)
    if count == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(fn, items))


def _is_inrange(n: int | float, lower: int | float, upper: int | float):
    """A simple utility function that checks a given value is within the given closed interval.

    :param n: Value to check
    :type n: int | float
    :param lower: Lower bound of the interval
    :type lower: int | float
    :param upper: Upper bound of the interval
    :type upper: int | float
    :return: `True` if the value falls inside the closed interval `[lower, upper]`
    :rtype: bool
    """
    return n >= lower and n <= upper
