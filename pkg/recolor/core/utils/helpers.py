import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction
from functools import wraps
from typing import Any, Callable, List, Optional, Tuple

import numpy as np

from recolor.core.utils.errors import BudgetExceededError

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


class RejectedSample(Exception):
    """Raised by a rejection sampler when the current attempt must be redrawn."""


class WorkBudget:
    """Hard cap on units of work (search nodes, chain steps) and wall-clock time."""

    def __init__(self, max_units: Optional[int], max_seconds: Optional[float] = None, label: str = "work"):
        self.max_units = max_units
        self.max_seconds = max_seconds or None
        self.label = label
        self.used = 0
        self.started = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.started

    def can_continue(self) -> bool:
        """Check if both the unit and the time allowance still hold."""
        if self.max_units is not None and self.used > self.max_units:
            return False
        if self.max_seconds is not None and self.elapsed > self.max_seconds:
            return False
        return True

    def record(self, units: int = 1):
        """Record work; the clock is only consulted every 2**14 units."""
        self.used += units
        if self.max_units is not None and self.used > self.max_units:
            raise BudgetExceededError(f"{self.label} budget of {self.max_units} units exceeded")
        if self.max_seconds is not None and (self.used & 0x3FFF) == 0 and self.elapsed > self.max_seconds:
            raise BudgetExceededError(f"{self.label} wall budget of {self.max_seconds}s exceeded")


def retry_on_rejection(max_attempts: int = 1000):
    """Decorator re-running a rejection sampler until it stops raising RejectedSample."""
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs):
            for attempt in range(max_attempts):
                try:
                    result = func(*args, **kwargs)
                    if attempt:
                        logger.debug(f"{func.__name__} accepted after {attempt + 1} attempts")
                    return result
                except RejectedSample:
                    continue
            logger.error(f"All {max_attempts} attempts were rejected for {func.__name__}")
            raise BudgetExceededError(
                f"{func.__name__} rejected {max_attempts} consecutive samples",
                partial={"attempts": max_attempts},
            )
        return wrapper
    return decorator


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by (stream, seed); stream i is the i-th trial's substream."""
    key = ((stream & MASK64) << 64) | (int(seed) & MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def draw_seed() -> int:
    """Fresh 64-bit seed from OS entropy."""
    return int(np.random.SeedSequence().entropy) & MASK64


def derive_seed(seed: int, *labels) -> int:
    """Deterministic 64-bit child seed for a labelled sub-experiment."""
    digest = hashlib.sha256(repr((int(seed),) + labels).encode()).digest()
    return int.from_bytes(digest[:8], "little")


def chunk_range(total: int, chunks: int) -> List[Tuple[int, int]]:
    """Split range(total) into at most `chunks` contiguous (start, stop) pieces."""
    if total <= 0:
        return []
    chunks = max(1, min(chunks, total))
    size, extra = divmod(total, chunks)

    pieces = []
    start = 0
    for i in range(chunks):
        stop = start + size + (1 if i < extra else 0)
        pieces.append((start, stop))
        start = stop

    return pieces


def parallel_map(func: Callable, tasks: List[Any], workers: int = 1) -> List[Any]:
    """Map a picklable top-level function over tasks, in order; serial for one worker."""
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [func(task) for task in tasks]


def fraction_str(value) -> Optional[str]:
    """Serialize exact rationals as 'p/q'; leave everything else to str()."""
    if value is None:
        return None
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)
    return value


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()
