"""
Bounded worker pool for corpus-level commands.

Documents are processed in worker threads, at most ``workers`` at a time;
results come back in input order whatever the completion order.
"""

import logging
from functools import partial
from typing import Any, Callable, List, Sequence

import anyio
import anyio.to_thread

logger = logging.getLogger("topictiler.workers")


async def run_in_order(func: Callable[[Any], Any], items: Sequence[Any], workers: int = 4) -> List[Any]:
    if workers < 1:
        raise ValueError("workers must be >= 1")
    limiter = anyio.CapacityLimiter(workers)
    results: List[Any] = [None] * len(items)

    async def run_one(index: int, item: Any) -> None:
        results[index] = await anyio.to_thread.run_sync(partial(func, item), limiter=limiter)
        logger.debug("Finished item %d of %d", index + 1, len(items))

    async with anyio.create_task_group() as tg:
        for index, item in enumerate(items):
            tg.start_soon(run_one, index, item)
    return results


def map_in_order(func: Callable[[Any], Any], items: Sequence[Any], workers: int = 4) -> List[Any]:
    """Blocking entry point; the first worker failure is re-raised unwrapped"""
    try:
        return anyio.run(run_in_order, func, list(items), workers)
    except Exception as exc:
        inner = getattr(exc, "exceptions", None)
        if inner:
            raise inner[0] from exc
        raise
