import time

import pytest

from topictiler.workers import map_in_order, run_in_order


def slow_square(n):
    # later items finish first
    time.sleep(0.01 * (5 - n))
    return n * n


@pytest.mark.asyncio
async def test_results_keep_input_order():
    assert await run_in_order(slow_square, [0, 1, 2, 3, 4], workers=3) == [0, 1, 4, 9, 16]


def test_blocking_entry_point():
    assert map_in_order(slow_square, range(5), workers=2) == [0, 1, 4, 9, 16]
    assert map_in_order(slow_square, [], workers=2) == []


def test_worker_failure_is_unwrapped():
    def fail_on_three(n):
        if n == 3:
            raise FileNotFoundError("missing.txt")
        return n

    with pytest.raises(FileNotFoundError):
        map_in_order(fail_on_three, range(5), workers=1)


def test_worker_count_checked():
    with pytest.raises(ValueError):
        map_in_order(slow_square, [1], workers=0)
