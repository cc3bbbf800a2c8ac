"""Run independent cells on a thread pool and collect results in submission order."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

C = TypeVar("C")
R = TypeVar("R")


def run_cells(
    fn: Callable[[C], R],
    cells: Sequence[C],
    desc: str,
    max_workers: int = 4,
    show_progress: bool = True,
) -> list[R]:
    """Apply ``fn`` to every cell concurrently.

    Results come back in the order of ``cells`` regardless of completion
    order. The first failure is re-raised once the pool has drained.
    """
    results: dict[int, R] = {}
    first_error: BaseException | None = None

    pbar = tqdm(total=len(cells), desc=desc, leave=False, disable=not show_progress)
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(fn, cell): index for index, cell in enumerate(cells)}

        for future in as_completed(futures):
            index = futures[future]
            try:
                results[index] = future.result()
            except Exception as e:
                logger.error("cell %r failed: %s", cells[index], e)
                if first_error is None:
                    first_error = e
            pbar.update(1)
            pbar.set_postfix(last=str(cells[index])[-20:])

    pbar.close()
    if first_error is not None:
        raise first_error
    return [results[i] for i in range(len(cells))]
