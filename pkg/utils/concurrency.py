"""
Bounded fan-out of independent work items (sweep rows, stability trials).
"""
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Callable, List, Sequence, TypeVar

Item = TypeVar('Item')
Result = TypeVar('Result')

def map_in_pool(fn: Callable[[Item], Result], items: Sequence[Item], threads: int = 1) -> List[Result]:
    """
    Apply fn to every item, in worker processes when threads > 1.

    Results come back in input order whatever the completion order; fn must be
    a module-level callable so that it pickles.
    """
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    results: List[Result] = [None] * len(items)
    with ProcessPoolExecutor(max_workers=min(threads, len(items))) as executor:
        futures = {executor.submit(fn, item): index for index, item in enumerate(items)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results
