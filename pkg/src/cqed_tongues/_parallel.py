"""Order-preserving map over independent tasks."""

from concurrent.futures import ProcessPoolExecutor


def ordered_map(fn, items, workers=1, chunksize=None):
    """``[fn(x) for x in items]``, optionally spread over worker processes.

    Results are always returned in input order, so output never depends on
    the worker count or on completion order.  ``fn`` must be picklable when
    ``workers > 1``.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    if chunksize is None:
        chunksize = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
