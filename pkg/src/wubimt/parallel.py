"""Order-preserving line processing over a process pool."""

from __future__ import annotations

from collections import deque
from concurrent.futures import ProcessPoolExecutor
from itertools import islice
from typing import Callable, Iterable, Iterator, NamedTuple

from .errors import WubiError

DEFAULT_CHUNK = 512


class Outcome(NamedTuple):
    value: object
    notes: list
    error: str | None


_job: Callable | None = None


def _install(job):
    global _job
    _job = job


def _call(job, item) -> Outcome:
    try:
        value = job(item)
    except (WubiError, ValueError) as exc:
        return Outcome(None, [], str(exc))
    if isinstance(value, tuple) and len(value) == 2 and isinstance(value[1], list):
        return Outcome(value[0], value[1], None)
    return Outcome(value, [], None)


def _run_chunk(chunk):
    return [_call(_job, item) for item in chunk]


def _chunks(items, size):
    it = iter(items)
    while chunk := list(islice(it, size)):
        yield chunk


def ordered_map(
    job: Callable,
    items: Iterable,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> Iterator[Outcome]:
    """Apply ``job`` to every item, yielding outcomes in input order.

    ``job`` must be picklable when ``workers > 1``; it is shipped once per
    worker. Data errors raised by ``job`` are captured in ``Outcome.error``
    rather than propagated. At most ``4 * workers`` chunks are in flight.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1:
        for item in items:
            yield _call(job, item)
        return

    with ProcessPoolExecutor(max_workers=workers, initializer=_install, initargs=(job,)) as pool:
        pending: deque = deque()
        for chunk in _chunks(items, chunk_size):
            pending.append(pool.submit(_run_chunk, chunk))
            if len(pending) >= 4 * workers:
                yield from pending.popleft().result()
        while pending:
            yield from pending.popleft().result()
