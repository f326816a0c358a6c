"""
Seeded sample streams and the worker pool every sampled check runs on.

A sample set of ``total`` draws is cut into chunks of ``CHUNK_SIZE``. Chunk
``i`` of stream ``name`` always draws from the generator seeded with
``(seed, crc32(name), i)``, so results only depend on the seed and never on
how many threads ran them.
"""
import logging
import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings

logger = logging.getLogger(__name__)


def stream_key(name):
    return zlib.crc32(name.encode('utf-8'))


def stream_rng(seed, name, index=0):
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, stream_key(name), int(index)])


def chunk_sizes(total, chunk_size=None):
    chunk_size = chunk_size or settings.PM_TOPOLOGY['CHUNK_SIZE']
    full, rest = divmod(int(total), chunk_size)
    sizes = [chunk_size] * full
    if rest:
        sizes.append(rest)
    return sizes


def thread_count():
    return settings.PM_TOPOLOGY['THREADS']


def map_chunks(function, seed, name, total, chunk_size=None):
    """
    Run ``function(rng, count, index)`` over every chunk and return the
    results in chunk order.
    """
    sizes = chunk_sizes(total, chunk_size)
    tasks = [(stream_rng(seed, name, index), count, index) for index, count in enumerate(sizes)]
    workers = min(thread_count(), len(tasks)) or 1
    logger.debug(f"Stream {name}: {len(tasks)} chunks on {workers} workers")
    if workers == 1:
        return [function(*task) for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda task: function(*task), tasks))
