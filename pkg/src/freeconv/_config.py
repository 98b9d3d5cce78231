# Copyright 2024 The freeconv developers.
#
# This file is part of freeconv.
#
# freeconv is free software: you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by the
# Free Software Foundation, version 3.
#
# freeconv is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU
# General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
import os
from concurrent.futures import ThreadPoolExecutor

from ._logger import logger

THREADS_ENV = 'FREECONV_THREADS'


def thread_count():
    """
    The number of worker threads for parallel loops.

    Read from the ``FREECONV_THREADS`` environment variable,
    defaulting to the number of CPUs.
    """
    value = os.environ.get(THREADS_ENV)
    if value is not None:
        try:
            count = int(value)
            if count > 0:
                return count
        except ValueError:
            pass
        logger.warning(f"Ignore invalid {THREADS_ENV}={value!r}")
    return os.cpu_count() or 1


def parallel_map(func, items):
    """
    Map a function over items with at most :py:func:`thread_count`
    threads, preserving the order.
    """
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
