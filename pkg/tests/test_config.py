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
import unittest
from unittest import mock

from freeconv._config import THREADS_ENV, parallel_map, thread_count


class TestConfig(unittest.TestCase):
    def test_thread_count(self):
        with mock.patch.dict(os.environ, {THREADS_ENV: '3'}):
            self.assertEqual(thread_count(), 3)
        with mock.patch.dict(os.environ, {THREADS_ENV: 'many'}):
            with self.assertLogs('freeconv', 'WARNING'):
                self.assertEqual(thread_count(), os.cpu_count() or 1)

    def test_parallel_map(self):
        with mock.patch.dict(os.environ, {THREADS_ENV: '4'}):
            self.assertEqual(parallel_map(lambda v: v * v, range(10)),
                             [v * v for v in range(10)])
        with mock.patch.dict(os.environ, {THREADS_ENV: '1'}):
            self.assertEqual(parallel_map(str, [1, 2]), ['1', '2'])
        self.assertEqual(parallel_map(str, []), [])


if __name__ == '__main__':
    unittest.main()
