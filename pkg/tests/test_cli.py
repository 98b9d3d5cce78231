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
import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr
from fractions import Fraction
from unittest import mock

import numpy as np

from freeconv.cli import RunConfig, read_density, run
from freeconv.cli._session import Session

BERNOULLI = {'atoms': [{'pos': -1, 'mass': 0.5}, {'pos': 1, 'mass': 0.5}]}
SEMICIRCLE = {'ac': [{'weight': 1, 'family': 'semicircle', 'center': 0,
                      'variance': 1}]}


class TestCli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def measure(self, literal, name='measure.json'):
        path = self.path(name)
        with open(path, 'w') as f:
            json.dump(literal, f)
        return path

    def run_command(self, **kwargs):
        stderr = io.StringIO()
        with redirect_stderr(stderr):
            code = run(RunConfig(**kwargs))
        lines = stderr.getvalue().strip().splitlines()
        return code, lines

    def load(self, name):
        with open(self.path(name)) as f:
            return json.load(f)

    def test_power_csv(self):
        code, _ = self.run_command(command='power',
                                   measure=self.measure(BERNOULLI), p=2,
                                   out=self.path('out.csv'))
        self.assertEqual(code, 0)
        frame = read_density(self.path('out.csv'))
        self.assertEqual(list(frame.columns), ['x', 'density'])
        self.assertGreater(len(frame), 1500)
        self.assertTrue((frame['x'].diff().dropna() > 0).all())
        self.assertEqual(self.load('out.atoms.json'), [])

    def test_bpq_json(self):
        code, _ = self.run_command(command='bpq',
                                   measure=self.measure(BERNOULLI),
                                   p=Fraction(3, 2), q=Fraction(2, 3),
                                   format='json', out=self.path('out.json'))
        self.assertEqual(code, 0)
        document = self.load('out.json')
        self.assertEqual(document['params'],
                         {'operation': 'bpq', 'p': 1.5, 'q': 2 / 3})
        self.assertEqual(document['atoms'], [])
        self.assertEqual(len(document['density']['x']),
                         len(document['density']['density']))

    def test_deterministic(self):
        measure = self.measure(BERNOULLI)
        for name in ('a.csv', 'b.csv'):
            self.run_command(command='power', measure=measure, p=1.5,
                             out=self.path(name))
        with open(self.path('a.csv')) as a, open(self.path('b.csv')) as b:
            self.assertEqual(a.read(), b.read())
        atoms = self.load('a.atoms.json')
        self.assertEqual([atom['regime'] for atom in atoms],
                         ['free-power', 'free-power'])

    def test_verify(self):
        code, _ = self.run_command(command='verify',
                                   measure=self.measure(SEMICIRCLE), p=2,
                                   q=1, out=self.path('verify.json'))
        self.assertEqual(code, 0)
        document = self.load('verify.json')
        self.assertTrue(document['passed'])
        self.assertTrue(document['moments']['passed'])
        self.assertAlmostEqual(document['total_mass'], 1, delta=1e-4)

    def test_transform(self):
        code, _ = self.run_command(command='transform',
                                   measure=self.measure(BERNOULLI), z=[2j],
                                   out=self.path('t.json'))
        self.assertEqual(code, 0)
        point, = self.load('t.json')['points']
        self.assertAlmostEqual(point['G']['im'], -0.4, delta=1e-15)
        self.assertAlmostEqual(point['F']['im'], 2.5, delta=1e-15)

    def test_atoms_and_support(self):
        measure = self.measure(BERNOULLI)
        code, _ = self.run_command(command='atoms', measure=measure, p=1.5,
                                   out=self.path('atoms.json'))
        self.assertEqual(code, 0)
        positions = [a['pos'] for a in self.load('atoms.json')['atoms']]
        self.assertEqual(len(positions), 2)
        self.assertAlmostEqual(positions[1], 1.5, delta=1e-10)

        code, _ = self.run_command(command='support', measure=measure,
                                   p_list=[1.5, 2, 3],
                                   out=self.path('support.json'))
        self.assertEqual(code, 0)
        self.assertEqual(self.load('support.json')['counts'], [1, 1, 1])

    def test_validation_errors(self):
        unbalanced = {'atoms': [{'pos': 0, 'mass': 0.7}]}
        code, lines = self.run_command(command='power', p=2,
                                       measure=self.measure(unbalanced))
        self.assertEqual(code, 2)
        record = json.loads(lines[-1])
        self.assertEqual(record['error'], 'NonUnitMass')
        self.assertEqual(record['exit_code'], 2)

        missing = {'atoms': [{'pos': 0}]}
        code, lines = self.run_command(command='power', p=2,
                                       measure=self.measure(missing))
        self.assertEqual(code, 2)
        record = json.loads(lines[-1])
        self.assertEqual(record['error'], 'SchemaError')
        self.assertEqual(record['path'], 'atoms[0].mass')

        code, lines = self.run_command(command='power', p=0.5,
                                       measure=self.measure(BERNOULLI))
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(lines[-1])['error'], 'ParameterError')

        code, lines = self.run_command(command='poisson',
                                       measure=self.measure(BERNOULLI))
        self.assertEqual(code, 2)

    def test_numerical_error(self):
        code, lines = self.run_command(command='power', p=0.5,
                                       allow_sub_one=True,
                                       measure=self.measure(BERNOULLI))
        self.assertEqual(code, 3)
        record = json.loads(lines[-1])
        self.assertEqual(record['error'], 'NotDefined')
        self.assertEqual(record['exit_code'], 3)

    def test_library_error(self):
        for error in (ValueError('f(a) and f(b) must have different signs'),
                      np.linalg.LinAlgError('Singular matrix'),
                      ZeroDivisionError('float division by zero')):
            with mock.patch.object(Session, '_power', side_effect=error):
                code, lines = self.run_command(
                    command='power', p=2, measure=self.measure(BERNOULLI)
                )
            self.assertEqual(code, 3)
            record = json.loads(lines[-1])
            self.assertEqual(record['error'], 'NumericalError')
            self.assertEqual(record['exit_code'], 3)
            self.assertIn(type(error).__name__, record['message'])


if __name__ == '__main__':
    unittest.main()
