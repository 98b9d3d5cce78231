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
import unittest
from fractions import Fraction

import numpy as np

from freeconv import (
    CumulantVector, Measure, MomentVector, ParameterError, Semicircle,
    boolean_cumulants_to_moments, compare, free_cumulants_to_moments,
    free_power, moments_to_boolean_cumulants, moments_to_free_cumulants,
    predict_moments_bpq
)

BERNOULLI = Measure(atoms=[(-1, 0.5), (1, 0.5)])
SEMICIRCLE = Measure(components=[(1, Semicircle(0, 1))])


class TestCumulants(unittest.TestCase):
    def test_free_cumulants(self):
        kappa = moments_to_free_cumulants([1, 0, 1, 0, 2, 0, 5])
        self.assertEqual(kappa.kind, 'free')
        self.assertEqual(kappa.values, (0, 1, 0, 0, 0, 0))
        kappa = moments_to_free_cumulants([1, 0, 1, 0, 1])
        self.assertEqual(kappa.values, (0, 1, 0, -1))
        self.assertEqual(kappa[4], -1)
        with self.assertRaises(IndexError):
            kappa[0]

    def test_boolean_cumulants(self):
        b = moments_to_boolean_cumulants([1, 0, 1, 0, 1])
        self.assertEqual(b.kind, 'boolean')
        self.assertEqual(b.values, (0, 1, 0, 0))
        # arcsine law on (-2, 2)
        b = moments_to_boolean_cumulants([1, 0, 2, 0, 6])
        self.assertEqual(b.values, (0, 2, 0, 2))

    def test_round_trips(self):
        m = [1, 0.3, 1.2, 0.9, 2.5, 3.1, 7.7]
        np.testing.assert_allclose(
            free_cumulants_to_moments(moments_to_free_cumulants(m)).m, m,
            rtol=1e-12
        )
        np.testing.assert_allclose(
            boolean_cumulants_to_moments(moments_to_boolean_cumulants(m)).m,
            m, rtol=1e-12
        )
        m = [Fraction(1), Fraction(1, 3), Fraction(2, 5), Fraction(1, 7)]
        self.assertEqual(
            free_cumulants_to_moments(moments_to_free_cumulants(m)).m,
            tuple(m)
        )

    def test_scaled(self):
        kappa = CumulantVector('free', [0, 1]).scaled(3)
        self.assertEqual(kappa.values, (0, 3))
        with self.assertRaises(ParameterError):
            CumulantVector('classical', [1])

    def test_order_limit(self):
        with self.assertRaises(ParameterError):
            moments_to_free_cumulants([1] + [0] * 13)


class TestPrediction(unittest.TestCase):
    def test_bernoulli_square(self):
        # arcsine law on (-2, 2)
        m = predict_moments_bpq(BERNOULLI, 2, 1, 6)
        self.assertIsInstance(m, MomentVector)
        np.testing.assert_allclose(m.m, [1, 0, 2, 0, 6, 0, 20], atol=1e-12)

    def test_semicircle_power(self):
        m = predict_moments_bpq(SEMICIRCLE, 3, 1, 4)
        np.testing.assert_allclose(m.m, [1, 0, 3, 0, 18], atol=1e-12)

    def test_exact_composition(self):
        m = predict_moments_bpq([1, 0, 1, 0, 1], Fraction(3, 2),
                                Fraction(2, 3), 4)
        self.assertEqual(m.m, (1, 0, 1, 0, Fraction(3, 2)))

    def test_boolean_power(self):
        m = predict_moments_bpq(BERNOULLI, 1, 2, 4)
        np.testing.assert_allclose(m.m, [1, 0, 2, 0, 4], atol=1e-12)

    def test_short_input(self):
        with self.assertRaises(ParameterError):
            predict_moments_bpq([1, 0, 1], 2, 1, 4)


class TestCompare(unittest.TestCase):
    def test_pass(self):
        result = free_power(SEMICIRCLE, 2)
        report = compare(result, predict_moments_bpq(SEMICIRCLE, 2))
        self.assertTrue(report.passed)
        self.assertLessEqual(report.max_deviation, 1e-4)
        document = report.as_dict()
        self.assertEqual(document['orders'], list(range(7)))
        self.assertTrue(document['passed'])

    def test_corrupted(self):
        result = free_power(BERNOULLI, 1)
        predicted = [1.01 * v for v in predict_moments_bpq(BERNOULLI, 1).m]
        report = compare(result, predicted)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.deviations[0], 0.01 / 1.01, delta=1e-12)


if __name__ == '__main__':
    unittest.main()
