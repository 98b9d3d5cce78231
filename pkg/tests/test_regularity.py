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
    Arcsine, BpqParams, Cauchy, MarchenkoPastur, Measure,
    MonotonicityViolation, ParameterError, PoissonSeed, RegimeError,
    Semicircle, bpq, component_count, divisibility_bracket, f_mu_limit,
    find_atoms, free_power, infdiv_diagnostics, monotonicity_report
)

BERNOULLI = Measure(atoms=[(-1, 0.5), (1, 0.5)])
FOUR_ATOMS = Measure(atoms=[(-3, 0.25), (-1, 0.25), (1, 0.25), (3, 0.25)])
SEMICIRCLE = Measure(components=[(1, Semicircle(0, 1))])
ARCSINE = Measure(components=[(1, Arcsine(-2, 2))])


class TestAtoms(unittest.TestCase):
    def test_f_mu_limit(self):
        self.assertAlmostEqual(f_mu_limit(BERNOULLI, 1.0), 1, delta=1e-10)
        self.assertAlmostEqual(f_mu_limit(BERNOULLI, 3.0), 1 / 9, delta=1e-10)
        self.assertEqual(f_mu_limit(BERNOULLI, 0.0), np.inf)
        self.assertAlmostEqual(f_mu_limit(Measure.point(0.5), 0.5), 0,
                               delta=1e-10)
        # Atoms of mass m give 1/m - 1
        np.testing.assert_allclose(f_mu_limit(FOUR_ATOMS, [-3.0, 1.0]),
                                   [3, 3], atol=1e-9)

    def test_free_power(self):
        atoms = find_atoms(BERNOULLI, 1.5)
        self.assertEqual(len(atoms), 2)
        for atom, position in zip(atoms, (-1.5, 1.5)):
            self.assertAlmostEqual(atom.position, position, delta=1e-10)
            self.assertAlmostEqual(atom.mass, 0.25, delta=1e-8)
            self.assertEqual(atom.certificate.regime, 'free-power')
            self.assertAlmostEqual(atom.certificate.f_mu, 1, delta=1e-8)
            self.assertAlmostEqual(atom.certificate.jc_derivative, 4,
                                   delta=1e-6)
        # f_mu = 1 sits on the threshold 1/(p - 1) at p = 2
        self.assertEqual(find_atoms(BERNOULLI, 2), [])

    def test_boolean_power(self):
        for q in (0.5, 2, 3):
            atoms = find_atoms(BERNOULLI, 1, q)
            self.assertEqual([a.certificate.regime for a in atoms],
                             ['boolean', 'boolean'])
            np.testing.assert_allclose([a.position for a in atoms],
                                       [-np.sqrt(q), np.sqrt(q)], atol=1e-10)
            np.testing.assert_allclose([a.mass for a in atoms], [0.5, 0.5],
                                       atol=1e-8)

    def test_composition(self):
        # slope -1 meets f_mu = 2 = 1/(p - 1) exactly: no atoms
        self.assertEqual(find_atoms(BERNOULLI, Fraction(3, 2),
                                    Fraction(2, 3)), [])
        # special regime: F(0) is infinite for the Bernoulli law
        self.assertEqual(find_atoms(BERNOULLI, 2, Fraction(1, 2)), [])

    def test_special_regime_atom(self):
        seed = PoissonSeed(Measure.point(1))
        atoms = find_atoms(seed, Fraction(3, 2), Fraction(1, 3))
        self.assertEqual(len(atoms), 1)
        self.assertEqual(atoms[0].position, 0)
        self.assertAlmostEqual(atoms[0].mass, 0.5, delta=1e-8)
        self.assertEqual(atoms[0].certificate.regime, 'bpq-special')
        self.assertEqual(find_atoms(seed, 2, Fraction(1, 2)), [])

    def test_arcsine_has_no_atoms(self):
        # F vanishes only at the ends of the support
        for p in (1.5, 3):
            self.assertEqual(find_atoms(ARCSINE, p), [])
        self.assertEqual(find_atoms(SEMICIRCLE, 2), [])

    def test_sub_one_atoms(self):
        atoms = find_atoms(ARCSINE, 0.5)
        np.testing.assert_allclose([a.position for a in atoms], [-1, 1],
                                   atol=1e-12)
        np.testing.assert_allclose([a.mass for a in atoms], [0.5, 0.5],
                                   atol=1e-12)
        with self.assertRaises(ParameterError):
            find_atoms(ARCSINE, 0.5, 2)

    def test_poisson_seed(self):
        seed = PoissonSeed(Measure.point(1))
        np.testing.assert_allclose(seed.atoms, [(0, 0.5), (2, 0.5)],
                                   atol=1e-8)
        seed = PoissonSeed(Measure.point(-1))
        np.testing.assert_allclose(seed.atoms, [(-2, 0.5), (0, 0.5)],
                                   atol=1e-8)
        np.testing.assert_allclose(seed.moments(3), [1, -1, 2, -4])

    def test_as_dict(self):
        record = find_atoms(BERNOULLI, 1.5)[1].as_dict()
        self.assertEqual(
            sorted(record),
            ['boundary_F', 'f_mu', 'jc_derivative', 'mass', 'pos', 'regime']
        )


class TestComponents(unittest.TestCase):
    def test_component_count(self):
        count, intervals = component_count(BERNOULLI, 2)
        self.assertEqual(count, 1)
        self.assertEqual(len(intervals), 1)
        self.assertEqual(component_count(FOUR_ATOMS, 1.05)[0], 3)
        self.assertEqual(component_count(FOUR_ATOMS, 4)[0], 1)
        with self.assertRaises(ParameterError):
            component_count(BERNOULLI, 1)

    def test_monotonicity_report(self):
        report = monotonicity_report(FOUR_ATOMS, [1.05, 1.5, 2, 4])
        self.assertTrue(report.is_monotone())
        self.assertEqual(report.counts[0], 3)
        self.assertEqual(report.counts[-1], 1)
        document = report.as_dict()
        self.assertEqual(document['counts'], list(report.counts))
        self.assertEqual(len(document['intervals']), 4)
        with self.assertRaises(ParameterError):
            monotonicity_report(FOUR_ATOMS, [2, 1.5])

    def test_violation_carries_report(self):
        err = MonotonicityViolation('counts increase', report='r',
                                    curves={})
        self.assertEqual(err.report, 'r')
        self.assertEqual(err.curves, {})

    def test_counts_independent_of_q(self):
        expected = {1.05: 3, 1.2: 3, 1.5: 1, 2: 1, 4: 1}
        for p, count in expected.items():
            self.assertEqual(component_count(FOUR_ATOMS, p)[0], count, p)
            for q in (0.4, 1, 2.5):
                result = bpq(FOUR_ATOMS, BpqParams(p, q), grid_n=401)
                self.assertEqual(result.diagnostics['components'], count,
                                 (p, q))

    def test_boolean_power_keeps_components(self):
        counts = {bpq(BERNOULLI, BpqParams(2, q), grid_n=401)
                  .diagnostics['components'] for q in (0.5, 1, 3)}
        self.assertEqual(counts, {1})


class TestDivisibility(unittest.TestCase):
    def test_closed_forms(self):
        self.assertEqual(divisibility_bracket(Measure.point(2)),
                         (np.inf, np.inf))
        self.assertEqual(divisibility_bracket(SEMICIRCLE), (1, 1))
        self.assertEqual(divisibility_bracket(
            Measure(components=[(1, MarchenkoPastur(2, 1))])), (1, 1))
        self.assertEqual(divisibility_bracket(
            Measure(components=[(1, Cauchy(0, 1))])), (np.inf, np.inf))
        self.assertEqual(divisibility_bracket(ARCSINE), (0.5, 0.5))
        self.assertEqual(divisibility_bracket(BERNOULLI), (0, 0))
        mixed = Measure(atoms=[(0, 0.5)],
                        components=[(0.5, Semicircle(0, 1))])
        self.assertEqual(divisibility_bracket(mixed), (0, np.inf))

    def test_propagation(self):
        # The free square of the Bernoulli law is the arcsine law
        result = free_power(BERNOULLI, 2, grid_n=401)
        self.assertEqual(result.divisibility, (0.5, 0.5))
        self.assertEqual(divisibility_bracket(result.to_measure()),
                         (0.5, 0.5))


class TestInfDiv(unittest.TestCase):
    def test_bernoulli(self):
        report = infdiv_diagnostics(BERNOULLI, BpqParams(2, Fraction(1, 2)),
                                    sample_n=200)
        self.assertEqual(report.sample_n, 200)
        self.assertLessEqual(report.max_imag_phi, 1e-10)
        for ratio in (report.phi_lipschitz, report.reciprocal_lower,
                      report.boolean_lipschitz):
            self.assertLessEqual(ratio, 1 + 1e-8)
        self.assertTrue(report.as_dict()['passed'])

    def test_semicircle(self):
        report = infdiv_diagnostics(SEMICIRCLE, BpqParams(3, 0.1),
                                    sample_n=200, seed=7)
        self.assertLessEqual(report.boolean_lipschitz, 1 + 1e-8)

    def test_sampled_pairs(self):
        for params in (BpqParams(3, Fraction(1, 5)),
                       BpqParams(Fraction(3, 2), Fraction(1, 3))):
            for mu in (BERNOULLI, SEMICIRCLE):
                report = infdiv_diagnostics(mu, params, sample_n=1000)
                self.assertEqual(report.sample_n, 1000)
                self.assertLessEqual(report.max_imag_phi, 1e-10)
                self.assertTrue(report.as_dict()['passed'], (mu, params))

    def test_regime(self):
        # 1/p* = 1/2 for p = 2
        with self.assertRaises(RegimeError):
            infdiv_diagnostics(BERNOULLI, BpqParams(2, 0.75))


if __name__ == '__main__':
    unittest.main()
