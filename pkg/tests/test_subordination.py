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

import numpy as np

from freeconv import (
    BrownianH, ContinuedPowerH, Measure, ParameterError, PowerH,
    ResidualTooLarge, Semicircle, WindowTooSmall, boundary_heights,
    boundary_intervals, eval_E, f_p, mass_ratio, omega_p, psi_p,
    solve_boundary, solve_subordination, v_plus
)
from freeconv._subordination import _monotone_psi

BERNOULLI = Measure(atoms=[(-1, 0.5), (1, 0.5)])


def point_mass(a):
    return Measure(atoms=[(a, 1)])


class TestBoundaryCurve(unittest.TestCase):
    def test_mass_ratio(self):
        self.assertAlmostEqual(mass_ratio(BERNOULLI, 0, 1), 1, delta=1e-14)
        self.assertAlmostEqual(mass_ratio(BERNOULLI, 1, 1), 0.5, delta=1e-14)
        self.assertAlmostEqual(mass_ratio(BERNOULLI, 0, 0.5), 4, delta=1e-13)
        self.assertAlmostEqual(mass_ratio(point_mass(0.3), 0.7, 0.2), 0,
                               delta=1e-14)
        with self.assertRaises(ParameterError):
            mass_ratio(BERNOULLI, 0, 0)

    def test_bernoulli_curve(self):
        x = np.array([-0.9, -0.6, 0.0, 0.3, 0.99])
        np.testing.assert_allclose(f_p(BERNOULLI, 2, x), np.sqrt(1 - x**2),
                                   atol=1e-10)
        np.testing.assert_allclose(f_p(BERNOULLI, 1.5, [0.0, 0.5]),
                                   np.sqrt(0.5 - np.array([0.0, 0.25])),
                                   atol=1e-10)
        np.testing.assert_array_equal(f_p(BERNOULLI, 2, [-3.0, 1.5, 2.0]), 0)

    def test_psi(self):
        x = np.array([-0.8, -0.1, 0.4, 0.95])
        np.testing.assert_allclose(psi_p(BERNOULLI, 2, x), 2 * x, atol=1e-9)
        self.assertAlmostEqual(psi_p(BERNOULLI, 2, 2.0), 2.5, delta=1e-9)
        for a, p in ((0.5, 3), (-2.0, 1.25)):
            x = np.linspace(-4, 4, 9)
            np.testing.assert_allclose(psi_p(point_mass(a), p, x),
                                       x + (p - 1) * a, atol=1e-12)

    def test_brownian_curve(self):
        hfunc = BrownianH(point_mass(0), 1)
        x = np.array([-0.5, 0.0, 0.7])
        np.testing.assert_allclose(boundary_heights(hfunc, x),
                                   np.sqrt(1 - x**2), atol=1e-10)

    def test_invalid_exponent(self):
        with self.assertRaises(ParameterError):
            PowerH(BERNOULLI, 1)
        with self.assertRaises(ParameterError):
            f_p(BERNOULLI, 0.5, 0.0)
        with self.assertRaises(ParameterError):
            BrownianH(BERNOULLI, 0)


class TestSubordination(unittest.TestCase):
    def test_bernoulli_omega(self):
        self.assertAlmostEqual(omega_p(BERNOULLI, 2, 0), 1j, delta=1e-10)
        z = np.array([1 + 1j, -0.5 + 0.2j, 3 + 0.01j])
        w = omega_p(BERNOULLI, 2, z)
        np.testing.assert_allclose(w + 1 / w, z, atol=1e-10)
        self.assertTrue(np.all(np.abs(w) >= 1 - 1e-10))

    def test_point_mass_omega(self):
        z = np.array([1 + 2j, -3 + 0.1j, 0.5j])
        for a, p in ((0.5, 3), (-1.0, 1.5)):
            np.testing.assert_allclose(omega_p(point_mass(a), p, z),
                                       z - (p - 1) * a, atol=1e-12)

    def test_residual_grid(self):
        x, y = np.meshgrid(np.linspace(-3, 3, 20), np.linspace(0.05, 3, 20))
        z = x + 1j * y
        for mu, p in ((BERNOULLI, 2), (BERNOULLI, 1.5),
                      (Measure(components=[(1, Semicircle(0, 1))]), 2.5)):
            hfunc = PowerH(mu, p)
            w, worst = solve_subordination(hfunc, z)
            self.assertEqual(w.shape, z.shape)
            self.assertLess(worst, 1e-10)
            # Im omega(z) >= Im z
            self.assertTrue(np.all(w.imag >= z.imag - 1e-10))

    def test_domain_check(self):
        with self.assertRaises(ParameterError):
            solve_subordination(PowerH(BERNOULLI, 2), 1 - 1j)


class TestVPlus(unittest.TestCase):
    def test_bernoulli(self):
        intervals = v_plus(BERNOULLI, 2)
        self.assertEqual(len(intervals), 1)
        self.assertAlmostEqual(intervals[0].left, -1, delta=1e-8)
        self.assertAlmostEqual(intervals[0].right, 1, delta=1e-8)
        self.assertTrue(intervals[0].left_refined)
        self.assertTrue(intervals[0].right_refined)
        self.assertFalse(intervals[0].below_resolution)

        intervals = v_plus(BERNOULLI, 1.5)
        self.assertEqual(len(intervals), 1)
        self.assertAlmostEqual(intervals[0].left, -np.sqrt(0.5), delta=1e-8)
        self.assertAlmostEqual(intervals[0].right, np.sqrt(0.5), delta=1e-8)

    def test_point_mass(self):
        self.assertEqual(v_plus(point_mass(2.0), 3), [])

    def test_window_too_small(self):
        with self.assertRaises(WindowTooSmall):
            boundary_intervals(PowerH(BERNOULLI, 2), (-0.5, 0.5))

    def test_solve_boundary(self):
        solution = solve_boundary(PowerH(BERNOULLI, 2))
        self.assertEqual(solution.p, 2)
        self.assertIs(solution.mu, BERNOULLI)
        self.assertTrue(np.all(np.diff(solution.psi_values) > 0))
        self.assertTrue(np.all(solution.fp_values >= 0))
        self.assertLessEqual(solution.grid.size, 2001)
        np.testing.assert_allclose(
            solution.fp_values,
            np.sqrt(np.maximum(1 - solution.grid**2, 0)), atol=1e-9
        )
        (lo, hi), = solution.psi_support()
        self.assertAlmostEqual(lo, -2, delta=1e-7)
        self.assertAlmostEqual(hi, 2, delta=1e-7)

    def test_psi_reversal(self):
        x = np.linspace(0, 1, 6)
        with self.assertRaises(ResidualTooLarge):
            _monotone_psi(x, np.array([0.0, 0.2, 0.4, 0.39, 0.8, 1.0]))

    def test_psi_ties(self):
        x = np.linspace(0, 1, 5)
        psi = np.array([0.0, 0.5, 0.5, 0.5 - 1e-12, 1.0])
        with self.assertLogs('freeconv', 'WARNING'):
            spread = _monotone_psi(x, psi)
        self.assertTrue(np.all(np.diff(spread) > 0))
        np.testing.assert_allclose(spread, psi, atol=1e-11)


class TestContinuedPower(unittest.TestCase):
    def test_semicircle_preimage(self):
        wide = Measure(components=[(1, Semicircle(0, 2))])
        hfunc = ContinuedPowerH(wide, 0.5)
        self.assertTrue(hfunc.lower_half)
        np.testing.assert_allclose(hfunc.h(np.array([-1j])), [0], atol=1e-14)
        # the power is the standard semicircle law: w = 2z - F(z)
        z = np.array([1e-3j, 0.5 + 1e-3j, -1 + 0.01j])
        hfunc.crossing = z.real
        w, worst = solve_subordination(hfunc, z, start=1.5 * z - 0.9j)
        self.assertLess(worst, 1e-10)
        standard = Measure(components=[(1, Semicircle(0, 1))])
        np.testing.assert_allclose(w, 2 * z - 1 / standard.cauchy(z),
                                   atol=1e-9)
        self.assertTrue(np.all(w.imag < 0))

    def test_invalid_exponent(self):
        with self.assertRaises(ParameterError):
            ContinuedPowerH(BERNOULLI, 1.5)


THREE_ATOMS = Measure(atoms=[(-1.2, 0.3), (0.4, 0.5), (1.7, 0.2)])
CASES = ((BERNOULLI, 2), (BERNOULLI, 1.5),
         (Measure(components=[(1, Semicircle(0, 1))]), 2.5),
         (THREE_ATOMS, 1.8))


class TestSubordinationBounds(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(7)

    def pairs(self, n=1000):
        x = self.rng.uniform(-3, 3, (2, n))
        y = self.rng.exponential(1, (2, n))
        return x[0] + 1j * y[0], x[1] + 1j * y[1]

    def test_left_inverse_on_curve(self):
        for mu, p in CASES:
            for interval in v_plus(mu, p):
                width = interval.right - interval.left
                x = np.linspace(interval.left + 0.05 * width,
                                interval.right - 0.05 * width, 25)
                curve = x + 1j * f_p(mu, p, x)
                w = omega_p(mu, p, psi_p(mu, p, x))
                np.testing.assert_allclose(w, curve, atol=1e-8)

    def test_omega_expands(self):
        for mu, p in CASES:
            z1, z2 = self.pairs()
            gap = np.abs(omega_p(mu, p, z1) - omega_p(mu, p, z2))
            self.assertTrue(np.all(np.abs(z1 - z2) / 2 <= gap + 1e-9))

    def test_mass_ratio_decreasing(self):
        y = np.geomspace(1e-2, 1e2, 40)
        for mu in (BERNOULLI, THREE_ATOMS,
                   Measure(components=[(1, Semicircle(0, 1))])):
            for x in (-1.0, 0.0, 0.4, 1.1):
                ratio = mass_ratio(mu, x, y)
                self.assertTrue(np.all(np.diff(ratio) < 0), (mu, x))

    def test_lipschitz_on_closure(self):
        for mu, p in CASES:
            (x1, x2), (y1, y2) = (self.rng.uniform(-3, 3, (2, 1000)),
                                  self.rng.exponential(1, (2, 1000)))
            z1 = x1 + 1j * (f_p(mu, p, x1) + y1)
            z2 = x2 + 1j * (f_p(mu, p, x2) + y2)
            step = np.abs(z1 - z2)
            energy = np.abs(eval_E(mu, z1) - eval_E(mu, z2))
            self.assertTrue(np.all(energy <= step / (p - 1) + 1e-9))
            hfunc = PowerH(mu, p)
            image = np.abs(hfunc.h(z1) - hfunc.h(z2))
            self.assertTrue(np.all(image <= 2 * step + 1e-9))


if __name__ == '__main__':
    unittest.main()
