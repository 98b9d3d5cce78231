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
"""
Free powers, Boolean powers, their compositions, semicircular
addition, the map Phi and compound free Poisson laws.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from ._errors import (
    HeavyTail, NoConvergence, NonCenteredInput, NonConvergent, NotDefined,
    ParameterError, RegimeError, ScanInconclusive
)
from ._logger import logger, operation_logger
from ._measure import (
    Arcsine, Cauchy, DensityTable, MarchenkoPastur, Measure, MeasureBase,
    Semicircle, Tabulated, boundary_reciprocal, cauchy_derivative,
    merge_intervals, reciprocal, stieltjes_invert
)
from ._oracle import compare, predict_moments_bpq
from ._params import BpqParams
from ._regularity import (
    AtomCertificate, AtomRecord, divisibility_bracket, find_atoms,
    gap_intervals
)
from ._subordination import (
    BrownianH, ContinuedPowerH, PowerH, VPlusInterval, curve_grid,
    solve_boundary, solve_subordination
)

MIN_WEIGHT = 1e-9
SUB_ONE_TOL = 1e-4
CROSS_CHECK_TOL = 1e-8
# Resampling of bpq outputs whose total mass has not settled
MASS_SETTLED = 1e-5
MASS_REFINEMENTS = 3
# Largest factor between successive heights of the Newton continuation
DESCENT = 4.0


@dataclass(frozen=True)
class SpectralResult:
    """
    Output measure of an operation: a sampled density plus atoms.

    Attributes
    ----------
    density : DensityTable
        The continuous part, sampled.
    atoms : tuple of AtomRecord
        The atoms, sorted by position.
    params : dict
        The operation tag and its parameters.
    diagnostics : dict
        Solver residuals and, when checked, moment deviations.
    transform : callable
        The reciprocal Cauchy transform of the output on the upper
        half-plane.
    divisibility : (float, float)
        Bounds on the divisibility indicator.
    """
    density: DensityTable
    atoms: tuple
    params: dict
    diagnostics: dict = field(default_factory=dict)
    transform: Callable = field(default=None, repr=False, compare=False)
    divisibility: tuple = (0.0, np.inf)
    measure: MeasureBase = field(default=None, repr=False, compare=False)
    source: MeasureBase = field(default=None, repr=False, compare=False)

    def atom_mass(self):
        return sum(a.mass for a in self.atoms)

    def total_mass(self):
        """
        Atom masses plus the trapezoid integral of the density.
        """
        return self.atom_mass() + self.density.mass()

    def moments(self, n):
        """
        Raw moments: atoms exactly and the density by the trapezoid rule.
        """
        m = self.density.moments(n)
        for atom in self.atoms:
            m = m + atom.mass * atom.position ** np.arange(n + 1)
        return m

    def to_measure(self, tabulated=False) -> MeasureBase:
        """
        The output as a measure usable by further operations.

        Parameters
        ----------
        tabulated : bool, optional
            Export the atoms plus one Tabulated component per support
            interval, independent of the solver that produced the result
            (the default is False, which keeps the exact transform).
        """
        if not tabulated:
            if self.measure is not None:
                return self.measure
            return SubordinatedMeasure(self)
        table = self.density
        components = []
        for a, b in table.support_intervals:
            start = max(np.searchsorted(table.x, a) - 1, 0)
            stop = min(np.searchsorted(table.x, b, side='right'),
                       table.x.size - 1)
            grid = table.x[start:stop + 1]
            values = table.density[start:stop + 1]
            weight = trapezoid(values, grid)
            if grid.size > 1 and weight > MIN_WEIGHT:
                components.append((weight, grid, values / weight))
        atoms = [(a.position, a.mass) for a in self.atoms]
        total = sum(m for _, m in atoms) + sum(w for w, _, _ in components)
        if abs(total - 1) > SUB_ONE_TOL:
            logger.warning(f"Exported measure has mass {total:.8f}; "
                           f"renormalizing")
        return Measure(
            atoms=[(pos, mass / total) for pos, mass in atoms],
            components=[(w / total, Tabulated(grid, values))
                        for w, grid, values in components],
        )


class SubordinatedMeasure(MeasureBase):
    """
    Measure given by the reciprocal Cauchy transform of a result.
    """

    def __init__(self, result: SpectralResult):
        if result.transform is None:
            raise ParameterError('result carries no transform')
        self.result = result
        self.base = result.source
        self.divisibility = result.divisibility

    def cauchy(self, z):
        with np.errstate(all='ignore'):
            return 1 / self.result.transform(np.asarray(z, dtype=complex))

    def density(self, x):
        table = self.result.density
        return np.interp(x, table.x, table.density, left=0.0, right=0.0)

    @property
    def atoms(self):
        return tuple((a.position, a.mass) for a in self.result.atoms)

    def ac_intervals(self):
        return merge_intervals(self.result.density.support_intervals)

    def support_bounds(self):
        ends = [pos for pos, _ in self.atoms]
        for a, b in self.ac_intervals():
            ends.extend((a, b))
        return (min(ends), max(ends))

    def moments(self, n):
        return self.result.moments(n)


class PoissonSeed(MeasureBase):
    """
    The measure with F(z) = z (2 - z G(z)) for a jump law with Cauchy
    transform G. Its Boolean cumulants are the moments of the jump law.
    """

    def __init__(self, nu: MeasureBase):
        self.nu = nu
        self.divisibility = ((0.0, 0.0) if nu.is_point_mass
                             else (0.0, np.inf))
        self._atoms = tuple(self._find_atoms())

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(all='ignore'):
            return 1 / (z * (2 - z * self.nu.cauchy(z)))

    def _find_atoms(self):
        atoms = []
        at_zero = dict(self.nu.atoms).get(0.0, 0.0)
        atoms.append((0.0, 1 / (2 - at_zero)))
        lo, hi = self.nu.support_bounds()
        window = (min(0.0, 2 * lo) - 1, max(0.0, 2 * hi) + 1)

        def func(x):
            with np.errstate(all='ignore'):
                return float(np.real(x * self.nu.cauchy(x + 0j))) - 2

        for a, b in gap_intervals(self.nu, window):
            x = np.linspace(a, b, 4098)[1:-1]
            values = np.array([func(v) for v in x])
            for i in np.flatnonzero(np.isfinite(values[:-1] * values[1:])
                                    & (values[:-1] * values[1:] < 0)):
                root = brentq(func, x[i], x[i + 1], xtol=1e-15)
                if abs(func(root)) > 1e-8:
                    continue
                slope = complex(cauchy_derivative(self.nu, root + 0j))
                jc = -2 - root ** 2 * slope.real
                if jc > 0:
                    atoms.append((float(root), 1 / jc))
        return sorted(atoms)

    def density(self, x):
        g = self.cauchy(np.asarray(x, dtype=float) + 0j)
        return np.where(np.isfinite(g), np.maximum(-g.imag / np.pi, 0), 0.0)

    @property
    def atoms(self):
        return self._atoms

    def ac_intervals(self):
        return self.nu.ac_intervals()

    def support_bounds(self):
        lo, hi = self.nu.support_bounds()
        return (min(0.0, 2 * lo), max(0.0, 2 * hi))

    def moments(self, n):
        nu_moments = self.nu.moments(n)
        m = [1.0]
        for order in range(1, n + 1):
            m.append(sum(nu_moments[k] * m[order - k]
                         for k in range(1, order + 1)))
        return np.array(m)


def _bracket_map(bracket, func):
    return tuple(float(func(v)) if np.isfinite(v) else np.inf
                 for v in bracket)


def bpq_reciprocal(mu: MeasureBase, params: BpqParams, z, strict=True):
    """
    Reciprocal Cauchy transform of the composition,
    (pq omega_p(z) - q'z)/(p - 1), or qF(z) + (1 - q)z when p = 1.
    """
    p, q = params.as_floats()
    z = np.asarray(z, dtype=complex)
    if p == 1:
        return q * reciprocal(mu, z) + (1 - q) * z
    w, _ = solve_subordination(PowerH(mu, p), z, strict=strict)
    return (p * q * w - float(params.q_prime) * z) / (p - 1)


def _residual_check(hfunc, window):
    # largest subordination residual on a 20 x 20 grid of the upper half-plane
    lo, hi = window
    scale = 1 + (hi - lo) / 2
    x, y = np.meshgrid(np.linspace(lo, hi, 20),
                       scale * np.geomspace(1e-2, 10, 20))
    _, residual = solve_subordination(hfunc, x + 1j * y)
    return residual


def _atom_records(measure, regime):
    return tuple(
        AtomRecord(float(pos), float(mass),
                   AtomCertificate(0.0, float('nan'), 1 / mass, regime))
        for pos, mass in measure.atoms
    )


def sample_measure(measure: MeasureBase, params, window=None, grid_n=2001,
                   regime='identity'):
    """
    A result holding `measure` itself, with its density sampled on a grid
    clustered at the ends of its continuous support.
    """
    if window is None:
        lo, hi = measure.support_bounds()
        margin = 0.05 * (hi - lo) + 1e-3
        window = (lo - margin, hi + margin)
    intervals = [VPlusInterval(max(a, window[0]), min(b, window[1]))
                 for a, b in measure.ac_intervals()
                 if np.isfinite(a) and np.isfinite(b)]
    x = curve_grid(intervals, window, grid_n)
    density = np.nan_to_num(measure.density(x), posinf=0.0)
    for iv in intervals:
        density[(x == iv.left) | (x == iv.right)] = 0.0
    table = DensityTable(x, density, tuple((iv.left, iv.right)
                                           for iv in intervals))
    return SpectralResult(
        table, _atom_records(measure, regime), dict(params),
        {'max_residual': 0.0},
        transform=lambda z: reciprocal(measure, z),
        divisibility=divisibility_bracket(measure), measure=measure,
    )


def _bpq_table(hfunc, params, window, grid_n, coarse_n):
    p, q = params.as_floats()
    solution = solve_boundary(hfunc, window, grid_n, coarse_n)
    x, f, psi = solution.grid, solution.fp_values, solution.psi_values
    positive = f > 0
    with np.errstate(divide='ignore', invalid='ignore'):
        if params.is_special:
            values = f / (np.pi * (x ** 2 + f ** 2))
        else:
            values = (p - 1) * p * q * f / (np.pi * np.abs(
                p * q * x - float(params.q_prime) * psi + 1j * p * q * f
            ) ** 2)
    table = DensityTable(psi, np.where(positive, values, 0.0),
                         solution.psi_support())
    return solution, table


def _warn_below_resolution(log, intervals):
    narrow = [iv for iv in intervals if iv.below_resolution]
    if narrow:
        log.warning(f"{len(narrow)} support components below resolution "
                    f"are sampled uniformly; their shape is not resolved")


def bpq(mu: MeasureBase, params: BpqParams, window=None, grid_n=2001,
        coarse_n=2001) -> SpectralResult:
    """
    The Boolean power with exponent q of the free power with exponent p.

    The density at psi_p(x) is
    (p - 1) pq f_p(x) / (pi |pqx - q'psi_p(x) + i pq f_p(x)|^2), or
    f_p(x) / (pi (x^2 + f_p(x)^2)) when q' = 0.

    Parameters
    ----------
    mu : Measure
        The input measure.
    params : BpqParams
        The exponents.
    window : (float, float), optional
        The scan window of the boundary curve.
    grid_n : int, optional
        The number of density samples (the default is 2001).
    coarse_n : int, optional
        The number of coarse samples locating the support.

    Returns
    -------
    SpectralResult
        The output measure.
    """
    p, q = params.as_floats()
    log = operation_logger('bpq', p=params.p, q=params.q)
    if p == 1:
        return boolean_power(mu, params.q, window, grid_n)
    hfunc = PowerH(mu, p)
    if window is None:
        window = hfunc.default_window()
    atoms = find_atoms(mu, params.p, params.q, window)
    atom_mass = sum(a.mass for a in atoms)
    solution, table = _bpq_table(hfunc, params, window, grid_n, coarse_n)
    deviation = abs(atom_mass + table.mass() - 1)
    for _ in range(MASS_REFINEMENTS):
        if deviation <= MASS_SETTLED:
            break
        grid_n = 2 * grid_n - 1
        log.debug(f"Mass off by {deviation:.3g}; resampling on {grid_n} "
                  f"points")
        refined, refined_table = _bpq_table(hfunc, params, window, grid_n,
                                            coarse_n)
        refined_deviation = abs(atom_mass + refined_table.mass() - 1)
        if refined_deviation >= deviation:
            break
        settling = refined_deviation < deviation / 2
        solution, table, deviation = refined, refined_table, refined_deviation
        if not settling:
            break
    if deviation > SUB_ONE_TOL:
        log.warning(f"Total mass is off by {deviation:.3g} on {grid_n} "
                    f"samples")
    _warn_below_resolution(log, solution.vplus_intervals)
    residual = _residual_check(hfunc, window)
    result = SpectralResult(
        table, tuple(atoms),
        {'operation': 'bpq', 'p': params.p, 'q': params.q},
        {'max_residual': residual,
         'components': len(solution.vplus_intervals)},
        transform=lambda z: bpq_reciprocal(mu, params, z, strict=False),
        divisibility=_bracket_map(divisibility_bracket(mu),
                                  lambda v: (p - 1 + v) / (p * q)),
        source=mu,
    )
    log.info(f"{len(atoms)} atoms, {len(solution.vplus_intervals)} "
             f"components, total mass {result.total_mass():.8f}")
    return result


def free_power(mu: MeasureBase, p, window=None, grid_n=2001,
               coarse_n=2001) -> SpectralResult:
    """
    The free power with exponent p >= 1. For p = 1 the input is
    resampled.
    """
    if not p >= 1:
        raise ParameterError(f"free_power needs p >= 1, got {p}")
    if p == 1:
        return sample_measure(mu, {'operation': 'bpq', 'p': 1, 'q': 1},
                              grid_n=grid_n)
    return bpq(mu, BpqParams(p, 1), window, grid_n, coarse_n)


def boolean_power(mu: MeasureBase, q, window=None,
                  grid_n=2001) -> SpectralResult:
    """
    The Boolean power with exponent q > 0, with F = qF_mu + (1 - q)z.

    The density comes from Stieltjes inversion of 1/F with the certified
    atoms subtracted.
    """
    if not q > 0:
        raise ParameterError(f"boolean_power needs q > 0, got {q}")
    log = operation_logger('boolean_power', q=q)
    qf = float(q)
    if window is None:
        lo, hi = mu.support_bounds()
        center, half = (lo + hi) / 2, (hi - lo) / 2
        reach = (half + 1) * max(1.0, qf)
        window = (center - reach, center + reach)
    atoms = find_atoms(mu, 1, q, window)

    def transform(z):
        return qf * reciprocal(mu, z) + (1 - qf) * z

    with np.errstate(all='ignore'):
        table = stieltjes_invert(
            lambda z: 1 / transform(z), window, grid_n=grid_n,
            atoms=[(a.position, a.mass) for a in atoms]
        )
    result = SpectralResult(
        table, tuple(atoms), {'operation': 'bpq', 'p': 1, 'q': q},
        {'max_residual': 0.0}, transform=transform,
        divisibility=_bracket_map(divisibility_bracket(mu),
                                  lambda v: v / qf),
    )
    log.info(f"{len(atoms)} atoms, total mass {result.total_mass():.8f}")
    return result


def b_t(mu: MeasureBase, t, window=None, grid_n=2001,
        coarse_n=2001) -> SpectralResult:
    """
    The semigroup map at time t >= 0, with parameters (t + 1, 1/(t + 1)).
    """
    if not t >= 0:
        raise ParameterError(f"b_t needs t >= 0, got {t}")
    if t == 0:
        return sample_measure(mu, {'operation': 'bpq', 'p': 1, 'q': 1},
                              grid_n=grid_n)
    return bpq(mu, BpqParams.from_t(t), window, grid_n, coarse_n)


def phi_bpq(mu: MeasureBase, params: BpqParams, z):
    """
    Voiculescu transform of the composition when q <= 1/p*.

    Equal to (p - 1) E_mu(z) when q = 1/p*, and to z - F(z) of the
    composition with exponents (p(1 - q), q/(1 - q)) when q < 1/p*.

    Raises
    ------
    RegimeError
        If q > 1/p*.
    """
    if not params.is_infinitely_divisible:
        raise RegimeError(f"no Voiculescu transform on the half-plane for "
                          f"{params}")
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ParameterError('phi_bpq is evaluated on im(z) > 0')
    if params.is_special:
        p = float(params.p)
        return ((p - 1) * (z - reciprocal(mu, z)))[()]
    inner = BpqParams(params.p * (1 - params.q),
                      params.q / (1 - params.q))
    return (z - bpq_reciprocal(mu, inner, z))[()]


def free_brownian(nu: MeasureBase, t, window=None, grid_n=2001,
                  coarse_n=2001) -> SpectralResult:
    """
    Sum of `nu` and a free semicircular law of variance t > 0, with
    density f(x)/(pi t) at psi(x) for the map H(z) = z + tG(z).
    """
    hfunc = BrownianH(nu, t)
    log = operation_logger('free_brownian', t=t)
    if window is None:
        window = hfunc.default_window()
    solution = solve_boundary(hfunc, window, grid_n, coarse_n)
    _warn_below_resolution(log, solution.vplus_intervals)
    values = solution.fp_values / (np.pi * float(t))
    table = DensityTable(solution.psi_values, values,
                         solution.psi_support())

    def transform(z):
        w, _ = solve_subordination(hfunc, z, strict=False)
        return reciprocal(nu, w)

    lower = 1.0 if divisibility_bracket(nu)[0] >= 1 else 0.0
    result = SpectralResult(
        table, (), {'operation': 'brownian', 't': t},
        {'max_residual': _residual_check(hfunc, window),
         'components': len(solution.vplus_intervals)},
        transform=transform, divisibility=(lower, np.inf),
    )
    log.info(f"{len(solution.vplus_intervals)} components, "
             f"total mass {result.total_mass():.8f}")
    return result


def phi_map(mu: MeasureBase, grid_n=2001) -> Measure:
    """
    The measure nu with sigma^2 G_nu = E_mu for centered `mu` of
    variance sigma^2.

    Its atoms sit at the real zeros a of G_mu with mass
    -1/(sigma^2 G'_mu(a)); the rest comes from Stieltjes inversion and is
    returned as a tabulated component.

    Raises
    ------
    NonCenteredInput
        If |mean| >= 1e-9.
    HeavyTail
        If the variance is infinite.
    """
    log = operation_logger('phi_map')
    m = mu.moments(2)
    if abs(m[1]) >= 1e-9:
        raise NonCenteredInput(f"mean {m[1]} is not zero")
    variance = float(m[2] - m[1] ** 2)
    if not variance > 0:
        raise ParameterError('phi_map needs a positive variance')
    lo, hi = mu.support_bounds()
    margin = 0.05 * (hi - lo) + 1e-3
    window = (lo - margin, hi + margin)

    def func(x):
        with np.errstate(all='ignore'):
            return float(np.real(mu.cauchy(x + 0j)))

    atoms = []
    for a, b in gap_intervals(mu, window):
        x = np.linspace(a, b, 4098)[1:-1]
        values = np.array([func(v) for v in x])
        roots = list(x[values == 0])
        for i in np.flatnonzero(np.isfinite(values[:-1] * values[1:])
                                & (values[:-1] * values[1:] < 0)):
            root = brentq(func, x[i], x[i + 1], xtol=1e-15)
            if abs(func(root)) < 1e-10:
                roots.append(root)
        for root in roots:
            slope = complex(cauchy_derivative(mu, root + 0j)).real
            if slope < 0:
                atoms.append((float(root), -1 / (variance * slope)))

    def evaluator(z):
        return (z - reciprocal(mu, z)) / variance

    weight = 1 - sum(mass for _, mass in atoms)
    components = []
    if weight >= MIN_WEIGHT:
        table = stieltjes_invert(evaluator, window, grid_n=grid_n,
                                 atoms=atoms)
        mass = table.mass()
        if abs(mass - weight) > 1e-3:
            log.warning(f"continuous mass {mass} differs from {weight}")
        components.append(
            (weight, Tabulated(table.x, table.density / mass))
        )
    else:
        total = sum(mass for _, mass in atoms)
        atoms = [(pos, mass / total) for pos, mass in atoms]
    log.info(f"{len(atoms)} atoms, continuous weight {max(weight, 0):.8f}")
    return Measure(atoms, components)


def compound_free_poisson(lam, nu: MeasureBase, window=None, grid_n=2001,
                          coarse_n=2001) -> SpectralResult:
    """
    The compound free Poisson law with rate `lam` > 0 and jump law `nu`,
    built as the composition with p = 1 + lam and q = lam/(1 + lam) of
    :py:class:`PoissonSeed`. It has an atom at 0 of mass 1 - lam when
    lam < 1.
    """
    if not lam > 0:
        raise ParameterError(f"rate must be positive, got {lam}")
    seed = PoissonSeed(nu)
    exact = isinstance(lam, (int, Fraction))
    p = 1 + (Fraction(lam) if exact else float(lam))
    q = (p - 1) / p
    result = bpq(seed, BpqParams(p, q), window, grid_n, coarse_n)
    lower, upper = divisibility_bracket(seed)
    lamf = float(lam)
    return SpectralResult(
        result.density, result.atoms,
        {'operation': 'poisson', 'lambda': lam},
        result.diagnostics, transform=result.transform,
        divisibility=((lower + lamf) / lamf, (upper + lamf) / lamf),
    )


def _sub_one_construction(mu, p, window, grid_n):
    # closed-form free powers below one, used as cross-checks
    if isinstance(mu, SubordinatedMeasure):
        return None
    if not isinstance(mu, Measure):
        return None
    if mu.is_point_mass:
        return Measure.point(p * mu.atoms[0][0])
    if len(mu.components) != 1 or mu.point_part:
        return None
    shape = mu.components[0][1]
    if isinstance(shape, Semicircle):
        return Measure(components=[(1, Semicircle(p * shape.center,
                                                  p * shape.variance))])
    if isinstance(shape, MarchenkoPastur):
        return Measure(components=[(1, MarchenkoPastur(p * shape.rate,
                                                       shape.jump))])
    if isinstance(shape, Cauchy):
        return Measure(components=[(1, Cauchy(p * shape.location,
                                              p * shape.scale))])
    if isinstance(shape, Arcsine):
        center = (shape.left + shape.right) / 2
        half = (shape.right - shape.left) / 2
        pair = Measure(atoms=[(center / 2 - half / 2, 0.5),
                              (center / 2 + half / 2, 0.5)])
        if 2 * p < 1:
            raise NotDefined('arcsine law has no free power below 1/2')
        if 2 * p == 1:
            return pair
        return free_power(pair, 2 * p, window, grid_n)
    return None


def _semigroup_shortcut(mu, p, window, grid_n):
    # a free power of a free power is a single free power
    if not isinstance(mu, SubordinatedMeasure):
        return None
    params = mu.result.params
    if (mu.base is not None and params.get('operation') == 'bpq'
            and params.get('q') == 1 and params['p'] * p >= 1):
        return free_power(mu.base, params['p'] * p, window, grid_n)
    return None


class _SubOneCauchy:
    """
    Cauchy transform of a free power below one at x + iy.

    The subordination equation is solved by Newton steps continued
    downward in y: a call on the abscissae of the previous call starts
    from its solutions and descends by at most a factor of 4 per level.
    Solutions may pass below the real line; each sample remembers where
    it crossed so that F is continued through the right component.
    """

    def __init__(self, mu, p, top):
        self.hfunc = ContinuedPowerH(mu, p)
        self.top = top
        self.worst = 0.0
        self._x = None
        self._y = None
        self._w = None
        self._crossing = None

    def _solve(self, z, start):
        self._crossing = np.where(start.imag >= 0, start.real, self._crossing)
        self.hfunc.crossing = self._crossing
        w, worst = solve_subordination(self.hfunc, z, start=start)
        self.worst = max(self.worst, worst)
        return w

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        z = z.ravel()
        x, y = z.real, z.imag
        if (self._x is None or self._x.shape != x.shape
                or not np.array_equal(self._x, x) or np.any(y > self._y)):
            self._x = x.copy()
            self._y = np.maximum(y, self.top)
            self._crossing = x.copy()
            self._w = self._solve(x + 1j * self._y, x + 1j * (self._y + 1))
        while np.any(self._y > y):
            level = np.maximum(self._y / DESCENT, y)
            self._w = self._solve(x + 1j * level, self._w)
            self._y = level
        p = self.hfunc.p
        with np.errstate(all='ignore'):
            return ((p - 1) / (p * self._w - z)).reshape(shape)


def _sub_one_table(evaluator, window, grid_n, atoms):
    known = [(a.position, a.mass) for a in atoms]
    table = stieltjes_invert(evaluator, window, grid_n=grid_n, atoms=known)
    if not table.support_intervals:
        return table
    # second pass clustered at the support ends found on the uniform grid
    x = table.x
    widened = []
    for a, b in table.support_intervals:
        left = np.searchsorted(x, a) - 1
        right = np.searchsorted(x, b) + 1
        widened.append((x[max(left, 0)], x[min(right, x.size - 1)]))
    intervals = [VPlusInterval(a, b) for a, b in merge_intervals(widened)]
    grid = curve_grid(intervals, window, grid_n)
    return stieltjes_invert(evaluator, window, atoms=known, x=grid)


def free_power_sub_one(mu: MeasureBase, p, window=None,
                       grid_n=2001) -> SpectralResult:
    """
    The free power with exponent p in (0, 1), when it exists.

    Existence is gated by the divisibility bracket and by positivity of
    the predicted moments. The subordination map is solved by damped
    Newton steps, first on a 20 x 20 grid of the upper half-plane, then
    continued down to the real line, where the transform (pw - z)/(p - 1)
    is inverted for the density. Near the output support the solution w
    lies below the real line, where F is continued analytically across
    the support of the input. Atoms sit over the zeros of F. The
    output is validated by its total mass and its moments, and against
    the closed form where one is known.

    Parameters
    ----------
    mu : Measure
        The input measure.
    p : float
        The exponent, in (0, 1).
    window : (float, float), optional
        The sampling window of the output.
    grid_n : int, optional
        The number of density samples (the default is 2001).

    Raises
    ------
    NotDefined
        If the power does not exist or cannot be certified.
    """
    if not 0 < p < 1:
        raise ParameterError(f"free_power_sub_one needs 0 < p < 1, got {p}")
    log = operation_logger('free_power_sub_one', p=p)
    p = float(p)
    lower, upper = divisibility_bracket(mu)
    if upper < 1 - p:
        raise NotDefined(f"divisibility indicator at most {upper} < {1 - p}")
    try:
        predicted = predict_moments_bpq(mu, p, 1, 6)
    except HeavyTail:
        predicted = None
    if predicted is not None and not predicted.is_consistent():
        raise NotDefined('predicted moments are not those of a measure')

    lo, hi = mu.support_bounds()
    scale = 1 + (hi - lo) / 2
    if predicted is not None:
        scale = 1 + np.sqrt(max(predicted[2] - predicted[1] ** 2, 0.0))
    x, y = np.meshgrid(np.linspace(lo, hi, 20),
                       1.5 * scale * np.geomspace(1, 10, 20))
    z = (x + 1j * y).ravel()
    hfunc = PowerH(mu, p)
    try:
        w, residual = solve_subordination(hfunc, z)
    except NoConvergence as err:
        raise NotDefined(f"subordination failed: {err}")
    divisibility = _bracket_map((lower, upper), lambda v: (p - 1 + v) / p)

    shortcut = _semigroup_shortcut(mu, p, window, grid_n)
    if shortcut is not None:
        deviation = _deviation((p * w - z) / (p - 1), shortcut.transform(z))
        if deviation > CROSS_CHECK_TOL:
            raise NotDefined(f"semigroup shortcut deviates by {deviation}")
        log.info(f"Certified by the semigroup with residual {residual}")
        return SpectralResult(
            shortcut.density, shortcut.atoms,
            {'operation': 'power', 'p': p},
            {'max_residual': residual, 'cross_check': deviation},
            transform=shortcut.transform, divisibility=divisibility,
            measure=shortcut.measure, source=mu.base,
        )

    if window is None:
        center, half = (lo + hi) / 2, (hi - lo) / 2
        margin = 0.05 * (hi - lo) + 1e-3
        window = (p * center - half - margin, p * center + half + margin)
    try:
        atoms = tuple(find_atoms(mu, p))
        evaluator = _SubOneCauchy(mu, p, 1.5 * scale)
        if 1 - sum(a.mass for a in atoms) < MIN_WEIGHT:
            grid = np.linspace(window[0], window[1], grid_n)
            table = DensityTable.from_samples(grid, np.zeros(grid_n))
        else:
            table = _sub_one_table(evaluator, window, grid_n, atoms)
    except (NoConvergence, NonConvergent, ScanInconclusive) as err:
        raise NotDefined(f"power cannot be certified: {err}")

    def transform(points):
        with np.errstate(all='ignore'):
            return 1 / _SubOneCauchy(mu, p, 1.5 * scale)(points)

    result = SpectralResult(
        table, atoms, {'operation': 'power', 'p': p},
        {'max_residual': max(residual, evaluator.worst),
         'components': len(table.support_intervals)},
        transform=transform, divisibility=divisibility, source=mu,
    )
    if predicted is not None:
        if abs(result.total_mass() - 1) > SUB_ONE_TOL:
            raise NotDefined(f"total mass {result.total_mass()}")
        report = compare(result, predicted, 6, SUB_ONE_TOL)
        if not report.passed:
            raise NotDefined(f"moment deviation {report.max_deviation}")
        result.diagnostics['moments'] = report.as_dict()

    constructed = _sub_one_construction(mu, p, window, grid_n)
    if constructed is None:
        log.debug('No closed form to cross-check against')
    else:
        if isinstance(constructed, Measure):
            constructed = sample_measure(constructed, {}, window, grid_n)
        deviation = _deviation((p * w - z) / (p - 1),
                               constructed.transform(z))
        if deviation > CROSS_CHECK_TOL:
            raise NotDefined(f"closed form deviates by {deviation}")
        result.diagnostics['cross_check'] = deviation
    log.info(f"Certified with residual {result.diagnostics['max_residual']}, "
             f"total mass {result.total_mass():.8f}")
    return result


def _deviation(output, expected):
    return float(np.max(np.abs(output - expected) / (1 + np.abs(expected))))
