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
"""Measures on the real line and their analytic transforms."""
from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import trapezoid

from ._errors import (
    DuplicateAtom, EvaluationOnSingularity, HeavyTail, NonConvergent,
    NonMonotoneGrid, NonUnitMass, NotDefined, ParameterError, SchemaError,
    ZeroCauchyTransform
)
from ._logger import logger

MASS_TOL = 1e-9
TABULATED_MASS_TOL = 1e-6
TABULATED_FIT_DEGREE = 32
TABULATED_FIT_CHOP = 1e-12
# Support of a Cauchy component used for windows, in units of its scale
CAUCHY_SPAN = 50.0

EPS_SCHEDULE = tuple(2.0 ** -k for k in range(3, 21))
RICHARDSON_DEPTH = 3
RICHARDSON_TOL = 1e-9
LOOSE_TOL = 1e-4
DENSITY_FLOOR = 1e-12


def _branch_sqrt(w, a, b):
    # sqrt((w - a)(w - b)) analytic off [a, b] and ~ w at infinity
    return np.sqrt(w - a) * np.sqrt(w - b)


def _reflect(cauchy, z):
    # Cauchy transform of the reflected measure s -> -s
    return -np.conj(cauchy(-np.conj(z)))


class AcShape:
    """
    Base class for shapes of absolutely continuous components.
    Each shape is a probability measure.
    """
    family = None

    def cauchy(self, z):
        """
        Evaluate the Cauchy transform at complex points.
        """
        raise NotImplementedError()

    def density(self, x):
        """
        Evaluate the density of the continuous part at real points.
        """
        raise NotImplementedError()

    def continued_density(self, z):
        """
        Analytic extension of the density into the lower half-plane, so
        that G(z) - 2 pi i density(z) continues G across the support.
        """
        raise NotImplementedError()

    def interval(self):
        """
        The closed support of the continuous part.
        """
        raise NotImplementedError()

    def moment(self, k):
        """
        The k-th raw moment.
        """
        raise NotImplementedError()

    def point_masses(self):
        return ()

    def singular(self, x):
        """
        Mask of real points where the Cauchy transform has no boundary value.
        """
        return np.zeros(np.shape(x), dtype=bool)

    def params(self):
        raise NotImplementedError()

    def __repr__(self):
        args = ', '.join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class Semicircle(AcShape):
    """
    Semicircle law with the given center and variance.
    """
    family = 'semicircle'

    def __init__(self, center=0.0, variance=1.0):
        if not variance > 0:
            raise ParameterError('semicircle variance must be positive')
        self.center = float(center)
        self.variance = float(variance)
        self.radius = 2 * np.sqrt(self.variance)

    def cauchy(self, z):
        w = z - self.center
        return 2 / (w + _branch_sqrt(w, -self.radius, self.radius))

    def density(self, x):
        w = np.asarray(x, dtype=float) - self.center
        return (np.sqrt(np.maximum(4 * self.variance - w ** 2, 0))
                / (2 * np.pi * self.variance))

    def continued_density(self, z):
        w = np.asarray(z, dtype=complex) - self.center
        s = _branch_sqrt(w, -self.radius, self.radius)
        return 1j * s / (2 * np.pi * self.variance)

    def interval(self):
        return (self.center - self.radius, self.center + self.radius)

    def moment(self, k):
        # Catalan numbers for the centered even moments
        centered = [
            comb(j, j // 2) / (j // 2 + 1) * self.variance ** (j // 2)
            if j % 2 == 0 else 0.0
            for j in range(k + 1)
        ]
        return sum(comb(k, j) * self.center ** (k - j) * centered[j]
                   for j in range(k + 1))

    def params(self):
        return dict(center=self.center, variance=self.variance)


class MarchenkoPastur(AcShape):
    """
    Free Poisson law with the given rate and jump size.
    For rate < 1 it carries an atom at zero of mass 1 - rate.
    """
    family = 'marchenko_pastur'

    def __init__(self, rate=1.0, jump=1.0):
        if not rate > 0:
            raise ParameterError('marchenko_pastur rate must be positive')
        if jump == 0:
            raise ParameterError('marchenko_pastur jump must be non-zero')
        self.rate = float(rate)
        self.jump = float(jump)
        self._lower = (1 - np.sqrt(self.rate)) ** 2
        self._upper = (1 + np.sqrt(self.rate)) ** 2

    def _unit_cauchy(self, u):
        s = _branch_sqrt(u, self._lower, self._upper)
        return 2 / (u + 1 - self.rate + s)

    def _positive_cauchy(self, z):
        a = abs(self.jump)
        return self._unit_cauchy(z / a) / a

    def cauchy(self, z):
        if self.jump > 0:
            return self._positive_cauchy(z)
        return _reflect(self._positive_cauchy, z)

    def density(self, x):
        a = abs(self.jump)
        u = np.sign(self.jump) * np.asarray(x, dtype=float) / a
        inside = (u > self._lower) & (u < self._upper)
        with np.errstate(divide='ignore', invalid='ignore'):
            values = np.sqrt(
                np.maximum((u - self._lower) * (self._upper - u), 0)
            ) / (2 * np.pi * u * a)
        return np.where(inside, values, 0.0)

    def _positive_continued(self, z):
        a = abs(self.jump)
        u = np.asarray(z, dtype=complex) / a
        s = _branch_sqrt(u, self._lower, self._upper)
        return 1j * s / (2 * np.pi * u * a)

    def continued_density(self, z):
        if self.jump > 0:
            return self._positive_continued(z)
        return np.conj(self._positive_continued(-np.conj(z)))

    def interval(self):
        ends = sorted((self.jump * self._lower, self.jump * self._upper))
        return tuple(ends)

    def moment(self, k):
        if k == 0:
            return 1.0
        narayana = sum(
            comb(k, j) * comb(k, j - 1) / k * self.rate ** j
            for j in range(1, k + 1)
        )
        return self.jump ** k * narayana

    def point_masses(self):
        if self.rate < 1:
            return ((0.0, 1 - self.rate),)
        return ()

    def singular(self, x):
        x = np.asarray(x, dtype=float)
        if self.rate <= 1:
            return x == 0
        return np.zeros(x.shape, dtype=bool)

    def params(self):
        return dict(rate=self.rate, jump=self.jump)


class Cauchy(AcShape):
    """
    Cauchy law with the given location and scale.
    """
    family = 'cauchy'

    def __init__(self, location=0.0, scale=1.0):
        if not scale > 0:
            raise ParameterError('cauchy scale must be positive')
        self.location = float(location)
        self.scale = float(scale)

    def cauchy(self, z):
        return 1 / (z - self.location + 1j * self.scale)

    def density(self, x):
        w = np.asarray(x, dtype=float) - self.location
        return self.scale / (np.pi * (w ** 2 + self.scale ** 2))

    def continued_density(self, z):
        w = np.asarray(z, dtype=complex) - self.location
        return self.scale / (np.pi * (w ** 2 + self.scale ** 2))

    def interval(self):
        return (-np.inf, np.inf)

    def moment(self, k):
        if k == 0:
            return 1.0
        raise HeavyTail(f"cauchy component has no moment of order {k}")

    def params(self):
        return dict(location=self.location, scale=self.scale)


class Arcsine(AcShape):
    """
    Arcsine law on the interval [left, right].
    """
    family = 'arcsine'

    def __init__(self, left=-1.0, right=1.0):
        if not left < right:
            raise ParameterError('arcsine needs left < right')
        self.left = float(left)
        self.right = float(right)

    def cauchy(self, z):
        return 1 / _branch_sqrt(z, self.left, self.right)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.left) & (x < self.right)
        with np.errstate(divide='ignore', invalid='ignore'):
            values = 1 / (np.pi * np.sqrt((x - self.left) * (self.right - x)))
        return np.where(inside, values, 0.0)

    def continued_density(self, z):
        s = _branch_sqrt(np.asarray(z, dtype=complex), self.left, self.right)
        return -1j / (np.pi * s)

    def interval(self):
        return (self.left, self.right)

    def moment(self, k):
        center = (self.left + self.right) / 2
        half = (self.right - self.left) / 2
        unit = [comb(j, j // 2) / 4 ** (j // 2) if j % 2 == 0 else 0.0
                for j in range(k + 1)]
        return sum(comb(k, j) * center ** (k - j) * half ** j * unit[j]
                   for j in range(k + 1))

    def singular(self, x):
        x = np.asarray(x, dtype=float)
        return (x == self.left) | (x == self.right)

    def params(self):
        return dict(left=self.left, right=self.right)


class Tabulated(AcShape):
    """
    Density given by values on a grid, linearly interpolated.
    """
    family = 'tabulated'

    def __init__(self, grid, density):
        grid = np.array(grid, dtype=float)
        density = np.array(density, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or grid.shape != density.shape:
            raise ParameterError(
                'tabulated grid and density must be equal-length sequences'
            )
        if not np.all(np.diff(grid) > 0):
            raise NonMonotoneGrid('tabulated grid must be strictly increasing')
        if not np.all(np.isfinite(density)) or np.any(density < 0):
            raise ParameterError('tabulated density must be finite and >= 0')
        total = trapezoid(density, grid)
        if abs(total - 1) > TABULATED_MASS_TOL:
            raise NonUnitMass(
                f"tabulated density integrates to {total}, not 1"
            )
        grid.flags.writeable = False
        density.flags.writeable = False
        self.grid = grid
        self.values = density
        self._slopes = np.diff(density) / np.diff(grid)
        self._squared_fit = None

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        logs = np.log(z[..., None] - self.grid)
        left = self.grid[:-1]
        linear = self.values[:-1] + self._slopes * (z[..., None] - left)
        return np.sum(
            linear * (logs[..., :-1] - logs[..., 1:])
            - self._slopes * np.diff(self.grid),
            axis=-1
        )

    def density(self, x):
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)

    def continued_density(self, z):
        """
        Square root of a Chebyshev fit to the squared density, which is
        smooth at square-root edges. Approximate: the tabulated values
        only pin the extension down on the real line.
        """
        if self._squared_fit is None:
            degree = min(TABULATED_FIT_DEGREE, max(self.grid.size // 4, 1))
            fit = np.polynomial.Chebyshev.fit(self.grid, self.values ** 2,
                                              degree)
            coef = fit.coef
            keep = np.flatnonzero(np.abs(coef)
                                  > TABULATED_FIT_CHOP * np.abs(coef).max())
            self._squared_fit = fit.cutdeg(max(int(keep[-1]), 1))
        return np.sqrt(self._squared_fit(np.asarray(z, dtype=complex)))

    def interval(self):
        return (self.grid[0], self.grid[-1])

    def moment(self, k):
        a, b = self.grid[:-1], self.grid[1:]
        intercept = self.values[:-1] - self._slopes * a
        return float(np.sum(
            intercept * (b ** (k + 1) - a ** (k + 1)) / (k + 1)
            + self._slopes * (b ** (k + 2) - a ** (k + 2)) / (k + 2)
        ))

    def singular(self, x):
        x = np.asarray(x, dtype=float)
        return (x >= self.grid[0]) & (x <= self.grid[-1])

    def params(self):
        return dict(grid=self.grid.tolist(), density=self.values.tolist())


FAMILIES = {
    cls.family: cls
    for cls in (Semicircle, MarchenkoPastur, Cauchy, Arcsine, Tabulated)
}


class MeasureBase:
    """
    Interface shared by every probability measure the engine accepts.
    """

    def cauchy(self, z):
        """
        Evaluate the Cauchy transform without any checks.
        """
        raise NotImplementedError()

    def continued_cauchy(self, z, crossing):
        """
        Cauchy transform continued across the real line at `crossing`.
        """
        raise NotDefined(f"{type(self).__name__} has no analytic continuation")

    def density(self, x):
        raise NotImplementedError()

    @property
    def atoms(self):
        """
        Tuple of (position, mass) pairs, sorted by position.
        """
        raise NotImplementedError()

    def ac_intervals(self):
        """
        Sorted disjoint closed intervals supporting the continuous part.
        """
        raise NotImplementedError()

    def support_bounds(self):
        raise NotImplementedError()

    def moments(self, n):
        raise NotImplementedError()

    def singular(self, x):
        """
        Mask of real points where no boundary value is available.
        """
        positions = np.array([pos for pos, _ in self.atoms])
        return np.isin(np.asarray(x, dtype=float), positions)

    @property
    def is_point_mass(self):
        atoms = self.atoms
        return len(atoms) == 1 and atoms[0][1] == 1 and not self.ac_intervals()


def merge_intervals(intervals):
    """
    Merge overlapping closed intervals into sorted disjoint ones.
    """
    merged = []
    for left, right in sorted(intervals):
        if merged and left <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], right))
        else:
            merged.append((left, right))
    return merged


class Measure(MeasureBase):
    """
    Probability measure made of atoms and absolutely continuous components.
    Immutable after construction.

    Parameters
    ----------
    atoms : sequence of (float, float)
        Atom positions and masses.
    components : sequence of (float, AcShape)
        Component weights and shapes.

    Raises
    ------
    NonUnitMass
        If the total mass is off one by more than 1e-9.
    DuplicateAtom
        If two atoms share a position.
    """

    def __init__(self, atoms=(), components=()):
        atoms = [(float(pos), float(mass)) for pos, mass in atoms]
        components = [(float(weight), shape) for weight, shape in components]
        if not atoms and not components:
            raise NonUnitMass('a measure needs at least one atom or component')
        for pos, mass in atoms:
            if not mass > 0:
                raise ParameterError(f"atom mass {mass} at {pos} not positive")
            if mass > 1 + MASS_TOL:
                raise NonUnitMass(f"atom mass {mass} at {pos} exceeds 1")
        for weight, _ in components:
            if not weight > 0:
                raise ParameterError(f"component weight {weight} not positive")
            if weight > 1 + MASS_TOL:
                raise NonUnitMass(f"component weight {weight} exceeds 1")
        positions = [pos for pos, _ in atoms]
        if len(set(positions)) != len(positions):
            raise DuplicateAtom(f"duplicate atom positions in {positions}")
        total = sum(m for _, m in atoms) + sum(w for w, _ in components)
        if abs(total - 1) > MASS_TOL:
            raise NonUnitMass(f"total mass {total} is not 1")
        atoms = sorted((pos, mass / total) for pos, mass in atoms)
        components = [(weight / total, shape) for weight, shape in components]

        self._positions = np.array([pos for pos, _ in atoms])
        self._masses = np.array([mass for _, mass in atoms])
        self._positions.flags.writeable = False
        self._masses.flags.writeable = False
        self._components = tuple(components)

        merged = dict(atoms)
        for weight, shape in components:
            for pos, mass in shape.point_masses():
                merged[pos] = merged.get(pos, 0.0) + weight * mass
        self._atoms = tuple(sorted(merged.items()))

    @classmethod
    def point(cls, a=0.0):
        """
        The point mass at `a`.
        """
        return cls(atoms=[(a, 1.0)])

    @property
    def atoms(self):
        return self._atoms

    @property
    def point_part(self):
        """
        The explicit atoms, without point masses of components.
        """
        return tuple(zip(self._positions.tolist(), self._masses.tolist()))

    @property
    def components(self):
        """
        Tuple of (weight, shape) pairs.
        """
        return self._components

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        g = np.zeros(z.shape, dtype=complex)
        if self._positions.size:
            g = g + np.sum(
                self._masses / (z[..., None] - self._positions), axis=-1
            )
        for weight, shape in self._components:
            g = g + weight * shape.cauchy(z)
        return g

    def continued_cauchy(self, z, crossing):
        """
        Cauchy transform continued into the lower half-plane across the
        real line at `crossing`.

        Components whose support contains the crossing point (or, off the
        support, the nearest one) switch to their second sheet; atoms and
        the remaining components keep the principal branch.
        """
        z = np.asarray(z, dtype=complex)
        crossing = np.broadcast_to(np.asarray(crossing, dtype=float), z.shape)
        lower = z.imag < 0
        g = np.zeros(z.shape, dtype=complex)
        if self._positions.size:
            g = g + np.sum(
                self._masses / (z[..., None] - self._positions), axis=-1
            )
        if not self._components:
            return g
        gaps = []
        for weight, shape in self._components:
            principal = np.where(lower, np.conj(shape.cauchy(np.conj(z))),
                                 shape.cauchy(z))
            g = g + weight * principal
            left, right = shape.interval()
            gaps.append(np.maximum(np.maximum(left - crossing,
                                              crossing - right), 0))
        gaps = np.array(gaps)
        nearest = gaps == gaps.min(axis=0)
        for (weight, shape), near in zip(self._components, nearest):
            flip = lower & near
            if flip.any():
                with np.errstate(all='ignore'):
                    jump = 2j * np.pi * weight * shape.continued_density(z)
                g = g - np.where(flip, jump, 0)
        return g

    def density(self, x):
        x = np.asarray(x, dtype=float)
        values = np.zeros(x.shape)
        for weight, shape in self._components:
            values = values + weight * shape.density(x)
        return values

    def ac_intervals(self):
        return merge_intervals(
            shape.interval() for _, shape in self._components
        )

    def support_bounds(self):
        ends = [pos for pos, _ in self._atoms]
        for _, shape in self._components:
            left, right = shape.interval()
            if isinstance(shape, Cauchy):
                left = shape.location - CAUCHY_SPAN * shape.scale
                right = shape.location + CAUCHY_SPAN * shape.scale
            ends.extend((left, right))
        return (min(ends), max(ends))

    def moments(self, n):
        if self._positions.size:
            m = [float(np.sum(self._masses * self._positions ** k))
                 for k in range(n + 1)]
        else:
            m = [0.0] * (n + 1)
        for weight, shape in self._components:
            for k in range(n + 1):
                m[k] += weight * shape.moment(k)
        return np.array(m)

    def singular(self, x):
        mask = super().singular(x)
        for _, shape in self._components:
            mask = mask | shape.singular(x)
        return mask

    def to_dict(self):
        """
        Convert to a measure literal.
        """
        return {
            'atoms': [{'pos': float(p), 'mass': float(m)}
                      for p, m in zip(self._positions, self._masses)],
            'ac': [dict(weight=weight, family=shape.family, **shape.params())
                   for weight, shape in self._components],
        }

    def __repr__(self):
        return (f"Measure(atoms={list(zip(self._positions, self._masses))}, "
                f"components={list(self._components)})")


def _field(obj, key, path, kind=float):
    if key not in obj:
        raise SchemaError(f"{path}.{key}", 'missing field')
    try:
        if kind is float:
            value = float(obj[key])
        else:
            value = [float(v) for v in obj[key]]
    except (TypeError, ValueError):
        raise SchemaError(f"{path}.{key}", f"expected {kind.__name__}")
    return value


def build_measure(spec) -> Measure:
    """
    Build a validated measure from a measure literal.

    Parameters
    ----------
    spec : dict
        A literal such as ``{"atoms": [{"pos": -1, "mass": 0.5}, ...],
        "ac": [{"weight": 1, "family": "semicircle", "center": 0,
        "variance": 1}]}``.

    Returns
    -------
    Measure
        The validated measure.
    """
    if not isinstance(spec, dict):
        raise SchemaError('$', 'expected an object')
    unknown = set(spec) - {'atoms', 'ac'}
    if unknown:
        raise SchemaError('$', f"unknown keys {sorted(unknown)}")
    atoms = []
    for i, atom in enumerate(spec.get('atoms', [])):
        path = f"atoms[{i}]"
        if not isinstance(atom, dict):
            raise SchemaError(path, 'expected an object')
        atoms.append((_field(atom, 'pos', path), _field(atom, 'mass', path)))
    components = []
    for i, comp in enumerate(spec.get('ac', [])):
        path = f"ac[{i}]"
        if not isinstance(comp, dict):
            raise SchemaError(path, 'expected an object')
        weight = _field(comp, 'weight', path)
        family = comp.get('family')
        if family not in FAMILIES:
            raise SchemaError(f"{path}.family", f"unknown family {family!r}")
        if family == 'tabulated':
            shape = Tabulated(_field(comp, 'grid', path, list),
                              _field(comp, 'density', path, list))
        else:
            params = {k: _field(comp, k, path)
                      for k in comp if k not in ('weight', 'family')}
            try:
                shape = FAMILIES[family](**params)
            except TypeError as err:
                raise SchemaError(path, str(err))
        components.append((weight, shape))
    return Measure(atoms, components)


def _check_upper(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag < 0):
        raise ParameterError('transforms are evaluated on im(z) >= 0')
    return z


def eval_G(mu: MeasureBase, z):
    """
    Evaluate the Cauchy transform on the closed upper half-plane.

    Parameters
    ----------
    mu : Measure
        The measure.
    z : complex or array_like
        Points with non-negative imaginary part. Real points must avoid
        atoms and tabulated supports.

    Returns
    -------
    complex or numpy.ndarray
        G at `z`.

    Raises
    ------
    EvaluationOnSingularity
        If a real point hits a singularity of G.
    """
    z = _check_upper(z)
    real = z.imag == 0
    if np.any(real) and np.any(mu.singular(z.real[real])):
        raise EvaluationOnSingularity(
            f"Cauchy transform is singular at {z.real[real]}"
        )
    with np.errstate(all='ignore'):
        g = mu.cauchy(z)
    if not np.all(np.isfinite(g)):
        raise EvaluationOnSingularity(
            f"Cauchy transform is not finite at {z[~np.isfinite(g)]}"
        )
    return g[()]


def eval_F(mu: MeasureBase, z):
    """
    Evaluate the reciprocal Cauchy transform F = 1/G.

    Raises
    ------
    ZeroCauchyTransform
        If G vanishes at a point.
    """
    g = np.asarray(eval_G(mu, z))
    if np.any(g == 0):
        raise ZeroCauchyTransform(f"G vanishes at {np.asarray(z)[g == 0]}")
    return (1 / g)[()]


def eval_E(mu: MeasureBase, z):
    """
    Evaluate the energy function E(z) = z - F(z).
    """
    z = np.asarray(z, dtype=complex)
    return (z - eval_F(mu, z))[()]


def reciprocal(mu: MeasureBase, z):
    """
    F = 1/G without singularity checks, for solvers working in the open
    upper half-plane.
    """
    with np.errstate(all='ignore'):
        return 1 / mu.cauchy(z)


def boundary_reciprocal(mu: MeasureBase, x):
    """
    Boundary values of F on the real line. F is set to zero where G is
    infinite (atoms, inverse-square-root edges).
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(all='ignore'):
        g = mu.cauchy(x + 0j)
        f = 1 / g
    return np.where(np.isfinite(g), f, 0.0)


def cauchy_derivative(mu: MeasureBase, z, step=1e-6):
    """
    Derivative of G by a central difference along the real direction.
    """
    z = np.asarray(z, dtype=complex)
    h = step * (1 + np.abs(z))
    with np.errstate(all='ignore'):
        return (mu.cauchy(z + h) - mu.cauchy(z - h)) / (2 * h)


def moments(mu: MeasureBase, n: int) -> 'MomentVector':
    """
    Raw moments up to order `n` (at most 12).

    Raises
    ------
    HeavyTail
        If a component lacks a requested moment.
    """
    if not 0 <= n <= 12:
        raise ParameterError('moment order must be between 0 and 12')
    return MomentVector(mu.moments(n))


def mean_variance(mu: MeasureBase):
    """
    Mean and variance of a measure.
    """
    m = mu.moments(2)
    return float(m[1]), float(m[2] - m[1] ** 2)


@dataclass(frozen=True)
class MomentVector:
    """
    Raw moments m[0] = 1, m[1], ..., m[n].
    """
    m: tuple

    def __post_init__(self):
        m = tuple(self.m)
        if not m or abs(m[0] - 1) > 1e-12:
            raise ParameterError('moment vectors start with m[0] = 1')
        object.__setattr__(self, 'm', m)

    @property
    def order(self):
        return len(self.m) - 1

    def __getitem__(self, k):
        return self.m[k]

    def __len__(self):
        return len(self.m)

    def hankel_min_eigenvalue(self):
        """
        Smallest relative eigenvalue of the largest Hankel matrix.
        """
        size = self.order // 2 + 1
        m = np.array([float(v) for v in self.m])
        hankel = np.array([[m[i + j] for j in range(size)]
                           for i in range(size)])
        eigenvalues = np.linalg.eigvalsh(hankel)
        return eigenvalues[0] / max(1.0, np.max(np.abs(eigenvalues)))

    def is_consistent(self, tol=1e-8):
        """
        Whether the moments can come from a probability measure.
        """
        return self.hankel_min_eigenvalue() >= -tol


@dataclass(frozen=True)
class DensityTable:
    """
    Sampled density with its support intervals.
    """
    x: np.ndarray
    density: np.ndarray
    support_intervals: tuple = ()

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        density = np.asarray(self.density, dtype=float)
        if x.shape != density.shape or x.ndim != 1:
            raise ParameterError('samples must be equal-length vectors')
        if not np.all(np.diff(x) > 0):
            raise NonMonotoneGrid('sample abscissae must increase strictly')
        if not np.all(np.isfinite(density)) or np.any(density < 0):
            raise ParameterError('densities must be finite and >= 0')
        x.flags.writeable = False
        density.flags.writeable = False
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'density', density)
        object.__setattr__(self, 'support_intervals', tuple(
            (float(a), float(b)) for a, b in self.support_intervals
        ))

    @classmethod
    def from_samples(cls, x, density, floor=DENSITY_FLOOR):
        """
        Build a table, zeroing values below `floor` and deriving the
        support intervals from runs of positive samples.
        """
        density = np.where(np.asarray(density) > floor, density, 0.0)
        positive = np.concatenate(([False], density > 0, [False]))
        edges = np.flatnonzero(np.diff(positive.astype(int)))
        intervals = [(x[start], x[stop - 1])
                     for start, stop in zip(edges[::2], edges[1::2])]
        return cls(x, density, tuple(intervals))

    def mass(self):
        """
        Trapezoid integral of the density.
        """
        return float(trapezoid(self.density, self.x))

    def moments(self, n):
        return np.array([trapezoid(self.density * self.x ** k, self.x)
                         for k in range(n + 1)])

    def __len__(self):
        return self.x.size


def _richardson(raw, eps, depth=RICHARDSON_DEPTH):
    # Neville table of polynomial extrapolation to eps = 0, limited depth
    levels = len(eps)
    table = [raw[0]]
    estimates = [raw[0]]
    for k in range(1, levels):
        row = [raw[k]]
        for j in range(1, min(k, depth) + 1):
            ratio = eps[k - j] / eps[k]
            row.append(row[j - 1] + (row[j - 1] - table[j - 1]) / (ratio - 1))
        table = row
        estimates.append(row[-1])
    return np.array(estimates)


def stieltjes_invert(evaluator: Callable, window: Sequence[float],
                     eps_schedule=EPS_SCHEDULE, grid_n=2001, atoms=(), x=None):
    """
    Recover a density from a Cauchy transform by Stieltjes inversion.

    The values -Im G(x + i eps)/pi along the decreasing `eps_schedule`
    are extrapolated to eps = 0 (Richardson), stopping when two successive
    extrapolants agree within 1e-9.

    Parameters
    ----------
    evaluator : callable
        Vectorised map z -> G(z) on the upper half-plane.
    window : (float, float)
        The sampling window.
    eps_schedule : sequence of float, optional
        Decreasing distances from the real line.
    grid_n : int, optional
        The number of samples (the default is 2001).
    atoms : sequence of (float, float), optional
        Known atoms whose Poisson kernels are subtracted first.
    x : array_like, optional
        A strictly increasing sample grid inside the window, replacing the
        uniform grid of `grid_n` points.

    Returns
    -------
    DensityTable
        The sampled density.

    Raises
    ------
    NonConvergent
        If the values blow up like an unreported atom.
    """
    lo, hi = window
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ParameterError(f"invalid window {window}")
    eps = np.asarray(eps_schedule, dtype=float)
    if eps.size < 2 or not np.all(np.diff(eps) < 0) or eps[-1] <= 0:
        raise ParameterError('eps schedule must decrease and stay positive')
    if x is None:
        x = np.linspace(lo, hi, grid_n)
    else:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size < 2 or not np.all(np.diff(x) > 0):
            raise NonMonotoneGrid('sample grid must be strictly increasing')
        grid_n = x.size
    raw = np.empty((eps.size, grid_n))
    for k, e in enumerate(eps):
        raw[k] = -np.imag(evaluator(x + 1j * e)) / np.pi
        for pos, mass in atoms:
            raw[k] -= mass * e / (np.pi * ((x - pos) ** 2 + e ** 2))
    if not np.all(np.isfinite(raw)):
        raise NonConvergent('Cauchy transform is not finite near the window')

    estimates = _richardson(raw, eps)
    steps = np.abs(np.diff(estimates, axis=0))
    settled = steps < RICHARDSON_TOL
    first = np.where(settled.any(axis=0), settled.argmax(axis=0) + 1, -1)
    density = estimates[first, np.arange(grid_n)]

    unsettled = first < 0
    if np.any(unsettled):
        final = estimates[-1]
        loose = steps[-1] <= LOOSE_TOL * np.maximum(1, np.abs(final))
        blowup = (eps[-1] * raw[-1] > 1e-6) & (raw[-1] > 1.5 * raw[-2])
        if np.any(unsettled & ~loose & blowup):
            where = x[unsettled & ~loose & blowup]
            raise NonConvergent(f"singular part near x = {where[:5]}")
        density = np.where(unsettled,
                           np.where(loose, final, raw[-1]), density)
        logger.debug(f"Stieltjes inversion settled loosely at "
                     f"{np.count_nonzero(unsettled)} of {grid_n} points")
    if np.any(density < -DENSITY_FLOOR):
        logger.debug(f"Clamp negative densities down to {density.min()}")
    return DensityTable.from_samples(x, np.maximum(density, 0.0))
