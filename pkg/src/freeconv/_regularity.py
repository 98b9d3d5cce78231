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
"""Atoms, support components and infinite divisibility checks."""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._config import parallel_map
from ._errors import (
    DiagnosticFailure, MonotonicityViolation, ParameterError, RegimeError,
    ScanInconclusive
)
from ._logger import logger, operation_logger
from ._measure import (
    Arcsine, Cauchy, MarchenkoPastur, Measure, MeasureBase, Semicircle,
    boundary_reciprocal, reciprocal
)
from ._params import BpqParams
from ._subordination import (
    PowerH, boundary_heights, boundary_intervals, mass_ratio,
    solve_subordination
)

LIMIT_STEPS = 40
DIVERGENCE = 1e12
GROWTH_TOL = 1e-6
SCAN_POINTS = 4096
ROOT_TOL = 1e-8
STRICT_MARGIN = 1e-8
MERGE_TOL = 1e-12
DIAGNOSTIC_SLACK = 1e-9
EDGE_HEIGHT = 1e-14
EDGE_BLOWUP = 1e5


def f_mu_limit(mu: MeasureBase, x):
    """
    Limit of :py:func:`mass_ratio` as y decreases to zero.

    Sampled at y = 2^-k for k up to 40. The limit is infinite when a
    sample exceeds 1e12 or the samples are still growing.

    Returns
    -------
    float or numpy.ndarray
        The limit, possibly ``numpy.inf``.
    """
    x = np.asarray(x, dtype=float)
    values = np.array([mass_ratio(mu, x, 2.0 ** -k)
                       for k in range(LIMIT_STEPS + 1)])
    last, before = values[-1], values[-2]
    diverged = ((np.max(values, axis=0) > DIVERGENCE)
                | (last - before > GROWTH_TOL * (1 + last)))
    return np.where(diverged, np.inf, last)[()]


@dataclass(frozen=True)
class AtomCertificate:
    """
    Evidence for an atom: the boundary value of F at the preimage, the
    limit f_mu there, the Julia-Caratheodory derivative of the output F
    and the criterion that was applied.
    """
    boundary_F: float
    f_mu: float
    jc_derivative: float
    regime: str


@dataclass(frozen=True)
class AtomRecord:
    """
    A certified atom of an output measure.
    """
    position: float
    mass: float
    certificate: AtomCertificate = None

    def as_dict(self):
        record = {'pos': self.position, 'mass': self.mass}
        if self.certificate is not None:
            record.update(
                boundary_F=self.certificate.boundary_F,
                f_mu=self.certificate.f_mu,
                jc_derivative=self.certificate.jc_derivative,
                regime=self.certificate.regime,
            )
        return record


def gap_intervals(mu: MeasureBase, window):
    """
    Parts of the window outside the continuous support of `mu`.
    """
    lo, hi = window
    gaps = []
    left = lo
    for a, b in mu.ac_intervals():
        if a > left:
            gaps.append((left, min(a, hi)))
        left = max(left, b)
        if left >= hi:
            break
    if left < hi:
        gaps.append((left, hi))
    return [(a, b) for a, b in gaps if b > a]


def atom_window(mu: MeasureBase, p=1, q=1):
    lo, hi = mu.support_bounds()
    margin = 2 * (1 + np.sqrt(max(p - 1, 0))) * (1 + hi - lo) * max(1, q)
    return (lo - margin, hi + margin)


def _boundary_roots(mu, slope, gap):
    # roots of the real function F(x) - slope x inside one gap
    def func(x):
        return float(np.real(boundary_reciprocal(mu, x))) - slope * x

    a, b = gap
    x = np.linspace(a, b, SCAN_POINTS + 2)[1:-1]
    values = np.real(boundary_reciprocal(mu, x)) - slope * x
    roots = list(x[values == 0])
    finite = np.isfinite(values)
    cells = np.flatnonzero(finite[:-1] & finite[1:]
                           & (values[:-1] * values[1:] < 0))
    for i in cells:
        root = brentq(func, x[i], x[i + 1], xtol=1e-15, maxiter=200)
        if abs(func(root)) < ROOT_TOL * (1 + abs(root)):
            roots.append(root)
    return roots


def _scan(mu, slope, window):
    roots = sorted(r for found in parallel_map(
        lambda gap: _boundary_roots(mu, slope, gap), gap_intervals(mu, window)
    ) for r in found)
    unique = []
    for root in roots:
        if not unique or root - unique[-1] > MERGE_TOL * (1 + abs(root)):
            unique.append(root)
    return unique


def _sub_one_atoms(mu, p, window):
    # zeros of F, including the inverse-power edges of the support; an end
    # where G stays bounded (a density vanishing there) is no zero
    candidates = _scan(mu, 0.0, window)
    for a, b in mu.ac_intervals():
        for end in (a, b):
            if not np.isfinite(end):
                continue
            with np.errstate(all='ignore'):
                g = complex(mu.cauchy(np.array([end + 1j * EDGE_HEIGHT]))[0])
            if not np.isfinite(g) or abs(g) > EDGE_BLOWUP:
                candidates.append(end)
    atoms = []
    for x in sorted(set(candidates)):
        f = float(f_mu_limit(mu, x))
        if np.isfinite(f):
            mass = (1 + (1 - p) * f) / (1 + f)
        else:
            mass = 1 - p
        atoms.append(AtomRecord(
            p * x, mass,
            AtomCertificate(0.0, f, 1 / mass, 'free-power-sub-one')
        ))
    return atoms


def find_atoms(mu: MeasureBase, p=1, q=1, window=None):
    """
    Atoms of the free power, Boolean power, or their composition.

    Preimages are the roots on the gaps of the support of `mu` of
    F(x) = s x, where the slope s depends on (p, q), and are kept when
    the limit f_mu passes the strict criterion of the regime.

    Parameters
    ----------
    mu : Measure
        The input measure.
    p : float or fractions.Fraction, optional
        The free exponent (the default is 1). Exponents in (0, 1) are
        accepted with q = 1.
    q : float or fractions.Fraction, optional
        The Boolean exponent (the default is 1).
    window : (float, float), optional
        The scan window for preimages.

    Returns
    -------
    list of AtomRecord
        The certified atoms, sorted by position.

    Raises
    ------
    ScanInconclusive
        If a root has a divergent f_mu limit.
    """
    log = operation_logger('find_atoms', p=p, q=q)
    if window is None:
        window = atom_window(mu, float(p), float(q))
    if 0 < p < 1:
        if q != 1:
            raise ParameterError('exponents below one need q = 1')
        atoms = _sub_one_atoms(mu, float(p), window)
        log.debug(f"Found {len(atoms)} atoms")
        return sorted(atoms, key=lambda a: a.position)
    params = BpqParams(p, q)
    p, q = params.as_floats()

    if params.is_special:
        atoms = []
        value = complex(boundary_reciprocal(mu, 0.0))
        f = float(f_mu_limit(mu, 0.0))
        if (np.isfinite(value)
                and abs(value.imag) < 1e-12 * (1 + abs(value.real))
                and f < (1 - STRICT_MARGIN) / (p - 1)):
            mass = 1 - (p - 1) * f
            atoms.append(AtomRecord(
                (1 - p) * value.real + 0.0, mass,
                AtomCertificate(value.real, f, 1 / mass, 'bpq-special')
            ))
        log.debug(f"Found {len(atoms)} atoms")
        return atoms

    if p == 1:
        scale, slope = 1.0, 1 - 1 / q
        regime = 'boolean'
    else:
        scale = float(params.p_prime)
        slope = scale * (1 - 1 / q)
        regime = 'free-power' if q == 1 else 'bpq-general'

    atoms = []
    for x in _scan(mu, slope, window):
        f = float(f_mu_limit(mu, x))
        if not np.isfinite(f):
            raise ScanInconclusive(
                f"root at {x} of the atom equation has a divergent limit"
            )
        if p == 1:
            jc = 1 + q * f
        else:
            if not f < (1 - STRICT_MARGIN) / (p - 1):
                log.debug(f"Reject candidate {scale * x}: f_mu = {f}")
                continue
            jc = (p * q / (1 - (p - 1) * f) - params.q_prime) / (p - 1)
            jc = float(jc)
        if not jc >= 1:
            continue
        atoms.append(AtomRecord(
            scale * x, 1 / jc,
            AtomCertificate(float(slope * x), f, jc, regime)
        ))
    log.debug(f"Found {len(atoms)} atoms")
    return sorted(atoms, key=lambda a: a.position)


def component_count(mu: MeasureBase, p, window=None):
    """
    Number of support components of the continuous part of the free
    power, shared by every Boolean power of it.

    Returns
    -------
    tuple of (int, list of VPlusInterval)
        The count and the intervals.
    """
    if not p > 1:
        raise ParameterError(f"component_count needs p > 1, got {p}")
    hfunc = PowerH(mu, p)
    intervals = boundary_intervals(hfunc, window or hfunc.default_window())
    return len(intervals), intervals


@dataclass(frozen=True)
class ComponentReport:
    """
    Component counts of free powers along increasing exponents.
    """
    p_values: tuple
    counts: tuple
    intervals: tuple = field(repr=False, default=())

    def is_monotone(self):
        return all(a >= b for a, b in zip(self.counts, self.counts[1:]))

    def as_dict(self):
        return {
            'p_values': [float(p) for p in self.p_values],
            'counts': list(self.counts),
            'intervals': [[[iv.left, iv.right, iv.below_resolution]
                           for iv in ivs] for ivs in self.intervals],
        }


def monotonicity_report(mu: MeasureBase, p_list, window=None):
    """
    Count components for each exponent and check that counts do not
    increase.

    Raises
    ------
    MonotonicityViolation
        If a count increases, with the sampled curves attached.
    """
    p_values = tuple(p_list)
    if any(p <= 1 for p in p_values):
        raise ParameterError('exponents must exceed one')
    if any(a >= b for a, b in zip(p_values, p_values[1:])):
        raise ParameterError('exponents must be strictly increasing')
    results = parallel_map(lambda p: component_count(mu, p, window), p_values)
    report = ComponentReport(p_values, tuple(n for n, _ in results),
                             tuple(tuple(ivs) for _, ivs in results))
    logger.info(f"Component counts {report.counts} for p = {p_values}")
    if not report.is_monotone():
        curves = {}
        for p in p_values:
            hfunc = PowerH(mu, p)
            x = np.linspace(*(window or hfunc.default_window()), 1001)
            curves[p] = (x, boundary_heights(hfunc, x))
        raise MonotonicityViolation(
            f"component counts {report.counts} increase along {p_values}",
            report=report, curves=curves
        )
    return report


def divisibility_bracket(mu: MeasureBase):
    """
    Bounds (lo, hi) on the divisibility indicator, known for closed-form
    families and propagated through the operations. (0, inf) otherwise.
    """
    known = getattr(mu, 'divisibility', None)
    if known is not None:
        return known
    if not isinstance(mu, Measure):
        return (0.0, np.inf)
    if mu.is_point_mass:
        return (np.inf, np.inf)
    if not mu.components:
        return (0.0, 0.0)
    if len(mu.components) == 1 and not mu.point_part:
        shape = mu.components[0][1]
        if isinstance(shape, Cauchy):
            return (np.inf, np.inf)
        if isinstance(shape, (Semicircle, MarchenkoPastur)):
            return (1.0, 1.0)
        if isinstance(shape, Arcsine):
            return (0.5, 0.5)
    return (0.0, np.inf)


@dataclass(frozen=True)
class InfDivReport:
    """
    Worst observed ratios of the sampled inequalities; every ratio is at
    most one when the diagnostics pass.
    """
    sample_n: int
    max_imag_phi: float
    phi_lipschitz: float
    reciprocal_lower: float
    boolean_lipschitz: float

    def as_dict(self):
        return dict(self.__dict__, passed=True)


def _sample_upper(rng, mu, n):
    lo, hi = mu.support_bounds()
    center, half = (lo + hi) / 2, (hi - lo) / 2 + 1
    x = rng.uniform(center - 2 * half, center + 2 * half, n)
    y = half * 10 ** rng.uniform(-2, 1, n)
    return x + 1j * y


def _check(name, lhs, rhs, z1, z2):
    excess = lhs - rhs * (1 + DIAGNOSTIC_SLACK) - 1e-12
    worst = int(np.argmax(excess))
    if excess[worst] > 0:
        raise DiagnosticFailure(name, (complex(z1[worst]), complex(z2[worst])))
    with np.errstate(divide='ignore', invalid='ignore'):
        return float(np.nanmax(np.where(rhs > 0, lhs / rhs, 0.0)))


def infdiv_diagnostics(mu: MeasureBase, params: BpqParams, sample_n=1000,
                       seed=0):
    """
    Sample the inequalities satisfied by an infinitely divisible
    composition on random pairs of the upper half-plane.

    Checks Im phi <= 1e-10, that phi is 1-Lipschitz on the image of F,
    that |z1 - z2|/2 <= |F(z1) - F(z2)|, and that F of the Boolean power
    is (1 + q/(p - 1))-Lipschitz on the image of the subordination
    function.

    Raises
    ------
    RegimeError
        If q > 1/p*.
    DiagnosticFailure
        With the violated inequality and a witness pair.
    """
    from ._convolution import bpq_reciprocal, phi_bpq

    log = operation_logger('infdiv_diagnostics', params=params,
                           sample_n=sample_n)
    if not params.is_infinitely_divisible:
        raise RegimeError(f"{params} is outside q <= 1/p*")
    p, q = params.as_floats()
    rng = np.random.default_rng(seed)
    z1 = _sample_upper(rng, mu, sample_n)
    z2 = _sample_upper(rng, mu, sample_n)

    phi1, phi2 = phi_bpq(mu, params, z1), phi_bpq(mu, params, z2)
    max_imag = float(np.max(np.imag(np.concatenate((phi1, phi2)))))
    if max_imag > 1e-10:
        worst = int(np.argmax(np.maximum(phi1.imag, phi2.imag)))
        raise DiagnosticFailure('Im phi <= 0', (complex(z1[worst]),
                                                complex(z2[worst])))

    f1, f2 = bpq_reciprocal(mu, params, z1), bpq_reciprocal(mu, params, z2)
    phi_lip = _check('|phi(w1) - phi(w2)| <= |w1 - w2| on F(C+)',
                     np.abs((z1 - f1) - (z2 - f2)), np.abs(f1 - f2), z1, z2)
    lower = _check('|z1 - z2|/2 <= |F(z1) - F(z2)|',
                   np.abs(z1 - z2) / 2, np.abs(f1 - f2), z1, z2)

    hfunc = PowerH(mu, p)
    w1, _ = solve_subordination(hfunc, z1)
    w2, _ = solve_subordination(hfunc, z2)

    def boolean_reciprocal(w):
        return q * reciprocal(mu, w) + (1 - q) * w

    boolean_lip = _check(
        'F of the Boolean power is (1 + q/(p - 1))-Lipschitz',
        np.abs(boolean_reciprocal(w1) - boolean_reciprocal(w2)),
        (1 + q / (p - 1)) * np.abs(w1 - w2), z1, z2
    )
    report = InfDivReport(sample_n, max_imag, phi_lip, lower, boolean_lip)
    log.info(f"Passed: {report}")
    return report
