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
Subordination machinery for free powers and semicircular addition.

An :py:class:`HFunction` is an analytic map H of the upper half-plane
whose right inverse is the subordination function. Its boundary curve
y = f(x) is where Im H vanishes, and the real map psi(x) = H(x + i f(x))
carries the curve onto the real line of the output measure.
"""
from dataclasses import dataclass

import numpy as np

from ._errors import (
    NoConvergence, ParameterError, ResidualTooLarge, WindowTooSmall
)
from ._logger import logger
from ._measure import MeasureBase, reciprocal

Y_MIN = 1e-9
HEIGHT_TOL = 1e-12
MAX_DOUBLINGS = 80
PSI_TOL = 1e-8
STEP_TOL = 1e-13
MAX_ITERATIONS = 10_000
STALL_AFTER = 200
STALL_RATIO = 0.99
NEWTON_STEPS = 100
OMEGA_TOL = 1e-10
ENDPOINT_BISECTIONS = 48
ENDPOINT_TOL = 1e-8
BELOW_RESOLUTION = 1e-6


def mass_ratio(mu: MeasureBase, x, y):
    """
    The ratio Im F(x + iy)/y - 1 for y > 0.

    It is strictly decreasing in y for measures other than point masses
    and vanishes identically for point masses.

    Parameters
    ----------
    mu : Measure
        The measure.
    x : float or array_like
        Real parts.
    y : float or array_like
        Positive imaginary parts.

    Returns
    -------
    float or numpy.ndarray
        The non-negative ratio.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ParameterError('mass_ratio needs y > 0')
    f = reciprocal(mu, np.asarray(x) + 1j * y)
    return np.maximum(f.imag / y - 1, 0.0)[()]


class HFunction:
    """
    Base class of the maps inverted by subordination.
    """
    #: Level of :py:meth:`excess` on the boundary curve
    threshold = np.inf
    #: Solve H(w) = z by Newton steps only
    newton_only = False
    #: Newton steps may leave the upper half-plane
    lower_half = False

    def h(self, w):
        raise NotImplementedError()

    def excess(self, x, y):
        """
        A quantity decreasing in y with
        Im H(x + iy) = y (1 - excess / threshold).
        """
        raise NotImplementedError()

    def fixed_point(self, z, w):
        """
        A self-map of the upper half-plane whose fixed point solves H(w) = z.
        """
        raise NotImplementedError()

    def spread(self):
        """
        Scale of the support growth used for default windows.
        """
        raise NotImplementedError()

    def derivative(self, w):
        w = np.asarray(w, dtype=complex)
        step = 1e-6 * (1 + np.abs(w))
        return (self.h(w + step) - self.h(w - step)) / (2 * step)

    def default_window(self):
        """
        Support bounds of the base measure inflated by
        2 (1 + sqrt(spread)) (1 + diam).
        """
        lo, hi = self.mu.support_bounds()
        center, half = (lo + hi) / 2, (hi - lo) / 2
        margin = 2 * (1 + np.sqrt(self.spread())) * (1 + hi - lo)
        return (center - half - margin, center + half + margin)


class PowerH(HFunction):
    """
    H(z) = p z + (1 - p) F(z), the map behind free powers.
    """

    def __init__(self, mu: MeasureBase, p):
        if not p > 0 or p == 1:
            raise ParameterError(f"PowerH needs p > 0 and p != 1, got {p}")
        self.mu = mu
        self.p = float(p)
        self.threshold = 1 / (self.p - 1) if self.p > 1 else -np.inf
        self.newton_only = self.p < 1

    def h(self, w):
        return self.p * w + (1 - self.p) * reciprocal(self.mu, w)

    def excess(self, x, y):
        return mass_ratio(self.mu, x, y)

    def fixed_point(self, z, w):
        return z / self.p + (1 - 1 / self.p) * reciprocal(self.mu, w)

    def spread(self):
        return max(self.p - 1, 0.0)


class ContinuedPowerH(PowerH):
    """
    H(z) = p z + (1 - p) F(z) for 0 < p < 1, with F continued into the
    lower half-plane.

    Near the support of the output the solution w of H(w) = z sits below
    the real line, on the second sheet of F. `crossing` holds, per point,
    the real coordinate where the solution path last crossed the axis;
    it selects which components are continued.
    """
    lower_half = True

    def __init__(self, mu: MeasureBase, p):
        if not 0 < p < 1:
            raise ParameterError(f"ContinuedPowerH needs 0 < p < 1, got {p}")
        super().__init__(mu, p)
        self.crossing = 0.0

    def h(self, w):
        w = np.asarray(w, dtype=complex)
        with np.errstate(all='ignore'):
            g = self.mu.continued_cauchy(w, self.crossing)
            return self.p * w + (1 - self.p) / g


class BrownianH(HFunction):
    """
    H(z) = z + t G(z), the map behind semicircular addition.
    """

    def __init__(self, nu: MeasureBase, t):
        if not t > 0:
            raise ParameterError(f"BrownianH needs t > 0, got {t}")
        self.mu = nu
        self.t = float(t)
        self.threshold = 1 / self.t

    def h(self, w):
        with np.errstate(all='ignore'):
            return w + self.t * self.mu.cauchy(w)

    def excess(self, x, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(all='ignore'):
            g = self.mu.cauchy(np.asarray(x) + 1j * y)
        return np.maximum(-g.imag / y, 0.0)

    def fixed_point(self, z, w):
        with np.errstate(all='ignore'):
            return z - self.t * self.mu.cauchy(w)

    def spread(self):
        return self.t


def boundary_heights(hfunc: HFunction, x):
    """
    Heights f(x) of the boundary curve: zero where the excess at
    y = 1e-9 stays below the threshold, otherwise the root in y of
    excess = threshold, to an absolute tolerance of 1e-12.
    """
    x = np.asarray(x, dtype=float)
    heights = np.zeros(x.shape)
    threshold = hfunc.threshold
    if not np.isfinite(threshold) or threshold < 0:
        return heights
    positive = hfunc.excess(x, Y_MIN) > threshold
    xs = x[positive]
    if xs.size == 0:
        return heights

    lo = np.full(xs.shape, Y_MIN)
    hi = np.ones(xs.shape)
    above = hfunc.excess(xs, hi) > threshold
    for _ in range(MAX_DOUBLINGS):
        if not above.any():
            break
        lo = np.where(above, hi, lo)
        hi = np.where(above, 2 * hi, hi)
        above = above & (hfunc.excess(xs, hi) > threshold)
    else:
        raise NoConvergence('boundary curve is unbounded')

    for _ in range(200):
        if np.max(hi - lo) <= HEIGHT_TOL:
            break
        mid = (lo + hi) / 2
        up = hfunc.excess(xs, mid) > threshold
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    heights[positive] = (lo + hi) / 2
    return heights


def boundary_psi(hfunc: HFunction, x, heights):
    """
    The real map psi(x) = Re H(x + i f(x)).

    Raises
    ------
    ResidualTooLarge
        If Im H on the curve is not below 1e-8.
    """
    w = np.asarray(x, dtype=float) + 1j * np.maximum(heights, HEIGHT_TOL)
    with np.errstate(all='ignore'):
        value = hfunc.h(w)
    residual = np.abs(value.imag)
    if not np.all(residual < PSI_TOL):
        worst = np.nanargmax(np.where(np.isfinite(residual), residual, np.inf))
        raise ResidualTooLarge(
            f"Im H = {residual.flat[worst]} on the boundary curve at "
            f"x = {np.ravel(x)[worst]}"
        )
    return value.real


def f_p(mu: MeasureBase, p, x):
    """
    Height of the boundary curve of the free power of `mu` with exponent
    `p` > 1 above `x`.
    """
    if not p > 1:
        raise ParameterError(f"f_p needs p > 1, got {p}")
    return boundary_heights(PowerH(mu, p), x)[()]


def psi_p(mu: MeasureBase, p, x):
    """
    The homeomorphism psi_p(x) = Re H_p(x + i f_p(x)) onto the real line.
    """
    if not p > 1:
        raise ParameterError(f"psi_p needs p > 1, got {p}")
    hfunc = PowerH(mu, p)
    return boundary_psi(hfunc, x, boundary_heights(hfunc, x))[()]


def _newton(hfunc, z, w):
    for _ in range(NEWTON_STEPS):
        residual = hfunc.h(w) - z
        size = np.abs(residual)
        if np.all(size < 1e-14 * (1 + np.abs(z))):
            break
        with np.errstate(all='ignore'):
            step = residual / hfunc.derivative(w)
        step = np.where(np.isfinite(step), step, 0)
        trial = w - step
        allowed = hfunc.lower_half
        bad = ~(((trial.imag >= 0) | allowed)
                & (np.abs(hfunc.h(trial) - z) < size))
        for _ in range(40):
            if not bad.any():
                break
            step = np.where(bad, step / 2, step)
            trial = w - step
            bad = bad & ~(((trial.imag >= 0) | allowed)
                          & (np.abs(hfunc.h(trial) - z) < size))
        if bad.all():
            break
        w = np.where(bad, w, trial)
    return w


def solve_subordination(hfunc: HFunction, z, strict=True, start=None):
    """
    Solve H(w) = z on the closed upper half-plane.

    Iterates the fixed-point map from z + i until steps drop below 1e-13,
    10^4 iterations pass, or the contraction stalls, then polishes with
    damped Newton steps.

    Parameters
    ----------
    hfunc : HFunction
        The map to invert.
    z : complex or array_like
        Points with Im z >= 0.
    strict : bool, optional
        Raise on large residuals (the default is True).
    start : array_like, optional
        Initial points, shaped like `z`, replacing z + i. Used to continue
        solutions downward in height.

    Returns
    -------
    tuple of (numpy.ndarray, float)
        The solutions and the largest residual |H(w) - z|.

    Raises
    ------
    NoConvergence
        If a residual stays at or above 1e-10.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    if np.any(z.imag < 0):
        raise ParameterError('subordination is solved on im(z) >= 0')
    if start is None:
        start = z + 1j
    else:
        start = np.asarray(start, dtype=complex).ravel().copy()
        if start.shape != z.shape:
            raise ParameterError('start must match the shape of z')
    with np.errstate(all='ignore'):
        if hfunc.newton_only:
            w = _newton(hfunc, z, start)
        else:
            w = start
            active = np.arange(z.size)
            previous = np.full(z.size, np.inf)
            for iteration in range(MAX_ITERATIONS):
                if active.size == 0:
                    break
                update = hfunc.fixed_point(z[active], w[active])
                size = np.abs(update - w[active])
                w[active] = update
                settled = size < STEP_TOL
                if iteration >= STALL_AFTER:
                    settled |= size > STALL_RATIO * previous[active]
                previous[active] = size
                active = active[~settled]
            logger.debug(f"Fixed point left {active.size} of {z.size} "
                         f"points to Newton after {iteration + 1} steps")
            w = _newton(hfunc, z, w)
        residual = np.abs(hfunc.h(w) - z)
    worst = float(np.max(residual, initial=0.0))
    if strict and not np.all(residual < OMEGA_TOL):
        raise NoConvergence(f"subordination residual {worst} exceeds "
                            f"{OMEGA_TOL} at z = {z[np.argmax(residual)]}")
    return w.reshape(shape), worst


def omega_p(mu: MeasureBase, p, z):
    """
    The subordination function of the free power with exponent `p`:
    the w in the closure of the subordination domain with H_p(w) = z.
    """
    if not p > 1:
        raise ParameterError(f"omega_p needs p > 1, got {p}")
    w, _ = solve_subordination(PowerH(mu, p), z)
    return w[()]


@dataclass(frozen=True)
class VPlusInterval:
    """
    A maximal interval where the boundary curve is positive.
    """
    left: float
    right: float
    left_refined: bool = True
    right_refined: bool = True

    @property
    def width(self):
        return self.right - self.left

    @property
    def below_resolution(self):
        return self.width < BELOW_RESOLUTION


def _refine_edges(hfunc, inside, outside):
    # bisection on the positivity of the excess at y = 1e-9
    inside = np.array(inside, dtype=float)
    outside = np.array(outside, dtype=float)
    for _ in range(ENDPOINT_BISECTIONS):
        mid = (inside + outside) / 2
        up = hfunc.excess(mid, Y_MIN) > hfunc.threshold
        inside = np.where(up, mid, inside)
        outside = np.where(up, outside, mid)
    return outside


def boundary_intervals(hfunc: HFunction, window, coarse_n=2001):
    """
    Maximal intervals of the window where the boundary curve is positive.

    Parameters
    ----------
    hfunc : HFunction
        The map.
    window : (float, float)
        The scan window.
    coarse_n : int, optional
        The number of coarse samples (the default is 2001).

    Returns
    -------
    list of VPlusInterval
        The intervals, sorted.

    Raises
    ------
    WindowTooSmall
        If the curve is positive at a window boundary.
    """
    lo, hi = (float(v) for v in window)
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ParameterError(f"invalid window {window}")
    if not np.isfinite(hfunc.threshold) or hfunc.threshold < 0:
        return []
    x = np.linspace(lo, hi, coarse_n)
    positive = hfunc.excess(x, Y_MIN) > hfunc.threshold
    if positive[0] or positive[-1]:
        raise WindowTooSmall((lo, hi))

    # one midpoint sample per zero cell for narrow components
    cells = np.flatnonzero(~positive[:-1] & ~positive[1:])
    mids = (x[cells] + x[cells + 1]) / 2
    x = np.concatenate((x, mids))
    positive = np.concatenate(
        (positive, hfunc.excess(mids, Y_MIN) > hfunc.threshold)
    )
    order = np.argsort(x)
    x, positive = x[order], positive[order]

    flags = np.concatenate(([False], positive, [False])).astype(int)
    edges = np.flatnonzero(np.diff(flags))
    starts, stops = edges[::2], edges[1::2] - 1
    if starts.size == 0:
        return []
    lefts = _refine_edges(hfunc, x[starts], x[starts - 1])
    rights = _refine_edges(hfunc, x[stops], x[stops + 1])
    left_heights = boundary_heights(hfunc, lefts)
    right_heights = boundary_heights(hfunc, rights)
    intervals = [
        VPlusInterval(float(a), float(b), bool(fa < ENDPOINT_TOL),
                      bool(fb < ENDPOINT_TOL))
        for a, b, fa, fb in zip(lefts, rights, left_heights, right_heights)
    ]
    logger.debug(f"Found {len(intervals)} boundary intervals in {window}")
    return intervals


def v_plus(mu: MeasureBase, p, window=None, coarse_n=2001):
    """
    The open set where f_p > 0, as sorted intervals.
    """
    if not p > 1:
        raise ParameterError(f"v_plus needs p > 1, got {p}")
    hfunc = PowerH(mu, p)
    if window is None:
        window = hfunc.default_window()
    return boundary_intervals(hfunc, window, coarse_n)


def curve_grid(intervals, window, grid_n=2001):
    """
    Sample points for a boundary curve: geometric clusters at the interval
    ends, a uniform interior, and a uniform exterior.
    """
    lo, hi = window
    if not intervals:
        return np.linspace(lo, hi, grid_n)
    n_exterior = max(grid_n // 10, 2 * (len(intervals) + 1))
    share = (grid_n - n_exterior) // len(intervals)
    n_edge = max(min(share * 3 // 10, 540), 4)
    n_inner = max(share - 2 * n_edge - 2, 4)

    points = []
    for iv in intervals:
        a, b = iv.left, iv.right
        width = b - a
        if iv.below_resolution:
            points.append(np.linspace(a, b, share))
            continue
        floor = max(1e-13 * width, 64 * np.spacing(max(abs(a), abs(b))))
        offsets = np.geomspace(floor, 0.05 * width, n_edge)
        points.extend((
            [a], a + offsets,
            np.linspace(a + 0.05 * width, b - 0.05 * width, n_inner + 2)[1:-1],
            b - offsets[::-1], [b],
        ))

    gaps = [(lo, intervals[0].left)]
    gaps += [(u.right, v.left) for u, v in zip(intervals, intervals[1:])]
    gaps.append((intervals[-1].right, hi))
    total = sum(b - a for a, b in gaps)
    used = sum(len(np.atleast_1d(chunk)) for chunk in points)
    remaining = max(grid_n - used, 2 * len(gaps))
    counts = [max(int(round(remaining * (b - a) / total)), 1) for a, b in gaps]
    counts[-1] = max(remaining - sum(counts[:-1]), 1)
    for k, ((a, b), n) in enumerate(zip(gaps, counts)):
        inner = np.linspace(a, b, n + 2)
        if k == 0:
            points.append(inner[:-1][:n])
        elif k == len(gaps) - 1:
            points.append(inner[1:][-n:])
        else:
            points.append(inner[1:-1])
    return np.unique(np.concatenate([np.atleast_1d(c) for c in points]))


@dataclass(frozen=True)
class SubordinationSolution:
    """
    Sampled boundary curve of a subordination problem.

    Attributes
    ----------
    hfunc : HFunction
        The map.
    grid : numpy.ndarray
        Sorted sample points.
    fp_values : numpy.ndarray
        Heights of the boundary curve at `grid`.
    psi_values : numpy.ndarray
        Strictly increasing images psi(grid).
    vplus_intervals : tuple of VPlusInterval
        Where the heights are positive.
    """
    hfunc: HFunction
    grid: np.ndarray
    fp_values: np.ndarray
    psi_values: np.ndarray
    vplus_intervals: tuple

    @property
    def mu(self):
        return self.hfunc.mu

    @property
    def p(self):
        return getattr(self.hfunc, 'p', None)

    def psi_support(self):
        """
        Images under psi of the positive intervals.
        """
        if not self.vplus_intervals:
            return ()
        ends = np.array([(iv.left, iv.right) for iv in self.vplus_intervals])
        psi = boundary_psi(self.hfunc, ends.ravel(), np.zeros(ends.size))
        return tuple(zip(psi[::2], psi[1::2]))


def solve_boundary(hfunc: HFunction, window=None, grid_n=2001,
                   coarse_n=2001):
    """
    Sample the boundary curve of `hfunc` and its psi image.

    Returns
    -------
    SubordinationSolution
        The sampled solution, with strictly increasing psi values.
    """
    if window is None:
        window = hfunc.default_window()
    intervals = boundary_intervals(hfunc, window, coarse_n)
    x = curve_grid(intervals, window, grid_n)
    heights = boundary_heights(hfunc, x)
    for iv in intervals:
        heights[(x == iv.left) | (x == iv.right)] = 0.0
    psi = boundary_psi(hfunc, x, heights)
    return SubordinationSolution(hfunc, x, heights, _monotone_psi(x, psi),
                                 tuple(intervals))


def _monotone_psi(x, psi):
    """
    Check that psi increases along the grid. Ties within PSI_TOL are
    rounding and get merged into the neighbouring sample; a larger
    reversal is a solver failure.

    Raises
    ------
    ResidualTooLarge
        If psi decreases by more than PSI_TOL anywhere.
    """
    running = np.maximum.accumulate(psi)
    drop = running - psi
    scale = PSI_TOL * np.maximum(1.0, np.abs(psi))
    worst = int(np.argmax(drop - scale))
    if drop[worst] > scale[worst]:
        raise ResidualTooLarge(
            f"psi decreases by {drop[worst]:.3g} at x = {x[worst]:.12g}"
        )
    ties = np.count_nonzero(np.diff(psi) <= 0)
    if ties:
        logger.warning(f"{ties} boundary samples have non-increasing psi "
                       f"within rounding; spreading them")
        psi = running.copy()
        for k in range(1, psi.size):
            if psi[k] <= psi[k - 1]:
                psi[k] = np.nextafter(psi[k - 1], np.inf)
    return psi
