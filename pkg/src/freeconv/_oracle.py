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
Moment-cumulant recursions used to cross-check the analytic engine.

The recursions run on plain Python numbers so that exact
:py:class:`fractions.Fraction` inputs stay exact.
"""
from dataclasses import dataclass

from ._errors import ParameterError
from ._measure import MomentVector

MAX_ORDER = 12


@dataclass(frozen=True)
class CumulantVector:
    """
    Free or Boolean cumulants of orders 1 to n.
    """
    kind: str
    values: tuple

    def __post_init__(self):
        if self.kind not in ('free', 'boolean'):
            raise ParameterError(f"unknown cumulant kind {self.kind!r}")
        object.__setattr__(self, 'values', tuple(self.values))

    @property
    def order(self):
        return len(self.values)

    def __getitem__(self, k):
        """
        The cumulant of order k, starting at 1.
        """
        if not 1 <= k <= self.order:
            raise IndexError(k)
        return self.values[k - 1]

    def scaled(self, factor):
        return CumulantVector(self.kind, [factor * v for v in self.values])


def _check_order(n):
    if n > MAX_ORDER:
        raise ParameterError(f"orders above {MAX_ORDER} are not supported")


def _power_coefficients(m, kmax, degree):
    # coefficients [t^j] M(t)^k for k <= kmax, j <= degree
    series = list(m[:degree + 1])
    powers = [[1] + [0] * degree]
    for _ in range(kmax):
        last = powers[-1]
        powers.append([
            sum(last[i] * series[j - i] for i in range(j + 1))
            for j in range(degree + 1)
        ])
    return powers


def moments_to_free_cumulants(m) -> CumulantVector:
    """
    Free cumulants from raw moments, inverting
    m_n = sum_k kappa_k [t^(n-k)] M(t)^k.
    """
    m = tuple(m)
    n = len(m) - 1
    _check_order(n)
    powers = _power_coefficients(m, n, n)
    kappa = []
    for order in range(1, n + 1):
        kappa.append(m[order] - sum(
            kappa[k - 1] * powers[k][order - k] for k in range(1, order)
        ))
    return CumulantVector('free', kappa)


def free_cumulants_to_moments(kappa: CumulantVector) -> MomentVector:
    n = kappa.order
    _check_order(n)
    m = [1]
    for order in range(1, n + 1):
        powers = _power_coefficients(m + [0], order, order - 1)
        m.append(kappa[order] + sum(
            kappa[k] * powers[k][order - k] for k in range(1, order)
        ))
    return MomentVector(m)


def moments_to_boolean_cumulants(m) -> CumulantVector:
    """
    Boolean cumulants from raw moments, inverting
    m_n = sum_k b_k m_(n-k).
    """
    m = tuple(m)
    n = len(m) - 1
    _check_order(n)
    b = []
    for order in range(1, n + 1):
        b.append(m[order] - sum(b[k - 1] * m[order - k]
                                for k in range(1, order)))
    return CumulantVector('boolean', b)


def boolean_cumulants_to_moments(b: CumulantVector) -> MomentVector:
    n = b.order
    _check_order(n)
    m = [1]
    for order in range(1, n + 1):
        m.append(sum(b[k] * m[order - k] for k in range(1, order + 1)))
    return MomentVector(m)


def predict_moments_bpq(mu, p, q=1, n=6) -> MomentVector:
    """
    Moments of the composition of the free power `p` and the Boolean
    power `q` of `mu`, by scaling free then Boolean cumulants.

    Parameters
    ----------
    mu : Measure or sequence
        A measure, or its raw moments m_0 = 1, m_1, ...
    p, q : float or fractions.Fraction
        The exponents.
    n : int, optional
        The largest order (the default is 6).

    Raises
    ------
    HeavyTail
        If `mu` lacks the moments.
    """
    _check_order(n)
    m = tuple(mu.moments(n)) if hasattr(mu, 'moments') else tuple(mu)[:n + 1]
    if len(m) < n + 1:
        raise ParameterError(f"need {n + 1} moments, got {len(m)}")
    free = free_cumulants_to_moments(
        moments_to_free_cumulants(m).scaled(p)
    )
    return boolean_cumulants_to_moments(
        moments_to_boolean_cumulants(free.m).scaled(q)
    )


@dataclass(frozen=True)
class MomentReport:
    """
    Relative deviations |computed - predicted| / max(1, |predicted|).
    """
    computed: tuple
    predicted: tuple
    deviations: tuple
    rel_tol: float

    @property
    def passed(self):
        return all(d <= self.rel_tol for d in self.deviations)

    @property
    def max_deviation(self):
        return max(self.deviations)

    def as_dict(self):
        return {
            'orders': list(range(len(self.deviations))),
            'computed': [float(v) for v in self.computed],
            'predicted': [float(v) for v in self.predicted],
            'deviations': [float(v) for v in self.deviations],
            'rel_tol': self.rel_tol,
            'passed': self.passed,
        }


def compare(result, predicted, n=6, rel_tol=1e-4) -> MomentReport:
    """
    Compare the moments of a result (atoms exactly, density by the
    trapezoid rule) with predicted moments through order `n`.
    """
    computed = [float(v) for v in result.moments(n)]
    predicted = [float(predicted[k]) for k in range(n + 1)]
    deviations = [abs(c - e) / max(1.0, abs(e))
                  for c, e in zip(computed, predicted)]
    return MomentReport(tuple(computed), tuple(predicted),
                        tuple(deviations), rel_tol)
