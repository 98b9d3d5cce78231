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
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number

import numpy as np

from ._errors import ParameterError

SPECIAL_TOL = 1e-14


def _exact(value):
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


@dataclass(frozen=True)
class BpqParams:
    """
    Parameters (p, q) of the composition of a free power and a Boolean
    power. Derived quantities are computed on access.

    Parameters
    ----------
    p : int, float or fractions.Fraction
        The free exponent, at least 1.
    q : int, float or fractions.Fraction, optional
        The Boolean exponent, positive (the default is 1).
    """
    p: Number
    q: Number = 1

    def __post_init__(self):
        if not self.p >= 1:
            raise ParameterError(f"p must be at least 1, got {self.p}")
        if not self.q > 0:
            raise ParameterError(f"q must be positive, got {self.q}")

    @classmethod
    def from_t(cls, t):
        """
        The parameters (t + 1, 1/(t + 1)) of the semigroup at time t.
        """
        if not t >= 0:
            raise ParameterError(f"t must be non-negative, got {t}")
        p = t + 1
        return cls(p, 1 / Fraction(p) if _exact(p) else 1 / p)

    @property
    def p_star(self):
        """
        Conjugate exponent p/(p - 1), infinite for p = 1.
        """
        if self.p == 1:
            return np.inf
        return self.p / (self.p - 1)

    @property
    def q_star(self):
        if self.q == 1:
            return np.inf
        return self.q / (self.q - 1)

    @property
    def q_prime(self):
        """
        1 + pq - p.
        """
        return 1 + self.p * self.q - self.p

    @property
    def p_prime(self):
        """
        pq/q', None in the special regime.
        """
        if self.is_special:
            return None
        return self.p * self.q / self.q_prime

    @property
    def is_special(self):
        """
        Whether q = 1/p*, compared exactly for rational inputs.
        """
        if _exact(self.p) and _exact(self.q):
            return self.q_prime == 0
        return abs(float(self.q_prime)) < SPECIAL_TOL

    @property
    def is_infinitely_divisible(self):
        """
        Whether q <= 1/p*, the regime with a Voiculescu transform on the
        whole upper half-plane.
        """
        return self.p > 1 and (self.is_special or self.q_prime < 0)

    def as_floats(self):
        return float(self.p), float(self.q)

    def __str__(self):
        return f"p={self.p}, q={self.q}"
