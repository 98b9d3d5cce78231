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
"""Exceptions raised by freeconv."""


class FreeConvError(Exception):
    """
    Base class of all exceptions raised by freeconv.
    """


class ValidationError(FreeConvError):
    """
    Exception raised when an input or a parameter is invalid.
    """


class NumericalError(FreeConvError):
    """
    Exception raised when a computation could not be certified.
    """


class NonUnitMass(ValidationError):
    """
    Exception raised when the masses of a measure do not add up to one.
    """


class DuplicateAtom(ValidationError):
    """
    Exception raised when two atoms share a position.
    """


class NonMonotoneGrid(ValidationError):
    """
    Exception raised when a tabulated grid is not strictly increasing.
    """


class SchemaError(ValidationError):
    """
    Exception raised when a measure document does not follow the schema.

    Attributes
    ----------
    path : str
        The location of the offending field, e.g. ``ac[0].variance``.
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class NonCenteredInput(ValidationError):
    """
    Exception raised when a measure must have mean zero but has not.
    """


class HeavyTail(ValidationError):
    """
    Exception raised when a requested moment does not exist.
    """


class RegimeError(ValidationError):
    """
    Exception raised when parameters are outside the regime of a formula.
    """


class ParameterError(ValidationError):
    """
    Exception raised when a parameter is out of range.
    """


class EvaluationOnSingularity(NumericalError):
    """
    Exception raised when a transform is evaluated on a real singularity.
    """


class ZeroCauchyTransform(NumericalError):
    """
    Exception raised when the Cauchy transform vanishes.
    """


class NonConvergent(NumericalError):
    """
    Exception raised when Stieltjes inversion does not settle.
    """


class ResidualTooLarge(NumericalError):
    """
    Exception raised when a boundary point is not on the real line.
    """


class NoConvergence(NumericalError):
    """
    Exception raised when a subordination solve does not converge.
    """


class WindowTooSmall(NumericalError):
    """
    Exception raised when a support component touches the window boundary.

    Attributes
    ----------
    window : tuple of float
        The window that was too small.
    """

    def __init__(self, window, message=None):
        super().__init__(
            message or f"support reaches the window boundary {window}"
        )
        self.window = window


class NotDefined(NumericalError):
    """
    Exception raised when a fractional free power does not exist or
    cannot be certified.
    """


class ScanInconclusive(NumericalError):
    """
    Exception raised when an atom scan meets a root with a diverging
    derivative.
    """


class MonotonicityViolation(NumericalError):
    """
    Exception raised when support component counts increase with p.

    Attributes
    ----------
    report : freeconv.ComponentReport
        The report whose counts violate monotonicity.
    curves : dict
        The sampled boundary curves indexed by p.
    """

    def __init__(self, message, report=None, curves=None):
        super().__init__(message)
        self.report = report
        self.curves = curves or {}


class DiagnosticFailure(NumericalError):
    """
    Exception raised when a sampled inequality fails.

    Attributes
    ----------
    inequality : str
        The name of the violated inequality.
    witness : tuple
        The sample points that violate it.
    """

    def __init__(self, inequality, witness, message=None):
        super().__init__(
            message or f"{inequality} violated at {witness}"
        )
        self.inequality = inequality
        self.witness = witness
