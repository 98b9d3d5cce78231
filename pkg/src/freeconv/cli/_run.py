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
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .._errors import (
    FreeConvError, NumericalError, ParameterError, SchemaError
)
from .._logger import logger
from ._io import dump_json, parse_measure, write_result
from ._session import Session

COMMANDS = ('transform', 'power', 'bpq', 'brownian', 'poisson', 'atoms',
            'support', 'verify')

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


@dataclass
class RunConfig:
    """
    Configuration of one command-line run.
    """
    command: str
    measure: str
    p: Optional[float] = None
    q: Optional[float] = None
    t: Optional[float] = None
    lam: Optional[float] = None
    p_list: Optional[list] = None
    z: Optional[list] = None
    window: Optional[tuple] = None
    grid_n: int = 2001
    orders: int = 6
    rel_tol: float = 1e-4
    samples: int = 1000
    seed: int = 0
    allow_sub_one: bool = False
    infdiv: bool = False
    format: str = 'csv'
    out: Optional[str] = None

    def validate(self):
        """
        Check parameter ranges before any computation.

        Raises
        ------
        ParameterError
            If a parameter is missing or out of range.
        """
        if self.command not in COMMANDS:
            raise ParameterError(f"unknown command {self.command!r}")
        if self.format not in ('csv', 'json'):
            raise ParameterError(f"unknown format {self.format!r}")
        if self.window is not None:
            lo, hi = self.window
            if not lo < hi:
                raise ParameterError(f"window {self.window} is empty")
            self.window = (float(lo), float(hi))
        if self.grid_n < 16:
            raise ParameterError('grid-n must be at least 16')
        if self.command in ('atoms', 'verify'):
            self.p = 1 if self.p is None else self.p
            self.q = 1 if self.q is None else self.q
        if self.command == 'power' and self.p is None:
            raise ParameterError('power needs --p')
        if self.command == 'bpq' and self.t is None:
            if self.p is None or self.q is None:
                raise ParameterError('bpq needs --p and --q, or --t')
        if self.command in ('brownian',) and self.t is None:
            raise ParameterError('brownian needs --t')
        if self.command == 'poisson' and self.lam is None:
            raise ParameterError('poisson needs --lambda')
        if self.command == 'support' and not self.p_list and self.p is None:
            raise ParameterError('support needs --p or --p-list')
        if self.command == 'transform' and not self.z:
            raise ParameterError('transform needs --z')

        if self.p is not None:
            if not (self.p >= 1 or (self.allow_sub_one and self.p > 0)):
                raise ParameterError(
                    f"p must be at least 1 (or in (0, 1) with "
                    f"--allow-sub-one), got {self.p}"
                )
            if self.p < 1 and self.q not in (None, 1):
                raise ParameterError('p below 1 needs q = 1')
        if self.q is not None and not self.q > 0:
            raise ParameterError(f"q must be positive, got {self.q}")
        if self.t is not None:
            if not self.t >= 0 or (self.command == 'brownian'
                                   and not self.t > 0):
                raise ParameterError(f"t out of range: {self.t}")
        if self.lam is not None and not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        if self.command == 'support':
            values = self.p_list or [self.p]
            if any(not p > 1 for p in values):
                raise ParameterError('support needs p > 1')
        if not 1 <= self.orders <= 12:
            raise ParameterError('orders must be between 1 and 12')
        if not self.rel_tol > 0 or not self.samples > 0:
            raise ParameterError('rel-tol and samples must be positive')


def _error_exit(err, code):
    record = {'error': type(err).__name__, 'message': str(err),
              'exit_code': code}
    if isinstance(err, SchemaError):
        record['path'] = err.path
    sys.stderr.write(json.dumps(record) + '\n')
    return code


def run(config: RunConfig):
    """
    Run a command and write its artifacts.

    Parameters
    ----------
    config : RunConfig
        The run configuration.

    Returns
    -------
    int
        Exit status: 0 on success, 2 on validation errors, 3 on numerical
        failures.
    """
    try:
        config.validate()
        measure = parse_measure(config.measure)
        artifact = Session(config, measure).process()
    except NumericalError as err:
        return _error_exit(err, EXIT_NUMERICAL)
    except FreeConvError as err:
        return _error_exit(err, EXIT_VALIDATION)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as err:
        logger.debug('Numerical library failure', exc_info=True)
        return _error_exit(NumericalError(f"{type(err).__name__}: {err}"),
                           EXIT_NUMERICAL)

    if isinstance(artifact, dict):
        dump_json(artifact, config.out)
        if artifact.get('passed') is False:
            logger.error('Verification failed')
            return EXIT_NUMERICAL
    else:
        write_result(artifact, config.out, config.format)
    if config.out is not None:
        logger.info(f"Wrote {config.out}")
    return EXIT_OK
