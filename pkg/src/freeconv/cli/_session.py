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
import numpy as np

from .. import (
    BpqParams, b_t, bpq, component_count, compare, compound_free_poisson,
    eval_E, eval_F, eval_G, find_atoms, free_brownian, free_power,
    free_power_sub_one, infdiv_diagnostics, monotonicity_report,
    predict_moments_bpq
)
from .._logger import logger


class Session:
    """Session class running one command of the command line."""

    def __init__(self, config, measure):
        self.COMMAND_FUNCS = {
            'transform': self._transform,
            'power': self._power,
            'bpq': self._bpq,
            'brownian': self._brownian,
            'poisson': self._poisson,
            'atoms': self._atoms,
            'support': self._support,
            'verify': self._verify,
        }
        self.config = config
        self.measure = measure
        self.logger = logger

    def process(self):
        """
        Run the configured command.

        Returns
        -------
        SpectralResult or dict
            A result to write as a density table, or a JSON report.
        """
        command = self.config.command
        self.logger.info(f"Receive {command.upper()} command")
        self.logger.debug(f"Parameter: {self.config}")
        try:
            artifact = self.COMMAND_FUNCS[command]()
        except Exception as err:
            self.logger.error(f"Error in {command.upper()}: {err}")
            raise
        else:
            self.logger.info(f"{command.upper()} done")
        return artifact

    def _transform(self):
        z = np.array(self.config.z, dtype=complex)
        g, f, e = (eval_G(self.measure, z), eval_F(self.measure, z),
                   eval_E(self.measure, z))
        return {
            'points': [{'z': zk, 'G': gk, 'F': fk, 'E': ek}
                       for zk, gk, fk, ek in zip(z, np.atleast_1d(g),
                                                 np.atleast_1d(f),
                                                 np.atleast_1d(e))]
        }

    def _spectral(self, p, q):
        config = self.config
        if p < 1:
            return free_power_sub_one(self.measure, p, config.window,
                                      config.grid_n)
        return bpq(self.measure, BpqParams(p, q), config.window,
                   config.grid_n)

    def _power(self):
        config = self.config
        if config.p < 1:
            return free_power_sub_one(self.measure, config.p, config.window,
                                      config.grid_n)
        return free_power(self.measure, config.p, config.window,
                          config.grid_n)

    def _bpq(self):
        config = self.config
        if config.t is not None:
            return b_t(self.measure, config.t, config.window, config.grid_n)
        return self._spectral(config.p, config.q)

    def _brownian(self):
        config = self.config
        return free_brownian(self.measure, config.t, config.window,
                             config.grid_n)

    def _poisson(self):
        config = self.config
        return compound_free_poisson(config.lam, self.measure, config.window,
                                     config.grid_n)

    def _atoms(self):
        config = self.config
        atoms = find_atoms(self.measure, config.p, config.q, config.window)
        return {'params': {'p': config.p, 'q': config.q},
                'atoms': [atom.as_dict() for atom in atoms]}

    def _support(self):
        config = self.config
        if config.p_list:
            return monotonicity_report(self.measure, config.p_list,
                                       config.window).as_dict()
        count, intervals = component_count(self.measure, config.p,
                                           config.window)
        return {
            'p': config.p,
            'count': count,
            'intervals': [[iv.left, iv.right, iv.below_resolution]
                          for iv in intervals],
        }

    def _verify(self):
        config = self.config
        result = self._spectral(config.p, config.q)
        predicted = predict_moments_bpq(self.measure, config.p, config.q,
                                        config.orders)
        report = compare(result, predicted, config.orders, config.rel_tol)
        document = {
            'params': {'p': config.p, 'q': config.q},
            'moments': report.as_dict(),
            'total_mass': result.total_mass(),
            'max_residual': result.diagnostics.get('max_residual'),
            'passed': report.passed,
        }
        if config.infdiv:
            document['infdiv'] = infdiv_diagnostics(
                self.measure, BpqParams(config.p, config.q),
                config.samples, config.seed
            ).as_dict()
        if report.passed:
            self.logger.info(f"Moments agree within {config.rel_tol}")
        else:
            self.logger.warning(
                f"Moment deviation {report.max_deviation} exceeds "
                f"{config.rel_tol}"
            )
        return document
