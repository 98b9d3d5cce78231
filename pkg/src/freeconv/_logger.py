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
import logging

logger = logging.getLogger(__package__)


class OperationLoggerAdapter(logging.LoggerAdapter):
    def process(self, msg, kwargs):
        if 'operation' in self.extra:
            params = ', '.join(
                f"{k}={v}" for k, v in self.extra.get('params', {}).items()
            )
            return f"{self.extra['operation']}({params}) {msg}", kwargs
        else:
            return msg, kwargs


def operation_logger(operation, **params):
    """
    Create a logger adapter tagging messages with an operation.
    """
    return OperationLoggerAdapter(
        logger, {'operation': operation, 'params': params}
    )
