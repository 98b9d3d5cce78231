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
import argparse
import logging
import sys

from ._io import parse_number
from ._run import COMMANDS, RunConfig, run

parser = argparse.ArgumentParser(
    prog='python -m freeconv.cli',
    description='Free and Boolean powers of probability measures.'
)
parser.add_argument('command', choices=COMMANDS,
                    help='operation to run')
parser.add_argument('-m', '--measure', type=str, required=True,
                    help='measure file in JSON')
parser.add_argument('--p', type=parse_number,
                    help='free exponent, ratios like 3/2 allowed')
parser.add_argument('--q', type=parse_number,
                    help='Boolean exponent')
parser.add_argument('--t', type=parse_number,
                    help='time of the semigroup or of the Brownian motion')
parser.add_argument('--lambda', dest='lam', type=parse_number,
                    help='rate of the compound free Poisson law')
parser.add_argument('--p-list', dest='p_list', type=parse_number, nargs='+',
                    help='increasing exponents for a monotonicity report')
parser.add_argument('--z', type=complex, nargs='+',
                    help='evaluation points such as 1+1j')
parser.add_argument('--window', type=float, nargs=2, metavar=('LO', 'HI'),
                    help='scan window')
parser.add_argument('--grid-n', dest='grid_n', type=int,
                    help='number of density samples')
parser.add_argument('--orders', type=int,
                    help='highest moment order to verify')
parser.add_argument('--rel-tol', dest='rel_tol', type=float,
                    help='tolerance of the moment check')
parser.add_argument('--samples', type=int,
                    help='random pairs for the divisibility diagnostics')
parser.add_argument('--seed', type=int,
                    help='seed of the diagnostic sampler')
parser.add_argument('--allow-sub-one', dest='allow_sub_one',
                    action='store_true', default=None,
                    help='accept free exponents in (0, 1)')
parser.add_argument('--infdiv', action='store_true', default=None,
                    help='add divisibility diagnostics to verify')
parser.add_argument('--format', choices=('csv', 'json'),
                    help='output format')
parser.add_argument('-o', '--out', type=str,
                    help='output path, stdout when omitted')
parser.add_argument('-v', '--verbose', action='store_true',
                    help='log debug messages')

args = vars(parser.parse_args())
verbose = args.pop('verbose')

logging.basicConfig(
    format='%(asctime)s %(levelname)s %(message)s',
    level=logging.DEBUG if verbose else logging.INFO
)

sys.exit(run(RunConfig(**{k: v for k, v in args.items() if v is not None})))
