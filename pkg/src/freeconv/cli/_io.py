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
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd

from .._errors import SchemaError
from .._measure import build_measure


def parse_number(text):
    """
    Parse a real number, keeping ratios such as ``2/3`` exact.
    """
    text = text.strip()
    if '/' in text:
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"invalid ratio {text!r}")
    return float(text)


def parse_measure(path):
    """
    Read a measure literal from a JSON file.

    Raises
    ------
    SchemaError
        If the file cannot be read or does not follow the schema.
    """
    try:
        with open(path) as f:
            spec = json.load(f)
    except OSError as err:
        raise SchemaError('$', f"cannot read {path}: {err.strerror}")
    except json.JSONDecodeError as err:
        raise SchemaError('$', f"invalid JSON in {path}: {err.msg}")
    return build_measure(spec)


def jsonable(value):
    """
    Convert numbers and containers to plain JSON values. Non-finite
    floats become strings.
    """
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': jsonable(value.real), 'im': jsonable(value.imag)}
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating, Fraction)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def dump_json(obj, path=None):
    """
    Write a JSON document to a file, or to stdout without a path.
    """
    text = json.dumps(jsonable(obj), indent=2, sort_keys=True)
    if path is None:
        print(text)
    else:
        Path(path).write_text(text + '\n')


def atoms_path(path):
    """
    The atom sidecar of a density file: ``out.csv`` -> ``out.atoms.json``.
    """
    path = Path(path)
    return path.with_name(f"{path.stem}.atoms.json")


def result_document(result):
    return {
        'params': result.params,
        'atoms': [atom.as_dict() for atom in result.atoms],
        'density': {'x': result.density.x, 'density': result.density.density},
        'support_intervals': result.density.support_intervals,
        'diagnostics': result.diagnostics,
        'divisibility': result.divisibility,
    }


def write_result(result, path=None, fmt='csv'):
    """
    Write a spectral result: a CSV density table with columns ``x`` and
    ``density`` plus a JSON atom sidecar, or a single JSON document.
    """
    if fmt == 'json':
        dump_json(result_document(result), path)
        return
    frame = pd.DataFrame({'x': result.density.x,
                          'density': result.density.density})
    text = frame.to_csv(index=False, float_format='%.17g')
    atoms = [atom.as_dict() for atom in result.atoms]
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
    dump_json(atoms, atoms_path(path))


def read_density(path):
    """
    Read a density table written by :py:func:`write_result`.
    """
    frame = pd.read_csv(path)
    if list(frame.columns) != ['x', 'density']:
        raise SchemaError('$', f"unexpected columns {list(frame.columns)}")
    return frame
