"""Model files.

A model file is a JSON object holding a mechanical control system and an
affine constraint, with every function written as a string in the expression
DSL. See `docs/model-format.md` for the field reference.
"""

import json
import logging
import math
import numbers

from .constraint import AffineConstraint, check_pair
from .errors import ModelError
from .expr import make_source
from .geometry import MechanicalModel

logger = logging.getLogger(__name__)


KEYS = (
    'name', 'coordinates', 'parameters', 'metric', 'potential',
    'external_force', 'inputs', 'constraint'
)
REQUIRED_KEYS = ('coordinates', 'metric', 'inputs', 'constraint')
CONSTRAINT_KEYS = ('mu', 'Z', 'X')


def check_keys(record, known, required, location):
    if not isinstance(record, dict):
        raise ModelError('expected an object', location)

    unknown = sorted(set(record) - set(known))

    if unknown:
        raise ModelError(
            'unknown keys: {}'.format(', '.join(unknown)), location
        )

    missing = [key for key in required if key not in record]

    if missing:
        raise ModelError(
            'missing keys: {}'.format(', '.join(missing)), location
        )


def check_number(value, location):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ModelError('expected a number, got {!r}'.format(value), location)

    if not math.isfinite(value):
        raise ModelError(
            'expected a finite number, got {!r}'.format(value), location
        )

    return float(value)


def check_entry(value, location):
    if isinstance(value, str):
        return value

    return check_number(value, location)


def check_list(value, location, depth=1):
    """Nested lists of expression entries."""
    if not isinstance(value, list):
        raise ModelError('expected a list', location)

    if depth == 1:
        return [
            check_entry(item, '{}[{}]'.format(location, i))
            for i, item in enumerate(value)
        ]

    return [
        check_list(item, '{}[{}]'.format(location, i), depth - 1)
        for i, item in enumerate(value)
    ]


class ModelFileParser:
    """Build a model and a constraint from a decoded model file.

    `overrides` replaces parameter values declared by the file.
    """
    def __init__(self, record, overrides=None, source='<model>'):
        self.record = record
        self.overrides = overrides or {}
        self.source = source

    def parse(self):
        logger.debug('parsing model file {}'.format(self.source))

        record = self.record

        check_keys(record, KEYS, REQUIRED_KEYS, '')

        name = record.get('name')
        if name is not None and not isinstance(name, str):
            raise ModelError('expected a string', 'name')

        coordinates = record['coordinates']
        if not isinstance(coordinates, list) or not all(
                isinstance(c, str) for c in coordinates):
            raise ModelError('expected a list of names', 'coordinates')

        parameters = self.parse_parameters(record.get('parameters', {}))

        potential = check_entry(record.get('potential', 0), 'potential')

        external_force = None
        if 'external_force' in record:
            external_force = check_list(
                record['external_force'], 'external_force'
            )

        model = MechanicalModel(
            coordinates,
            metric=check_list(record['metric'], 'metric', depth=2),
            potential=potential,
            external_force=external_force,
            input_coframe=check_list(record['inputs'], 'inputs', depth=2),
            parameters=parameters,
            name=name
        )

        con = self.parse_constraint(
            record['constraint'], coordinates, parameters, name
        )

        check_pair(model, con)

        logger.debug('loaded model {} (n={}, m={})'.format(
            name or self.source, model.n, model.m
        ))

        return model, con

    def parse_parameters(self, parameters):
        if not isinstance(parameters, dict):
            raise ModelError('expected an object', 'parameters')

        values = {
            key: check_number(value, 'parameters.{}'.format(key))
            for key, value in parameters.items()
        }

        unknown = sorted(set(self.overrides) - set(values))

        if unknown:
            raise ModelError(
                'unknown parameters: {}'.format(', '.join(unknown)),
                'parameters'
            )

        values.update(
            (key, check_number(value, 'parameters.{}'.format(key)))
            for key, value in self.overrides.items()
        )

        return values

    def parse_constraint(self, record, coordinates, parameters, name):
        check_keys(record, CONSTRAINT_KEYS, ('mu',), 'constraint')

        mu = check_list(record['mu'], 'constraint.mu', depth=2)

        if 'Z' in record and 'X' in record:
            raise ModelError('give either Z or X, not both', 'constraint')

        if 'X' in record:
            return AffineConstraint.from_vector_field(
                coordinates, mu, check_list(record['X'], 'constraint.X'),
                parameters, name
            )

        Z = None
        if 'Z' in record:
            Z = check_list(record['Z'], 'constraint.Z')

        return AffineConstraint(coordinates, mu, Z, parameters, name)


def loads(text, overrides=None, source='<string>'):
    """Parse the text of a model file into `(model, constraint)`."""
    try:
        record = json.loads(text)
    except ValueError as err:
        raise ModelError('invalid JSON: {}'.format(err), source)

    return ModelFileParser(record, overrides, source).parse()


def load(path, overrides=None):
    """Read a model file into `(model, constraint)`."""
    try:
        with open(path, 'rb') as fh:
            text = fh.read().decode('utf-8')
    except OSError as err:
        raise ModelError(
            'cannot read model file: {}'.format(err.strerror), path
        )
    except UnicodeDecodeError as err:
        raise ModelError('not UTF-8: {}'.format(err), path)

    return loads(text, overrides, path)


def to_record(model, con):
    """Model file object for a model and its constraint."""
    def text(expr):
        return make_source(expr)

    record = {
        'coordinates': list(model.coordinates),
        'parameters': dict(model.parameters),
        'metric': [[text(g) for g in row] for row in model.metric],
        'potential': text(model.potential),
        'external_force': [text(f) for f in model.external_force],
        'inputs': [[text(f) for f in row] for row in model.input_coframe],
        'constraint': {
            'mu': [[text(entry) for entry in row] for row in con.mu],
            'Z': [text(z) for z in con.Z]
        }
    }

    if model.name:
        record['name'] = model.name

    return record


def dumps(model, con):
    check_pair(model, con)

    return json.dumps(to_record(model, con), indent=2) + '\n'


def dump(model, con, path):
    with open(path, 'w') as fh:
        fh.write(dumps(model, con))
