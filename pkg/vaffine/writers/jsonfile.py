"""JSON trajectory writer."""

import json
import logging

from .csvfile import header

logger = logging.getLogger(__name__)


def make_json(trajectory, wrap=()):
    q = trajectory.wrapped(wrap) if wrap else trajectory.q

    return {
        'columns': header(trajectory),
        'times': trajectory.times.tolist(),
        'q': q.tolist(),
        'qdot': trajectory.qdot.tolist(),
        'tau': trajectory.controls.tolist(),
        'phi': trajectory.phis.tolist(),
        'energy': trajectory.energy.tolist()
    }


def write_json(fh, trajectory, wrap=()):
    json.dump(make_json(trajectory, wrap), fh, indent=2)
    fh.write('\n')

    logger.debug('wrote {} samples'.format(len(trajectory)))
