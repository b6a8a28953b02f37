"""CSV trajectory writer.

Numbers are written with 17 significant digits through `str.format`, which
does not depend on the locale.
"""

import csv
import logging

from ..expr import velocity_name

logger = logging.getLogger(__name__)


def number(value):
    return '{:.17g}'.format(value)


def header(trajectory):
    coordinates = list(trajectory.coordinates)
    m = trajectory.controls.shape[1]

    return ['t'] \
        + coordinates \
        + [velocity_name(c) for c in coordinates] \
        + ['tau{}'.format(a + 1) for a in range(m)] \
        + ['phi{}'.format(b + 1) for b in range(trajectory.phis.shape[1])]


def make_rows(trajectory, wrap=()):
    q = trajectory.wrapped(wrap) if wrap else trajectory.q

    for i, t in enumerate(trajectory.times):
        values = [t]
        values.extend(q[i])
        values.extend(trajectory.qdot[i])
        values.extend(trajectory.controls[i])
        values.extend(trajectory.phis[i])

        yield [number(value) for value in values]


def write_csv(fh, trajectory, wrap=()):
    """Write one header line and one line per sample.

    `wrap` lists coordinate indices wrapped to (-pi, pi] in the output.
    """
    writer = csv.writer(fh, lineterminator='\n')

    writer.writerow(header(trajectory))
    writer.writerows(make_rows(trajectory, wrap))

    logger.debug('wrote {} samples'.format(len(trajectory)))
