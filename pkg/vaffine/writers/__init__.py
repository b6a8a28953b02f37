"""Trajectory and record writers."""

import json
import os

from ..errors import UsageError

from .csvfile import write_csv
from .jsonfile import write_json


WRITERS = {
    '.csv': write_csv,
    '.json': write_json
}


def find_writer(filename):
    """Trajectory writer for an output file name; `-` is CSV on stdout."""
    if filename == '-':
        return write_csv

    extension = os.path.splitext(filename)[1].lower()

    if extension not in WRITERS:
        raise UsageError(
            'unsupported output format `{}`, use `.csv` or `.json`'.format(
                extension or filename
            )
        )

    return WRITERS[extension]


def write_record(fh, record):
    """One JSON object with sorted keys on a line of its own."""
    fh.write(
        json.dumps(record, sort_keys=True, allow_nan=True) + '\n'
    )
