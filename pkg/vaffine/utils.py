import math

from functools import wraps


def memoized(f):
    f._cache = {}

    @wraps(f)
    def wrapper(*args, **kwargs):
        if args in f._cache:
            return f._cache[args]

        value = f(*args, **kwargs)

        f._cache[args] = value

        return value

    return wrapper


def wrap_angle(value):
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(value, 2 * math.pi)

    if wrapped == -math.pi:
        return math.pi

    return wrapped


def parse_vector(text, length=None, name='vector'):
    """Parse a comma-separated list of reals."""
    try:
        values = [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ValueError(
            '{} must be comma-separated numbers: {!r}'.format(name, text)
        )

    if length is not None and len(values) != length:
        raise ValueError(
            '{} needs {} components, got {}'.format(name, length, len(values))
        )

    return values
