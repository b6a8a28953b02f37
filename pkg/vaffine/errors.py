"""Error types.

Every error that can reach the user derives from `FatalError`. The
`exit_code` class attribute tells the command-line interface which status to
return: 2 for usage, parse and validation problems, 1 for mathematical
failures.
"""

import logging

logger = logging.getLogger(__name__)


class FatalError(Exception):
    exit_code = 1

    def __init__(self, message, tb=None):
        super().__init__(message)

        self.message = message
        self.tb = tb

    def details(self):
        """Extra diagnostic lines, overridden by subclasses."""
        return []

    def log(self, return_with=None):
        logger.error(self.message)

        for line in self.details():
            logger.error('  {}'.format(line))

        if self.tb:
            logger.debug(
                'traceback:\n{}'.format(
                    self.tb.strip()
                )
            )

        if return_with is None:
            return self.exit_code

        return return_with


class ExprError(FatalError):
    """Problems with the text of an expression."""
    exit_code = 2


class ExprSyntaxError(ExprError):
    def __init__(self, message, offset, text=None):
        self.offset = offset
        self.text = text

        super().__init__(
            'syntax error at byte {}: {}'.format(offset, message)
        )


class UnknownFunctionError(ExprSyntaxError):
    def __init__(self, name, offset, text=None):
        self.name = name

        super().__init__(
            'unknown function `{}`'.format(name), offset, text
        )


class EvaluationError(FatalError):
    """Failures while computing the value of an expression."""


class UnboundSymbolError(EvaluationError):
    def __init__(self, name):
        self.name = name

        super().__init__(
            'unbound symbol `{}`'.format(name)
        )


class DomainError(EvaluationError):
    def __init__(self, message, subexpression):
        self.subexpression = subexpression

        super().__init__(
            '{} in `{}`'.format(message, subexpression)
        )


class ModelError(FatalError):
    """Load-time validation of a model or a model file."""
    exit_code = 2

    def __init__(self, message, location=None):
        self.location = location

        if location:
            message = '{}: {}'.format(location, message)

        super().__init__(message)


class MetricError(FatalError):
    def __init__(self, message, q, eigenvalues):
        self.q = q
        self.eigenvalues = eigenvalues

        super().__init__(message)

    def details(self):
        return [
            'q = {}'.format(list(self.q)),
            'eigenvalues = {}'.format(list(self.eigenvalues))
        ]


class TransversalityViolation(FatalError):
    def __init__(self, message, q, P=None, condition=None, det=None):
        self.q = q
        self.P = P
        self.condition = condition
        self.det = det

        super().__init__(message)

    def details(self):
        lines = ['q = {}'.format(list(self.q))]

        if self.P is not None:
            lines.append('P = {}'.format(self.P.tolist()))

        if self.condition is not None:
            lines.append('condition estimate = {:.6g}'.format(self.condition))

        if self.det is not None:
            lines.append('det P = {:.6g}'.format(self.det))

        return lines


class RankDefect(FatalError):
    def __init__(self, report):
        self.report = report

        super().__init__(
            'constraint rank {} < {} at q = {}'.format(
                report.rank, report.expected, list(report.q)
            )
        )

    def details(self):
        return [
            'singular values = {}'.format(
                list(self.report.singular_values)
            )
        ]


class IntegrationAbort(FatalError):
    def __init__(self, message, time, step, state=None, last_sample=None,
                 cause=None):
        self.time = time
        self.step = step
        self.state = state
        self.last_sample = last_sample
        self.cause = cause

        super().__init__(
            'integration aborted at t = {:.17g} (step {}): {}'.format(
                time, step, message
            )
        )

    def details(self):
        lines = []

        if self.state is not None:
            lines.append('stage state q = {}, qdot = {}'.format(
                list(self.state.q), list(self.state.qdot)
            ))

        if self.last_sample is not None:
            lines.append('last good sample index = {}'.format(
                self.last_sample
            ))

        if self.cause is not None:
            lines.extend(self.cause.details())

        return lines


class UsageError(FatalError):
    """Invalid command-line values."""
    exit_code = 2
