"""
Exceptions raised by :py:mod:`shuttlesim`.

Every error is a `ValueError` so that callers which only guard against
invalid input keep working; the subclasses let tests and the command line
front end tell the failure modes apart.

:License: :doc:`../LICENSE`

"""

__all__ = [
    'ShuttleError', 'GraphNotConnected', 'NotOnSubnetwork',
    'NoCoveringSubnetwork', 'InfeasibleWindow', 'LabelError',
    'InstanceError', 'PolicyStuck', 'IllegalCommand', 'TraceMismatch',
    'ScheduleViolation', 'AssignedToLine', 'AssignedToCircuit',
    'NonOriginPickup', 'NonOriginDropoff', 'UnknownLoad',
    'InstanceTooLarge', 'Infeasible', 'ZeroOptimum', 'UnknownGenerator',
    'UnknownPolicy', 'BadParams', 'ConfigError', 'FormatError'
]


class ShuttleError(ValueError):
    """ Base class of all errors raised by this package. """


class GraphNotConnected(ShuttleError):
    pass


class NotOnSubnetwork(ShuttleError):
    pass


class NoCoveringSubnetwork(ShuttleError):
    pass


class InfeasibleWindow(ShuttleError):
    pass


class LabelError(ShuttleError):
    pass


class InstanceError(ShuttleError):
    """ A structural invariant of an instance (or of one of its parts)
    does not hold. """


class PolicyStuck(ShuttleError):
    """ The policy waits for an event that will never come while requests
    remain unserved or a vehicle is away from the depot. """


class IllegalCommand(ShuttleError):
    pass


class TraceMismatch(ShuttleError):
    pass


class ScheduleViolation(ShuttleError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            "Schedule produced by the online run is not valid: "
            + "; ".join(self.violations)
        )


class AssignedToLine(ShuttleError):
    pass


class AssignedToCircuit(ShuttleError):
    pass


class NonOriginPickup(ShuttleError):
    pass


class NonOriginDropoff(ShuttleError):
    pass


class UnknownLoad(ShuttleError):
    pass


class InstanceTooLarge(ShuttleError):
    pass


class Infeasible(ShuttleError):
    pass


class ZeroOptimum(ShuttleError):
    pass


class UnknownGenerator(ShuttleError):
    pass


class UnknownPolicy(ShuttleError):
    pass


class BadParams(ShuttleError):
    pass


class ConfigError(ShuttleError):
    pass


class FormatError(ShuttleError):
    """ A document (instance, trace) cannot be parsed. """
