"""Domain errors raised by simulation commands.

Each error corresponds to a command precondition; raising one leaves the
world unchanged.
"""

from ..errors import WarelabError


class SimError(WarelabError):
    pass


class UnknownRobot(SimError):
    pass


class UnknownRoute(SimError):
    pass


class UnknownZone(SimError):
    pass


class AutonomousFlightActive(SimError):
    pass


class RouteActive(SimError):
    pass


class NoBoxInRange(SimError):
    pass


class AlreadyCarrying(SimError):
    pass


class NotCarrying(SimError):
    pass


class VisionUnavailable(SimError):
    pass


class NotAtRouteStart(SimError):
    pass
