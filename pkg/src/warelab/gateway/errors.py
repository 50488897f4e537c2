from ..errors import WarelabError


class GatewayError(WarelabError):
    pass


class ProtocolError(GatewayError):
    pass


class BindFailure(GatewayError):
    pass


class InvalidConfig(GatewayError):
    pass


class ScriptStalled(GatewayError):
    pass


class ReplayDivergence(GatewayError):
    pass
