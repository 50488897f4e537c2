"""Network gateway: wire protocol, session engine, scripted agents,
headless runner with replay verification, and the live WebSocket server."""

from .agent import ScriptedAgent, StallingAgent
from .engine import SessionEngine
from .errors import (
    BindFailure,
    GatewayError,
    InvalidConfig,
    ProtocolError,
    ReplayDivergence,
    ScriptStalled,
)
from .headless import (
    SessionArchive,
    config_hash,
    load_archive,
    replay,
    run_headless,
    save_archive,
)
from .protocol import (
    PROTOCOL_VERSION,
    Ack,
    AffordanceUpdate,
    CameraFrame,
    Err,
    Gesture,
    Hello,
    JoypadInput,
    NotificationMsg,
    PanelAction,
    QuestionnaireSubmit,
    SessionControl,
    SessionEvent,
    Snapshot,
    StateColor,
    decode,
    encode,
    is_inbound,
)
from .server import GatewayServer, ServeConfig

__all__ = [
    "Ack",
    "AffordanceUpdate",
    "BindFailure",
    "CameraFrame",
    "Err",
    "GatewayError",
    "GatewayServer",
    "Gesture",
    "Hello",
    "InvalidConfig",
    "JoypadInput",
    "NotificationMsg",
    "PROTOCOL_VERSION",
    "PanelAction",
    "ProtocolError",
    "QuestionnaireSubmit",
    "ReplayDivergence",
    "ScriptStalled",
    "ScriptedAgent",
    "SessionArchive",
    "SessionControl",
    "SessionEngine",
    "SessionEvent",
    "ServeConfig",
    "Snapshot",
    "StallingAgent",
    "StateColor",
    "config_hash",
    "decode",
    "encode",
    "is_inbound",
    "load_archive",
    "replay",
    "run_headless",
    "save_archive",
]
