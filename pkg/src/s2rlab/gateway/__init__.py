"""CLI, run configuration, pipeline orchestration, and the teleop service."""

from .config import DATA_ROOT_ENV, ConfigError, RunConfig
from .pipeline import METHODS, Pipeline, gap_key
from .protocol import WIRE_VERSION, ClientStream, ProtocolError, ack, error, make_message

__all__ = [
    "DATA_ROOT_ENV",
    "ConfigError",
    "RunConfig",
    "METHODS",
    "Pipeline",
    "gap_key",
    "WIRE_VERSION",
    "ClientStream",
    "ProtocolError",
    "ack",
    "error",
    "make_message",
]
