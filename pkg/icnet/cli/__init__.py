from icnet.cli.commands import (
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_PROPERTY,
    EXIT_USAGE,
    cmd_analyze,
    cmd_train,
    cmd_verify,
    cmd_xor,
    exit_code_for,
)
from icnet.cli.manifest import RunManifest

__all__ = [
    "EXIT_NUMERIC",
    "EXIT_OK",
    "EXIT_PROPERTY",
    "EXIT_USAGE",
    "RunManifest",
    "cmd_analyze",
    "cmd_train",
    "cmd_verify",
    "cmd_xor",
    "exit_code_for",
]
