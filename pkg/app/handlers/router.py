"""Command registration"""

import argparse
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace], int]
Configure = Callable[[argparse.ArgumentParser], None]


@dataclass(frozen=True)
class Command:
    name: str
    handler: Handler
    help: str
    configure: Optional[Configure] = None


class Router:
    """Registry of CLI command handlers keyed by command name"""

    def __init__(self):
        self.commands: Dict[str, Command] = {}

    def command(self, name: str, help: str = "", arguments: Optional[Configure] = None):
        """Decorator registering `handler` under `name`"""

        def register(handler: Handler) -> Handler:
            if name in self.commands:
                raise ValueError(f"command {name!r} is already registered")
            self.commands[name] = Command(name, handler, help, arguments)
            return handler

        return register

    def include_router(self, other: "Router") -> None:
        for name, command in other.commands.items():
            if name in self.commands:
                raise ValueError(f"command {name!r} is already registered")
            self.commands[name] = command

    def resolve(self, name: str) -> Command:
        try:
            return self.commands[name]
        except KeyError:
            raise ValueError(f"unknown command {name!r}") from None

    def build_parser(self, prog: str, description: str = "") -> argparse.ArgumentParser:
        """One sub-parser per registered command, each with --quiet"""
        parser = argparse.ArgumentParser(prog=prog, description=description)
        subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
        for command in self.commands.values():
            sub = subparsers.add_parser(command.name, help=command.help, description=command.help)
            sub.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
            if command.configure is not None:
                command.configure(sub)
        return parser
