#!/usr/bin/env python3
"""
histkit command-line entry point
Interference of local-measurement histories: point, sweep, dilation, verify
"""

import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.config import get_settings
from app.handlers import router
from app.middleware.error import USAGE_ERROR, ErrorMiddleware

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(quiet: bool = False) -> None:
    level = logging.WARNING if quiet else getattr(logging, get_settings().LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        get_settings()
    except ValidationError as e:
        logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
        logger.error(f"❌ Invalid configuration: {e}")
        return USAGE_ERROR

    parser = router.build_parser(
        "histkit",
        description="Interference of local-measurement histories: simulation and verification",
    )
    args = parser.parse_args(argv)
    configure_logging(args.quiet)

    command = router.resolve(args.command)
    logger.debug(f"Dispatching {command.name}")
    return ErrorMiddleware()(command.handler, args)


if __name__ == "__main__":
    sys.exit(main())
