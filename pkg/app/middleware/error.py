"""Error handling middleware"""

import argparse
import logging
from typing import Callable

from app.config import get_settings
from app.errors import HistkitError

logger = logging.getLogger(__name__)

USAGE_ERROR = 2


class ErrorMiddleware:
    """Middleware for error handling

    Turns invalid input and I/O failures into exit code 2; anything else
    propagates.
    """

    def __call__(self, handler: Callable[[argparse.Namespace], int], args: argparse.Namespace) -> int:
        try:
            return handler(args)

        except HistkitError as e:
            logger.error(f"Invalid parameters for {args.command}: {e}", exc_info=get_settings().DEBUG)
            return USAGE_ERROR

        except ValueError as e:
            logger.error(f"Invalid arguments for {args.command}: {e}", exc_info=get_settings().DEBUG)
            return USAGE_ERROR

        except OSError as e:
            logger.error(f"I/O error in {args.command}: {e}", exc_info=get_settings().DEBUG)
            return USAGE_ERROR
