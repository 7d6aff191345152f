"""CLI handlers package"""

from .commands import commands_router
from .router import Router

# Main router that includes all handlers
router = Router()
router.include_router(commands_router)
