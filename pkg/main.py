import sys

from loguru import logger

from app.commands.cli import run
from app.config import settings

# Initialize Logging: stdout carries matrices only
logger.remove()
logger.add(sys.stderr, level=settings.LOG_LEVEL)
if settings.LOG_FILE:
    logger.add(settings.LOG_FILE, rotation=settings.LOG_ROTATION, level="DEBUG")


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
