from __future__ import annotations

import logging
from os import getenv
from pathlib import Path
from typing import TYPE_CHECKING

from cgc.core.paths import LOGS_DIR

if TYPE_CHECKING:
    from logging import Logger

LOG_FILE = LOGS_DIR / "cgc.log"
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"
LOG_LEVEL = logging.getLevelNamesMapping().get(
    getenv("CGC_LOG_LEVEL", default="WARNING").upper(), logging.WARNING
)


def setup_logging() -> Logger:
    """Configure the root logger once; later calls return it untouched."""
    logger = logging.getLogger()
    if logger.hasHandlers():
        return logger

    Path(LOG_FILE).parent.mkdir(parents=True, exist_ok=True)
    formatter = logging.Formatter(LOG_FORMAT)
    handlers: list[logging.Handler] = [
        logging.FileHandler(LOG_FILE, mode="a", encoding="utf-8"),
        logging.StreamHandler(),
    ]
    for handler in handlers:
        handler.setFormatter(formatter)
        handler.setLevel(LOG_LEVEL)
        logger.addHandler(handler)
    logger.setLevel(LOG_LEVEL)
    return logger
