"""
Logging setup for the command line.
"""

import logging
import os
from typing import Optional

from dotenv import load_dotenv

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: Optional[str] = None) -> int:
    """
    Configure the root logger once.

    The level comes from ``level``, else the SMCDMA_LOG_LEVEL environment
    variable (``.env`` is honoured), else WARNING.

    Returns:
        int: Effective numeric level
    """
    load_dotenv()
    name = (level or os.getenv("SMCDMA_LOG_LEVEL") or "WARNING").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level '{name}'")
    logging.basicConfig(level=numeric, format=LOG_FORMAT)
    logging.getLogger("smcdma").setLevel(numeric)
    logging.getLogger("src.smcdma").setLevel(numeric)
    return numeric
