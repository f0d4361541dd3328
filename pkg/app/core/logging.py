"""
Logger setup. Library modules log through `logging.getLogger(__name__)`;
the CLI calls `configure_logging` at start-up. Logs go to stderr so stdout
stays reserved for command results.
"""

import logging
import sys
from typing import Optional

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_stream_handler: Optional[logging.StreamHandler] = None


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    global _stream_handler
    root = logging.getLogger("app")
    root.setLevel(level.upper())

    if _stream_handler is not None:
        # sys.stderr may have been swapped since the first call
        _stream_handler.setStream(sys.stderr)
        return

    _stream_handler = logging.StreamHandler(sys.stderr)
    _stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(_stream_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(file_handler)

    root.propagate = False
