#!/usr/bin/env python3
"""
Logging setup: colored console output on stderr plus an optional log file.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

import colorlog

FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
CONSOLE_FORMAT = '%(log_color)s%(levelname)-8s%(reset)s %(cyan)s%(name)s%(reset)s: %(message)s'
LOG_COLORS = {
    'DEBUG': 'white',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'bold_red',
}


def setup_logging(level: str = 'INFO', log_dir: Optional[Path] = None) -> logging.Logger:
    """Configure the root logger. Safe to call more than once."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_gptkit', False):
            root.removeHandler(handler)

    console = colorlog.StreamHandler(sys.stderr)
    console.setFormatter(colorlog.ColoredFormatter(CONSOLE_FORMAT, log_colors=LOG_COLORS))
    console._gptkit = True
    root.addHandler(console)

    if log_dir is not None:
        # Create logs directory if it doesn't exist
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_dir / 'gptkit.log')
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
        file_handler._gptkit = True
        root.addHandler(file_handler)

    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    return root
