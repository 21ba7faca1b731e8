"""Utility modules for selmut"""

from .logging_config import SelmutLogger, setup_logging
from .path_utils import PathUtils

__all__ = [
    'SelmutLogger',
    'setup_logging',
    'PathUtils',
]
