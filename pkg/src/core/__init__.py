"""Core modules for selmut"""

from .config import Settings, get_settings, reset_settings

__all__ = [
    'Settings',
    'get_settings',
    'reset_settings',
]
