"""
Health Check Test Suite for selmut
Import layering and end-to-end acceptance checks
"""

__version__ = "1.0.0"
