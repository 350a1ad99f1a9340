"""
Base exception for the nashpoly package.
"""


class NashpolyError(Exception):
    """Base class for every error raised by nashpoly."""
    pass
