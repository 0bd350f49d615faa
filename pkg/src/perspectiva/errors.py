"""Exception base shared by every module.

The CLI maps any ``PerspectivaError`` to exit code 1 and prints the class
name, so subclasses are named after the condition they report.
"""


class PerspectivaError(Exception):
    """Base class for domain errors."""
