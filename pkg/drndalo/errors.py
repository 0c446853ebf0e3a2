"""
Exception types raised across drndalo.

Each error also derives from the closest built-in so callers that only
know about ValueError / RuntimeError keep working.
"""

from typing import Optional


class DrndaloError(Exception):
    """Base class for all drndalo errors."""


class AsmSyntaxError(DrndaloError, ValueError):
    """Assembly source could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None, line: str = ''):
        super().__init__(message)
        self.message = message
        self.line_number = line_number
        self.line = line

    def __str__(self) -> str:
        if self.line_number is None:
            return self.message
        return f"line {self.line_number}: {self.message}\n  {self.line.strip()}"


class Trap(DrndaloError, RuntimeError):
    """Architectural trap raised while executing an instruction."""

    def __init__(self, pc: int, reason: str):
        super().__init__(f"trap at pc=0x{pc:08x}: {reason}")
        self.pc = pc
        self.reason = reason


class TraceMismatchError(DrndaloError, RuntimeError):
    """A keyed run did not reproduce the plain program's architectural trace."""


class RuntimeDeobfError(DrndaloError, ValueError):
    """The runtime deobfuscation transform cannot be applied to a program."""


class DatasetError(DrndaloError, ValueError):
    """A stealth dataset cannot be built or split as requested."""


class AttackError(DrndaloError, ValueError):
    """An attack harness request is out of range."""
