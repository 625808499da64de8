# utils/exceptions.py
from typing import Optional


class SimulationException(Exception):
    """Base exception for simulator errors."""
    pass


class UsageError(SimulationException, ValueError):
    """Raised when an operation is called outside its preconditions."""
    pass


class ScenarioError(UsageError):
    """Raised when a data scenario cannot be generated from its config."""
    pass


class ConfigError(SimulationException):
    """Raised when an experiment or sweep file fails schema validation."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        super().__init__(self.format())

    def format(self) -> str:
        location = self.path or "<config>"
        if self.line is not None:
            location = f"{location}:{self.line}"
        return f"{location}: {self.message}"


class TrainingError(SimulationException):
    """Raised when local training produces unusable parameters."""
    pass
