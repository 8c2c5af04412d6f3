"""Exception types shared by every workbench module.

Each error carries a short ``error_code`` and the process exit code the
command line maps it to (0 success, 1 runtime/I-O failure, 2 usage/config).
"""
from typing import Optional, Sequence


class WorkbenchError(Exception):
    error_code: str = "workbench_error"
    exit_code: int = 1

    def __init__(self, message: str, error_code: Optional[str] = None):
        super().__init__(message)
        self.message = message
        if error_code is not None:
            self.error_code = error_code


class InvalidArgumentError(WorkbenchError, ValueError):
    error_code = "invalid_argument"
    exit_code = 2


class DegenerateTimeError(InvalidArgumentError):
    """Raised when t is too close to 0 for 1/t or 1/t² to be meaningful."""
    error_code = "degenerate_time"


class NumericFailureError(WorkbenchError, ArithmeticError):
    error_code = "numeric_failure"

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class InternalInvariantError(WorkbenchError, RuntimeError):
    error_code = "internal_invariant"


class ConfigError(WorkbenchError):
    error_code = "config_error"
    exit_code = 2


class ParseError(WorkbenchError):
    error_code = "parse_error"

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line
        self.path = path


class ArtifactMissingError(WorkbenchError, FileNotFoundError):
    error_code = "artifact_missing"

    def __init__(self, missing: Sequence[str], directory: Optional[str] = None):
        listing = ", ".join(missing)
        prefix = f"missing in {directory}: " if directory else "missing: "
        super().__init__(prefix + listing)
        self.missing = list(missing)


class TrainingAbortedError(WorkbenchError):
    error_code = "training_aborted"

    def __init__(self, message: str, step: int, snapshot_path: Optional[str] = None):
        super().__init__(f"step {step}: {message}" + (f" (snapshot: {snapshot_path})" if snapshot_path else ""))
        self.step = step
        self.snapshot_path = snapshot_path
