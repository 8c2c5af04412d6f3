from pydantic import BaseModel, ConfigDict
from typing import Any, Dict, List, Optional


class StrictModel(BaseModel):
    """Base for every config section: unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


# Summary printed by every command (success or failure)
class CommandResult(BaseModel):
    success: bool = True
    command: str
    message: Optional[str] = None
    artifacts: List[str] = []
    data: Optional[Dict[str, Any]] = None


class ErrorReport(BaseModel):
    success: bool = False
    command: str
    message: str
    error_code: Optional[str] = None
    exit_code: int = 1


# timing.json
class PhaseTiming(BaseModel):
    name: str
    seconds: float


class TimingReport(BaseModel):
    command: str
    objective: Optional[str] = None
    samples_processed: int = 0
    samples_per_sec: float = 0.0
    phases: List[PhaseTiming] = []
