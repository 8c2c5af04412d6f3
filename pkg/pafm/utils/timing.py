import time
import logging
from contextlib import contextmanager
from typing import Dict, Iterator, List

from pafm.schemas.common import PhaseTiming, TimingReport

logger = logging.getLogger(__name__)


class PhaseTimer:
    """Wall-clock time per named phase plus a sample counter for throughput."""

    def __init__(self, command: str):
        self.command = command
        self._phases: Dict[str, float] = {}
        self._order: List[str] = []
        self.samples = 0
        self.sample_seconds = 0.0

    @contextmanager
    def phase(self, name: str, samples: int = 0) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            if name not in self._phases:
                self._order.append(name)
                self._phases[name] = 0.0
            self._phases[name] += elapsed
            if samples:
                self.samples += samples
                self.sample_seconds += elapsed
            logger.debug(f"⏱️ {self.command}/{name}: {elapsed:.3f}s")

    def report(self, objective: str = None) -> TimingReport:
        rate = self.samples / self.sample_seconds if self.sample_seconds > 0 else 0.0
        return TimingReport(
            command=self.command,
            objective=objective,
            samples_processed=self.samples,
            samples_per_sec=rate,
            phases=[PhaseTiming(name=n, seconds=self._phases[n]) for n in self._order],
        )
