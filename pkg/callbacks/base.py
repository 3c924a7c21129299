"""Hook interface the trainers report through."""

from typing import Iterable, Optional

from callbacks.report import IterationRecord


class TrainingCallback:
    """No-op base; subclasses override the hooks they care about."""

    def on_phase_start(self, phase: str, total: int) -> None:
        """Called before a training phase with its iteration budget."""

    def on_iteration_end(self, record: IterationRecord) -> None:
        """Called after every iteration (or barrier epoch)."""

    def on_phase_end(self, phase: str, summary: Optional[dict] = None) -> None:
        """Called once a phase finishes, with any scalar results."""


class CallbackGroup(TrainingCallback):
    """Fans each hook out to several callbacks in order."""

    def __init__(self, callbacks: Iterable[TrainingCallback] = ()):
        self.callbacks = list(callbacks)

    def on_phase_start(self, phase: str, total: int) -> None:
        for callback in self.callbacks:
            callback.on_phase_start(phase, total)

    def on_iteration_end(self, record: IterationRecord) -> None:
        for callback in self.callbacks:
            callback.on_iteration_end(record)

    def on_phase_end(self, phase: str, summary: Optional[dict] = None) -> None:
        for callback in self.callbacks:
            callback.on_phase_end(phase, summary)
