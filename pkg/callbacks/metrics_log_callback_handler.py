from pathlib import Path

from callbacks.base import TrainingCallback
from callbacks.report import METRICS_LOG_COLUMNS, IterationRecord


class MetricsLogCallbackHandler(TrainingCallback):
    """Appends one CSV line per iteration to the metrics log file."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.write_text(",".join(METRICS_LOG_COLUMNS) + "\n", encoding="utf-8")

    def on_iteration_end(self, record: IterationRecord) -> None:
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(record.to_row() + "\n")
