"""Per-iteration training records and their metrics-log text form."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

METRICS_LOG_COLUMNS: List[str] = [
    "phase",
    "iteration",
    "loss_discriminator",
    "loss_policy",
    "loss_barrier",
    "loss_derivative",
    "estimate_y",
    "success_rate",
    "collision_rate",
]


@dataclass
class IterationRecord:
    """
    One row of the metrics log. None means "not measured this iteration".

    Attributes:
        phase: "airl" (pre-training), "barrier" (Step 1) or "joint" (Step 2)
        iteration: Iteration (or epoch) index within the whole run
    """

    phase: str
    iteration: int
    loss_discriminator: Optional[float] = None
    loss_policy: Optional[float] = None
    loss_barrier: Optional[float] = None
    loss_derivative: Optional[float] = None
    estimate_y: Optional[float] = None
    success_rate: Optional[float] = None
    collision_rate: Optional[float] = None

    def to_row(self) -> str:
        cells = []
        for column in METRICS_LOG_COLUMNS:
            value = getattr(self, column)
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(repr(value))
            else:
                cells.append(str(value))
        return ",".join(cells)

    @classmethod
    def from_row(cls, row: str) -> "IterationRecord":
        cells = row.rstrip("\n").split(",")
        values: Dict[str, object] = {"phase": cells[0], "iteration": int(cells[1])}
        for column, cell in zip(METRICS_LOG_COLUMNS[2:], cells[2:]):
            values[column] = float(cell) if cell else None
        return cls(**values)  # type: ignore[arg-type]


@dataclass
class TrainReport:
    """
    Everything a training run reports.

    Attributes:
        records: Iteration rows in the order they were produced
        summary: Scalar results such as held-out barrier accuracy
    """

    records: List[IterationRecord] = field(default_factory=list)
    summary: Dict[str, float] = field(default_factory=dict)

    def add(self, record: IterationRecord) -> None:
        self.records.append(record)

    def extend(self, other: "TrainReport") -> None:
        self.records.extend(other.records)
        self.summary.update(other.summary)

    def phase(self, name: str) -> List[IterationRecord]:
        return [r for r in self.records if r.phase == name]

    def last_evaluation(self) -> Optional[IterationRecord]:
        evaluated = [r for r in self.records if r.success_rate is not None]
        return evaluated[-1] if evaluated else None

    def to_text(self) -> str:
        lines = [",".join(METRICS_LOG_COLUMNS)]
        lines.extend(record.to_row() for record in self.records)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TrainReport":
        rows = [line for line in text.splitlines() if line.strip()]
        return cls(records=[IterationRecord.from_row(row) for row in rows[1:]])
