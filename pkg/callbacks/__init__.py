from .base import CallbackGroup, TrainingCallback
from .metrics_log_callback_handler import MetricsLogCallbackHandler
from .progress_callback_handler import ProgressCallbackHandler
from .report import METRICS_LOG_COLUMNS, IterationRecord, TrainReport

__all__ = [
    "METRICS_LOG_COLUMNS",
    "CallbackGroup",
    "IterationRecord",
    "MetricsLogCallbackHandler",
    "ProgressCallbackHandler",
    "TrainReport",
    "TrainingCallback",
]
