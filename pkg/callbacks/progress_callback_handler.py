import time
from typing import Optional

from rich.console import Console
from rich.live import Live
from rich.spinner import Spinner
from rich.text import Text

from callbacks.base import TrainingCallback
from callbacks.report import IterationRecord

console = Console(stderr=True)

# Spinner refresh rate in refreshes per second
SPINNER_REFRESH_RATE: int = 10

PHASE_TITLES = {
    "airl": "AIRL pre-training",
    "barrier": "Barrier training (Step 1)",
    "joint": "CBFIRL joint training (Step 2)",
}


class ProgressCallbackHandler(TrainingCallback):
    """Shows a live spinner with the current phase, iteration and losses."""

    def __init__(self, quiet: bool = False):
        self.spinner = Spinner("aesthetic")
        self.live_display: Optional[Live] = None
        self.quiet = quiet
        self.phase = ""
        self.total = 0
        self.status = ""
        self.done = 0

    def start_loading(self, message: str) -> None:
        """Start the spinner using Rich's Live display"""
        if self.quiet:
            return

        if self.live_display and self.live_display.is_started:
            self.live_display.stop()

        handler = self

        # Renderable that re-reads the handler status on every refresh
        class SpinnerRenderable:
            def __rich_console__(self, console, options):
                content = handler.spinner.render(time.time())
                result = Text()
                result.append(content)
                result.append(" ")
                result.append(message, style="green")
                if handler.status:
                    result.append("  ")
                    result.append(handler.status, style="cyan")
                yield result

        self.live_display = Live(
            SpinnerRenderable(),
            console=console,
            refresh_per_second=SPINNER_REFRESH_RATE,
            transient=True,
        )
        self.live_display.start()

    def stop_loading(self) -> None:
        """Stop the spinner"""
        if self.live_display and self.live_display.is_started:
            self.live_display.stop()

    def on_phase_start(self, phase: str, total: int) -> None:
        self.phase = phase
        self.total = total
        self.done = 0
        self.status = ""
        self.start_loading(PHASE_TITLES.get(phase, phase))

    def on_iteration_end(self, record: IterationRecord) -> None:
        self.done += 1
        parts = [f"{self.done}/{self.total}"]
        for label, value in (
            ("L_D", record.loss_discriminator),
            ("L_pi", record.loss_policy),
            ("L_bar", record.loss_barrier),
            ("L_der", record.loss_derivative),
            ("succ", record.success_rate),
            ("coll", record.collision_rate),
        ):
            if value is not None:
                parts.append(f"{label}={value:.4g}")
        self.status = " ".join(parts)

    def on_phase_end(self, phase: str, summary: Optional[dict] = None) -> None:
        self.stop_loading()
        if self.quiet:
            return
        line = Text(f"✓ {PHASE_TITLES.get(phase, phase)} done", style="bold green")
        if self.status:
            line.append(f"  ({self.status})", style="cyan")
        console.print(line)
        for key, value in (summary or {}).items():
            console.print(Text(f"  {key}: {value:.4g}", style="yellow"))
