import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import typer
from dotenv import load_dotenv
from rich.console import Console

from commands import CommandHandler
from commands.command_handler import split_assignment
from config import load_config
from errors import CbfirlError, UsageError

# Process exit codes
EXIT_OK: int = 0
EXIT_USAGE: int = 1
EXIT_RUNTIME: int = 2

load_dotenv()

app = typer.Typer(add_completion=False, no_args_is_help=True)
console = Console()
error_console = Console(stderr=True)

ConfigOption = typer.Option(None, "--config", "-c", help="key = value config file")
OutOption = typer.Option(None, "--out", "-o", help="Output directory")
SeedOption = typer.Option(None, "--seed", help="Training seed")
PresetOption = typer.Option(None, "--preset", help="racecar-8, racecar-16 or drone-32")
SetOption = typer.Option([], "--set", help="Override one config key: key=value")
QuietOption = typer.Option(False, "--quiet", "-q", help="No progress display")
CheckpointOption = typer.Option(None, "--checkpoint", help="Checkpoint to load")


def run_command(
    name: str,
    config: Optional[Path],
    out: Optional[Path],
    assignments: List[str],
    quiet: bool = False,
    overrides: Optional[Dict[str, Any]] = None,
    **options,
) -> None:
    """Merge config file, --set pairs and explicit flags, then run one command."""
    values: Dict[str, Any] = dict(split_assignment(token) for token in assignments)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if out is not None:
        values["output_dir"] = str(out)
    cfg = load_config(config, values)
    CommandHandler(console, quiet=quiet).execute(name, cfg, **options)


@app.command("gen-demos")
def gen_demos(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    preset: Optional[str] = PresetOption,
    assignments: List[str] = SetOption,
) -> None:
    """Generate expert demonstrations and potentially-dangerous states."""
    run_command("gen-demos", config, out, assignments, overrides={"seed": seed, "preset": preset})


@app.command()
def train(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    mode: Optional[str] = typer.Option(None, "--mode", help="airl or cbfirl"),
    seed: Optional[int] = SeedOption,
    preset: Optional[str] = PresetOption,
    assignments: List[str] = SetOption,
    quiet: bool = QuietOption,
) -> None:
    """Train AIRL or CBFIRL and write checkpoints plus the metrics log."""
    run_command(
        "train",
        config,
        out,
        assignments,
        quiet,
        overrides={"mode": mode, "seed": seed, "preset": preset},
    )


@app.command("eval")
def evaluate(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    checkpoint: Optional[Path] = CheckpointOption,
    episodes: Optional[int] = typer.Option(None, "--episodes", help="Evaluation episodes"),
    preset: Optional[str] = PresetOption,
    assignments: List[str] = SetOption,
) -> None:
    """Evaluate a policy checkpoint and write the metrics report."""
    run_command(
        "eval",
        config,
        out,
        assignments,
        overrides={"eval_episodes": episodes, "preset": preset},
        checkpoint=checkpoint,
    )


@app.command()
def heatmap(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    checkpoint: Optional[Path] = CheckpointOption,
    resolution: Optional[int] = typer.Option(None, "--resolution", help="Grid points per axis"),
    png: bool = typer.Option(False, "--png", help="Also render heatmap.png"),
    preset: Optional[str] = PresetOption,
    assignments: List[str] = SetOption,
) -> None:
    """Write the barrier heatmap over the arena with frozen obstacles."""
    run_command(
        "heatmap",
        config,
        out,
        assignments,
        overrides={"heatmap_resolution": resolution, "preset": preset},
        checkpoint=checkpoint,
        png=png,
    )


@app.command()
def verify(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    checkpoint: Optional[Path] = CheckpointOption,
    preset: Optional[str] = PresetOption,
    assignments: List[str] = SetOption,
) -> None:
    """Check the barrier requirements on fresh rollouts of the trained policy."""
    run_command(
        "verify", config, out, assignments, overrides={"preset": preset}, checkpoint=checkpoint
    )


@app.command()
def compare(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
    seeds: Optional[str] = typer.Option(None, "--seeds", help="Comma-separated seeds"),
    preset: Optional[str] = PresetOption,
    assignments: List[str] = SetOption,
    quiet: bool = QuietOption,
) -> None:
    """Train AIRL and CBFIRL over paired seeds and tabulate the rates."""
    run_command(
        "compare", config, out, assignments, quiet, overrides={"seeds": seeds, "preset": preset}
    )


def handle_error(message: str, hint: Optional[str] = None) -> None:
    """Print an error in red on stderr, with an optional yellow hint."""
    CommandHandler(error_console).print_error(message, hint)


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Run the CLI without exiting the interpreter.

    Returns:
        0 on success, 1 on a usage error, 2 on a runtime error
    """
    command = typer.main.get_command(app)
    try:
        command.main(args=argv, prog_name="cbfirl", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        handle_error("Aborted")
        return EXIT_RUNTIME
    except click.UsageError as e:
        handle_error(e.format_message(), "Run with --help to see the available options")
        return EXIT_USAGE
    except UsageError as e:
        handle_error(str(e), "Check the config keys in docs/configuration.md")
        return EXIT_USAGE
    except CbfirlError as e:
        handle_error(f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(cli_main())
