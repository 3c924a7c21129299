"""Commands package for the CBFIRL CLI."""

from .command_handler import CommandHandler

__all__ = ["CommandHandler"]
