"""
invot - inverse optimal transport toolkit.

Forward solvers for one-dimensional costs of the difference, recovery of
the cost from observed maps, potentials or OT values, and diagnostics for
whether the observations pin the cost down.
"""

__version__ = "0.1.0"

from .exceptions import InputError, InvotError, NumericalError  # noqa: E402

__all__ = ["InputError", "InvotError", "NumericalError", "__version__", "main"]


def main() -> None:
    from .cli import main as cli_main

    cli_main()
