"""
smcdma - Command-Line Entry Point

Runs the ``smcdma`` click group:

    python -m src.smcdma.main sinr --config configs/sinr_nlms.toml --seed 42
"""

from .routes.cli import cli


def main() -> None:
    cli(prog_name="smcdma")


if __name__ == "__main__":
    main()
