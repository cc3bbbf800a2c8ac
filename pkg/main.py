from __future__ import annotations

import sys

from dotenv import load_dotenv

from src.cli.commands import main as run_cli


def main():
    if len(sys.argv) < 2:
        print("\nUsage: uv run main.py <command> [flags]")
        print("Commands: solve, stability, condition, tables, convergence, constant-check, analyze")
        sys.exit(0)

    load_dotenv()
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
