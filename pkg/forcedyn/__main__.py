"""Allow ``python -m forcedyn``."""

from .experiments.cli import main

if __name__ == "__main__":
    main()
