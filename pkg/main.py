"""dev entry point: `python main.py` is `spherex serve` on all interfaces."""

import sys

from src.app.cli import main

if __name__ == "__main__":
    sys.exit(main(["serve", "--host", "0.0.0.0", *sys.argv[1:]]))
