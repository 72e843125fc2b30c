"""python -m revdoe entry point."""

import sys

from revdoe.cli_reporting import main

if __name__ == "__main__":
    sys.exit(main())
