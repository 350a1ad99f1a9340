"""Allow `python -m nashpoly`."""

import sys

from nashpoly.cli.main import main

if __name__ == '__main__':
    sys.exit(main())
