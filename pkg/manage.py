#!/usr/bin/env python
"""nashpoly's command-line utility."""
import os
import sys


def main():
    """Run a nashpoly command."""
    sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
    from nashpoly.cli.main import main as run

    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
