#!/usr/bin/env python
"""
Write every catalog game as a problem file.

Usage: python scripts/write_problem_files.py [OUTPUT_DIR]
"""

import os
import sys
from pathlib import Path

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from nashpoly.cli import serialize_problem
from nashpoly.games import available_games, build_game


def write_problem_files(directory):
    """Write <name>.json for each catalog game; returns the paths written."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in available_games():
        path = directory / f"{name}.json"
        path.write_text(serialize_problem(build_game(name)), encoding='utf-8')
        print(f"  ✓ {path}")
        written.append(path)
    return written


if __name__ == '__main__':
    target = sys.argv[1] if len(sys.argv) > 1 else 'problems'
    print(f"Writing problem files to {target}...")
    write_problem_files(target)
