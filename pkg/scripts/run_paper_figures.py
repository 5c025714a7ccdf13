#!/usr/bin/env python3
"""Regenerate every built-in figure dataset into out/figures/.

Equivalent to running the fig1c/fig2/fig3/fig4 subcommands in sequence;
each CSV carries the fully resolved parameter set in its metadata block.
"""

import sys

from plasmonsim.cli import main


def run():
    out = sys.argv[1] if len(sys.argv) > 1 else "out/figures"
    for command in ("fig1c", "fig2", "fig3", "fig4"):
        code = main([command, "--out", out])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
