#!/usr/bin/env python3
"""
satpart - command-line entry point.

Usage: python main.py {encode,estimate,optimize,solve,verify} [options]
"""

import sys

from satpart.cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
