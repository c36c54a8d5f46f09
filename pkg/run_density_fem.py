#!/usr/bin/env python3
"""Command-line runner for the density-dependent elasticity solver."""

from src.main import main

if __name__ == "__main__":
    exit(main())
