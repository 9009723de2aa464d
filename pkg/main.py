#!/usr/bin/env python
"""
Curved N-Body Toolkit - Main Entry Point
Runs the command-line interface
"""
import sys

from views.main_cli import main as run_cli


def main():
    """Main application entry point"""
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == '__main__':
    main()
