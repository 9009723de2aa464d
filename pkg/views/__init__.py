"""
Views package: the command-line surface
"""
from views.main_cli import build_parser, main

__all__ = [
    'build_parser',
    'main'
]
