"""
Main entry point for the dalpha-seeding package.

This module allows the package to be executed directly using:
python -m dalpha_seeding [command] [options]
"""

from dalpha_seeding.cli.main import app

if __name__ == "__main__":
    app()
