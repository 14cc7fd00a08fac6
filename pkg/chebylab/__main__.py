"""Entry point for python -m chebylab."""

from chebylab.cli import app

if __name__ == "__main__":
    app()
