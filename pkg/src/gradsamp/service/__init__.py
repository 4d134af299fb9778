"""FastAPI service wrapping the solver."""
from .app import app

__all__ = ["app"]
