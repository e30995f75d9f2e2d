"""HTTP service exposing the optimizer: FastAPI app plus request/response models."""

from .app import app, create_app

__all__ = ["app", "create_app"]
