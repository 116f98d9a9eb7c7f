"""HTTP service: FastAPI app factory and the persistent session store."""

from .app import ApiConfig, create_app
from .store import SessionStore

__all__ = ["ApiConfig", "SessionStore", "create_app"]
