"""Web editor backend: FastAPI app plus the session it manipulates."""

from .app import create_app
from .session import EditorSession, SearchMatch, SessionError

__all__ = ["create_app", "EditorSession", "SearchMatch", "SessionError"]
