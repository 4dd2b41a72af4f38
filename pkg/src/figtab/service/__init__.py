from .app import create_app
from .store import (
    NothingToExport,
    SessionStore,
    StorageFull,
    UnknownFigure,
    UnknownSession,
)

__all__ = [
    "NothingToExport",
    "SessionStore",
    "StorageFull",
    "UnknownFigure",
    "UnknownSession",
    "create_app",
]
