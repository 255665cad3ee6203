"""Workspace-confined file access.

All paths are interpreted relative to one workspace root and verified to
resolve inside it, symlinks included. Writes go through a same-directory
temp file and an atomic rename so readers never observe partial content.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from codeedu.errors import PathEscapeError, WorkspaceFileNotFoundError


class WorkspaceFiles:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root).resolve()
        self.root.mkdir(parents=True, exist_ok=True)

    def _resolve(self, path: str | Path) -> Path:
        candidate = (self.root / path).resolve() if not Path(path).is_absolute() else Path(path).resolve()
        if candidate != self.root and self.root not in candidate.parents:
            raise PathEscapeError(f"path escapes the workspace root: {path}")
        return candidate

    def read(self, path: str | Path) -> str:
        target = self._resolve(path)
        if not target.is_file():
            raise WorkspaceFileNotFoundError(f"no such workspace file: {path}")
        return target.read_text()

    def write(self, path: str | Path, content: str) -> Path:
        target = self._resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, temp_name = tempfile.mkstemp(dir=target.parent, prefix=".tmp-write-")
        try:
            with os.fdopen(fd, "w") as handle:
                handle.write(content)
            os.replace(temp_name, target)
        except BaseException:
            if os.path.exists(temp_name):
                os.unlink(temp_name)
            raise
        return target

    def exists(self, path: str | Path) -> bool:
        return self._resolve(path).is_file()


def file_io(files: WorkspaceFiles, mode: str, path: str, content: str | None = None) -> dict:
    """Tool-call entry point: mode is 'read' or 'write'."""
    if mode == "read":
        return {"path": path, "content": files.read(path)}
    if mode == "write":
        if content is None:
            raise ValueError("write mode needs content")
        written = files.write(path, content)
        return {"path": str(written.relative_to(files.root))}
    raise ValueError(f"unknown file_io mode: {mode!r}")
