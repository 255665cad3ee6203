"""Isolated execution of untrusted guest code.

Each invocation gets a throwaway scratch directory and a fresh child
process started through the guest runner shim (assets/sandbox_runner.py),
which applies rlimits, drops network access and confines writes. The host
side enforces the wall clock and kills the whole process group on expiry,
so a timeout is a verdict, never a hang or an exception.
"""

from __future__ import annotations

import logging
import os
import signal
import subprocess
import sys
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

from codeedu.errors import SandboxSetupError

logger = logging.getLogger(__name__)

SHIM_PATH = Path(__file__).parent / "assets" / "sandbox_runner.py"
OUTPUT_CAP = 256 * 1024  # characters kept per stream
KILL_GRACE_SECONDS = 1.0

DEFAULT_WALL_CLOCK_SECONDS = 10.0
DEFAULT_MEMORY_BYTES = 256 * 1024 * 1024

# Resource-heavy executions run through a bounded worker pool.
_EXECUTION_SLOTS = threading.BoundedSemaphore(int(os.environ.get("CODEEDU_SANDBOX_WORKERS", "4")))


@dataclass(frozen=True)
class SandboxPolicy:
    wall_clock_limit: float = DEFAULT_WALL_CLOCK_SECONDS
    memory_limit: int = DEFAULT_MEMORY_BYTES
    network_allowed: bool = False  # stays False for anything student-authored
    writable_scope: Path | None = None  # None = fresh scratch per invocation

    def __post_init__(self) -> None:
        if self.wall_clock_limit <= 0:
            raise ValueError("wall_clock_limit must be positive")
        if self.memory_limit <= 0:
            raise ValueError("memory_limit must be positive")


@dataclass(frozen=True)
class ExecutionResult:
    stdout: str
    stderr: str
    exit_code: int | None
    wall_time_ms: float
    timed_out: bool
    memory_exceeded: bool
    scratch_dir: Path

    @property
    def ok(self) -> bool:
        return self.exit_code == 0 and not self.timed_out and not self.memory_exceeded


def _python3_command(source_path: Path) -> list[str]:
    return [sys.executable, "-I", str(SHIM_PATH), str(source_path)]

GUEST_RUNTIMES = {"python3": _python3_command}
DEFAULT_GUEST = "python3"


def make_scratch_dir(scratch_root: Path | None = None) -> Path:
    """Create the per-invocation scratch directory."""
    root = Path(scratch_root) if scratch_root else Path.cwd() / "sandbox"
    scratch = root / uuid.uuid4().hex[:12]
    try:
        scratch.mkdir(parents=True, exist_ok=False)
    except OSError as exc:
        raise SandboxSetupError(f"could not create scratch dir under {root}: {exc}") from exc
    return scratch


def execute_code(
    source: str,
    stdin_text: str = "",
    policy: SandboxPolicy | None = None,
    scratch_root: Path | None = None,
    guest: str = DEFAULT_GUEST,
) -> ExecutionResult:
    """Run guest source in a fresh sandboxed child process.

    Returns an ExecutionResult whose flags carry the verdict; guest crashes
    and timeouts are reported, not raised. Raises SandboxSetupError only
    when the sandbox itself could not be assembled.
    """
    policy = policy or SandboxPolicy()
    if guest not in GUEST_RUNTIMES:
        raise SandboxSetupError(f"unsupported guest language: {guest}")
    if not SHIM_PATH.is_file():
        raise SandboxSetupError(f"guest runner shim missing: {SHIM_PATH}")

    if policy.writable_scope is not None:
        scratch = Path(policy.writable_scope)
        try:
            scratch.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise SandboxSetupError(f"could not create scratch dir {scratch}: {exc}") from exc
    else:
        scratch = make_scratch_dir(scratch_root)

    source_path = scratch / "main.py"
    source_path.write_text(source)

    env = {
        "PATH": "/usr/bin:/bin",
        "LANG": "C.UTF-8",
        "HOME": str(scratch),
        "TMPDIR": str(scratch),
        "CODEEDU_SANDBOX_SCRATCH": str(scratch),
        "CODEEDU_SANDBOX_MEM": str(policy.memory_limit),
        "CODEEDU_SANDBOX_CPU": str(max(1, int(policy.wall_clock_limit) + 1)),
        "CODEEDU_SANDBOX_NET": "1" if policy.network_allowed else "0",
    }

    with _EXECUTION_SLOTS:
        started = time.perf_counter()
        try:
            proc = subprocess.Popen(
                GUEST_RUNTIMES[guest](source_path),
                cwd=scratch,
                env=env,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                start_new_session=True,
            )
        except OSError as exc:
            raise SandboxSetupError(f"could not start guest process: {exc}") from exc

        timed_out = False
        try:
            out, err = proc.communicate(stdin_text.encode(), timeout=policy.wall_clock_limit)
        except subprocess.TimeoutExpired:
            timed_out = True
            _kill_group(proc)
            try:
                out, err = proc.communicate(timeout=KILL_GRACE_SECONDS)
            except subprocess.TimeoutExpired:  # pragma: no cover - SIGKILL did not land
                out, err = b"", b""
        elapsed_ms = (time.perf_counter() - started) * 1000.0

    stdout = out.decode(errors="replace")[:OUTPUT_CAP]
    stderr = err.decode(errors="replace")[:OUTPUT_CAP]
    return ExecutionResult(
        stdout=stdout,
        stderr=stderr,
        exit_code=None if timed_out else proc.returncode,
        wall_time_ms=elapsed_ms,
        timed_out=timed_out,
        memory_exceeded="MemoryError" in stderr,
        scratch_dir=scratch,
    )


def _kill_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError):  # pragma: no cover - already gone
        pass
