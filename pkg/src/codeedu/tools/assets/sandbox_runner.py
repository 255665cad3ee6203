"""Guest-side runner. Executed with -I inside the sandboxed child process.

Applies resource limits, drops network access, confines writes to the
scratch directory, then runs the student source as __main__. Config comes
from CODEEDU_SANDBOX_* environment variables set by the host.
"""

import ctypes
import os
import resource
import runpy
import sys
import traceback

CLONE_NEWNET = 0x40000000

SCRATCH = os.path.realpath(os.environ.get("CODEEDU_SANDBOX_SCRATCH", os.getcwd()))
ALLOW_NET = os.environ.get("CODEEDU_SANDBOX_NET") == "1"

NET_EVENTS = {
    "socket.__new__",
    "socket.connect",
    "socket.bind",
    "socket.sendto",
    "socket.sendmsg",
    "socket.getaddrinfo",
    "socket.gethostbyname",
}
SPAWN_EVENTS = {"os.system", "os.exec", "os.spawn", "os.posix_spawn", "os.fork", "os.forkpty", "subprocess.Popen"}
WRITE_MODE_CHARS = set("wax+")
WRITE_FLAGS = os.O_WRONLY | os.O_RDWR | os.O_APPEND | os.O_CREAT | os.O_TRUNC


def apply_limits():
    mem = int(os.environ.get("CODEEDU_SANDBOX_MEM", str(256 * 1024 * 1024)))
    cpu = int(os.environ.get("CODEEDU_SANDBOX_CPU", "30"))
    resource.setrlimit(resource.RLIMIT_AS, (mem, mem))
    resource.setrlimit(resource.RLIMIT_CPU, (cpu, cpu + 1))
    resource.setrlimit(resource.RLIMIT_FSIZE, (16 * 1024 * 1024, 16 * 1024 * 1024))


def drop_network():
    # Best effort: a fresh network namespace needs privileges; the audit
    # hook below is the portable enforcement layer.
    try:
        libc = ctypes.CDLL(None, use_errno=True)
        libc.unshare(CLONE_NEWNET)
    except Exception:
        pass


def _is_write(mode, flags):
    if isinstance(mode, str) and WRITE_MODE_CHARS & set(mode):
        return True
    return bool(isinstance(flags, int) and flags & WRITE_FLAGS)


def _inside_scratch(path):
    if isinstance(path, int):
        return True  # fd-relative; the fd was vetted when opened
    if isinstance(path, bytes):
        path = path.decode(errors="replace")
    if path == os.devnull:
        return True
    full = os.path.join(os.path.realpath(os.path.dirname(os.path.abspath(path))), os.path.basename(path))
    return full == SCRATCH or full.startswith(SCRATCH + os.sep)


def guard(event, args):
    if not ALLOW_NET and event in NET_EVENTS:
        raise RuntimeError("sandbox: network access is disabled")
    if event in SPAWN_EVENTS:
        raise RuntimeError("sandbox: spawning processes is disabled")
    if event == "open":
        path, mode, flags = args
        if _is_write(mode, flags) and not _inside_scratch(path):
            raise RuntimeError("sandbox: write outside the scratch directory: %r" % (path,))


def main():
    source = sys.argv[1]
    apply_limits()
    if not ALLOW_NET:
        drop_network()
    sys.addaudithook(guard)
    try:
        runpy.run_path(source, run_name="__main__")
    except SystemExit:
        raise
    except MemoryError:
        sys.stderr.write("MemoryError\n")
        sys.exit(137)
    except BaseException:
        traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()
