"""Call-stack context for events: a deterministic explicit-scope provider and a
native interpreter-stack provider.

Traces are tuples of Frames, innermost frame first. The explicit provider is a
pure function of its per-thread scope stack, which makes logs byte-stable
across platforms; the native provider is best-effort and filters out frames
that belong to this package.
"""

from __future__ import annotations

import hashlib
import os
import sys
import threading
from contextlib import contextmanager
from typing import NamedTuple


class Frame(NamedTuple):
    function: str
    file: str
    line: int


StackTrace = tuple  # tuple[Frame, ...], innermost first

EMPTY_TRACE: StackTrace = ()
SENTINEL_FRAME = Frame("<unknown>", "<unknown>", 1)


class ScopeError(RuntimeError):
    """Raised on pop_scope with no pushed scope."""


class ExplicitContextProvider:
    """Scope stack maintained by instrumented code; one stack per thread."""

    def __init__(self):
        self._local = threading.local()

    def _stack(self) -> list:
        stack = getattr(self._local, "stack", None)
        if stack is None:
            stack = self._local.stack = []
        return stack

    def push_scope(self, function: str, file: str = "<scope>", line: int = 1) -> None:
        self._stack().append(Frame(function, file, line))

    def pop_scope(self) -> None:
        stack = self._stack()
        if not stack:
            raise ScopeError("pop_scope on an empty scope stack")
        stack.pop()

    @contextmanager
    def scope(self, function: str, file: str = "<scope>", line: int = 1):
        self.push_scope(function, file, line)
        try:
            yield
        finally:
            self.pop_scope()

    def capture(self) -> StackTrace:
        return tuple(reversed(self._stack()))


class NativeTraceProvider:
    """Map the live interpreter stack to Frames, dropping this package's own frames."""

    def __init__(self, skip_prefixes=None):
        if skip_prefixes is None:
            skip_prefixes = (os.path.dirname(os.path.abspath(__file__)),)
        self._skip = tuple(skip_prefixes)

    def capture(self) -> StackTrace:
        try:
            frame = sys._getframe(1)
            frames = []
            while frame is not None:
                path = frame.f_code.co_filename
                if not path.startswith(self._skip):
                    frames.append(Frame(frame.f_code.co_name, path, frame.f_lineno))
                frame = frame.f_back
            return tuple(frames) if frames else (SENTINEL_FRAME,)
        except Exception:
            return (SENTINEL_FRAME,)


def trace_fingerprint(trace: StackTrace) -> str:
    """Stable 64-bit hex digest of a trace; used to spot replay divergence."""
    text = "\n".join(f"{f.function}|{f.file}|{f.line}" for f in trace)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
