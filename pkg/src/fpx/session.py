"""The ambient tracking session: ledger + injector + trace provider.

Operator overloads on tracked scalars need a place to send events, so one
session is always current. The default session logs everything, never injects,
and captures native stack traces. Sessions are shareable across threads; the
ledger and injector synchronize internally.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field

from .injector import Injector
from .ledger import Ledger, LedgerConfig
from .traces import ExplicitContextProvider, NativeTraceProvider


@dataclass
class TrackerSession:
    ledger: Ledger = field(default_factory=Ledger)
    injector: Injector = field(default_factory=Injector.off)
    traces: object = field(default_factory=NativeTraceProvider)


def explicit_session(ledger_config: LedgerConfig | None = None,
                     injector: Injector | None = None) -> TrackerSession:
    """A fresh session with deterministic explicit-scope traces (test/demo substrate)."""
    return TrackerSession(
        ledger=Ledger(ledger_config),
        injector=injector or Injector.off(),
        traces=ExplicitContextProvider(),
    )


_current = TrackerSession()


def current_session() -> TrackerSession:
    return _current


def set_session(session: TrackerSession) -> TrackerSession:
    """Install a session globally; returns the one it replaced."""
    global _current
    previous = _current
    _current = session
    return previous


@contextmanager
def use_session(session: TrackerSession):
    previous = set_session(session)
    try:
        yield session
    finally:
        set_session(previous)
