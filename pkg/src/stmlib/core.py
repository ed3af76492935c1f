"""Transactional memory engine with pluggable conflict control.

The engine hands out timestamped transactions and buffers their writes
privately; nothing reaches shared state before commit.  Which reads
are admitted and which commits survive is decided by the protocol
backend (bto, sgt or mvto), each of which also owns the locking that
makes publication atomic.

Timestamps double as transaction ids.  The allocator starts at 1 so
that stamp 0 is free to mark pre-seeded initial values.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum

from .errors import AbortReason, TransactionAborted, TxnNotLive
from .protocols import make_backend
from .protocols.base import ProtocolRefused


class TxnStatus(Enum):
    LIVE = "live"
    COMMITTED = "committed"
    ABORTED = "aborted"


class Transaction:
    """Per-thread handle; never shared between threads."""

    __slots__ = ("ts", "status", "read_set", "write_set", "pstate")

    def __init__(self, ts: int):
        self.ts = ts
        self.status = TxnStatus.LIVE
        self.read_set: dict[int, object] = {}
        self.write_set: dict[int, object] = {}
        self.pstate: dict = {}  # scratch area owned by the backend

    def __repr__(self):
        return f"<Transaction ts={self.ts} {self.status.value}>"


@dataclass(frozen=True)
class CommitResult:
    committed: bool
    ts: int
    reason: AbortReason | None = None


class Engine:
    def __init__(self, protocol: str = "bto", recorder=None, gc_period: int | None = None):
        self.protocol = protocol
        self.backend = make_backend(protocol)
        self.recorder = recorder
        if recorder is not None:
            recorder.protocol = protocol
        if gc_period is None:
            gc_period = self.backend.default_gc_period
        self.gc_period = gc_period
        self._meta_lock = threading.Lock()  # guards stamps, live set, oid counter
        self._next_ts = 1
        self._next_oid = 1
        self._live: set[int] = set()
        self._commits_since_gc = 0
        self.backend.attach(self)

    # -- lifecycle ----------------------------------------------------

    def begin(self) -> Transaction:
        with self._meta_lock:
            ts = self._next_ts
            self._next_ts += 1
            self._live.add(ts)
        txn = Transaction(ts)
        self.backend.on_begin(txn)
        return txn

    def read(self, txn: Transaction, oid: int):
        self._require_live(txn)
        if oid in txn.write_set:
            return txn.write_set[oid]
        if oid in txn.read_set:
            return txn.read_set[oid]
        try:
            value = self.backend.on_read(txn, oid)
        except ProtocolRefused as refusal:
            self._retire(txn, TxnStatus.ABORTED)
            raise TransactionAborted(refusal.reason) from None
        txn.read_set[oid] = value
        return value

    def write(self, txn: Transaction, oid: int, value):
        self._require_live(txn)
        txn.write_set[oid] = value
        if self.recorder is not None:
            self.recorder.record_write_intent(txn.ts, oid)

    def commit(self, txn: Transaction) -> CommitResult:
        self._require_live(txn)
        reason = self.backend.commit(txn)
        if reason is not None:
            self._retire(txn, TxnStatus.ABORTED, backend_done=True)
            return CommitResult(False, txn.ts, reason)
        self._retire(txn, TxnStatus.COMMITTED, backend_done=True)
        self._count_commit()
        return CommitResult(True, txn.ts)

    def abort(self, txn: Transaction):
        self._require_live(txn)
        self._retire(txn, TxnStatus.ABORTED)

    def _require_live(self, txn: Transaction):
        if txn.status is not TxnStatus.LIVE:
            raise TxnNotLive(f"transaction {txn.ts} is {txn.status.value}")

    def _retire(self, txn: Transaction, status: TxnStatus, backend_done: bool = False):
        # On a commit-path exit the backend already cleaned up its own
        # state (and logged the commit inside its critical section).
        if not backend_done:
            self.backend.on_abort(txn)
        txn.status = status
        with self._meta_lock:
            self._live.discard(txn.ts)
        if status is TxnStatus.ABORTED and self.recorder is not None:
            self.recorder.record_abort(txn.ts)

    # -- objects ------------------------------------------------------

    def new_object_id(self) -> int:
        with self._meta_lock:
            oid = self._next_oid
            self._next_oid += 1
        return oid

    def seed_object(self, value) -> int:
        """Install an initial value with stamp 0, outside any transaction.

        Only valid before concurrent transactions start.
        """
        oid = self.new_object_id()
        self.backend.seed(oid, value)
        return oid

    def read_committed(self, oid: int):
        """Latest committed value, for non-transactional inspection."""
        return self.backend.read_committed(oid)

    def object_count(self) -> int:
        return self.backend.object_count()

    def object_meta(self, oid: int) -> dict:
        return self.backend.object_meta(oid)

    # -- gc -----------------------------------------------------------

    def min_active_ts(self) -> int:
        with self._meta_lock:
            return min(self._live, default=self._next_ts)

    def collect(self) -> int:
        return self.backend.collect(self.min_active_ts())

    def _count_commit(self):
        if self.gc_period is None:
            return
        run = False
        with self._meta_lock:
            self._commits_since_gc += 1
            if self._commits_since_gc >= self.gc_period:
                self._commits_since_gc = 0
                run = True
        if run:
            self.collect()
