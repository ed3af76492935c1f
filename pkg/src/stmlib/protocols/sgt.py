"""Serialization graph testing.

Transactions are nodes in a conflict graph.  Reads draw edges from the
committed writers of the object, commits draw edges from its readers
and writers, and begins draw real-time edges from every transaction
already committed.  An operation that would close a cycle aborts its
transaction instead.

Every graph mutation, the matching store access and the history record
for it happen under one graph lock.  Admitting an operation under the
lock but letting its effect land later would let two admissions take
effect in the opposite order, and the graph would certify an execution
that never happened.

Committed nodes cannot be dropped immediately: a transaction that
overlapped one may still pick up an edge through it.  Each commit
therefore snapshots the live set, and the collector frees a committed
node once everybody in that snapshot has terminated.
"""

from __future__ import annotations

import threading

from .._kernels import graph_has_cycle, node_on_cycle
from ..errors import AbortReason, NotFound
from .base import BackendBase, ProtocolRefused

_LIVE = 0
_COMMITTED = 1


def detect_cycle(adj, start=None):
    """Cycle test over an adjacency map, from one node or anywhere."""
    if start is None:
        return graph_has_cycle(adj)
    return node_on_cycle(adj, start)


class _Entry:
    __slots__ = ("value", "writer_ts", "readers", "writers")

    def __init__(self, value, writer_ts=0):
        self.value = value
        self.writer_ts = writer_ts
        self.readers: set[int] = set()  # graph-resident txns that read it
        self.writers: set[int] = set()  # graph-resident committed writers

    def meta(self):
        return {
            "value": self.value,
            "writer_ts": self.writer_ts,
            "readers": sorted(self.readers),
            "writers": sorted(self.writers),
        }


class SgtBackend(BackendBase):
    name = "sgt"
    default_gc_period = 1  # stale committed nodes tax every cycle check

    def __init__(self):
        super().__init__()
        self._glock = threading.Lock()
        self._store: dict[int, _Entry] = {}
        self._out: dict[int, set[int]] = {}
        self._in: dict[int, set[int]] = {}
        self._status: dict[int, int] = {}
        self._watch: dict[int, set[int]] = {}  # committed ts -> live overlap
        self._reads_of: dict[int, set[int]] = {}
        self._writes_of: dict[int, set[int]] = {}

    # -- engine hooks -------------------------------------------------

    def on_begin(self, txn):
        ts = txn.ts
        with self._glock:
            self._out[ts] = set()
            self._in[ts] = set()
            self._reads_of[ts] = set()
            for node, status in self._status.items():
                if status == _COMMITTED:
                    self._add_edge(node, ts)
            self._status[ts] = _LIVE

    def on_read(self, txn, oid: int):
        ts = txn.ts
        with self._glock:
            entry = self._store.get(oid)
            if entry is None:
                raise NotFound(f"object {oid}")
            for writer in entry.writers:
                if writer != ts:
                    self._add_edge(writer, ts)
            if node_on_cycle(self._out, ts):
                self._drop_node(ts)
                raise ProtocolRefused(AbortReason.CYCLE_DETECTED)
            entry.readers.add(ts)
            self._reads_of[ts].add(oid)
            rec = self._recorder()
            if rec is not None:
                rec.record_read(ts, oid, entry.writer_ts)
            return entry.value

    def commit(self, txn):
        ts = txn.ts
        with self._glock:
            for oid in txn.write_set:
                entry = self._store.get(oid)
                if entry is None:
                    continue  # fresh object, no conflicts possible
                for reader in entry.readers:
                    if reader != ts:
                        self._add_edge(reader, ts)
                for writer in entry.writers:
                    if writer != ts:
                        self._add_edge(writer, ts)
            if node_on_cycle(self._out, ts):
                self._drop_node(ts)
                return AbortReason.CYCLE_DETECTED
            writes = self._writes_of.setdefault(ts, set())
            for oid, value in txn.write_set.items():
                entry = self._store.get(oid)
                if entry is None:
                    entry = _Entry(value)
                    self._store[oid] = entry
                entry.value = value
                entry.writer_ts = ts
                entry.writers.add(ts)
                writes.add(oid)
            self._status[ts] = _COMMITTED
            for overlap in self._watch.values():
                overlap.discard(ts)
            self._watch[ts] = {
                t for t, status in self._status.items() if status == _LIVE
            }
            rec = self._recorder()
            if rec is not None:
                rec.record_commit(ts)
            return None

    def on_abort(self, txn):
        with self._glock:
            if txn.ts in self._status or txn.ts in self._out:
                self._drop_node(txn.ts)

    # -- graph maintenance --------------------------------------------

    def _add_edge(self, a: int, b: int):
        self._out[a].add(b)
        self._in[b].add(a)

    def _drop_node(self, ts: int):
        """Remove a live or aborting node and tell the watchers."""
        self._unlink(ts)
        for overlap in self._watch.values():
            overlap.discard(ts)

    def _unlink(self, ts: int):
        for pred in self._in.pop(ts, ()):
            self._out[pred].discard(ts)
        for succ in self._out.pop(ts, ()):
            self._in[succ].discard(ts)
        self._status.pop(ts, None)
        for oid in self._reads_of.pop(ts, ()):
            entry = self._store.get(oid)
            if entry is not None:
                entry.readers.discard(ts)
        for oid in self._writes_of.pop(ts, ()):
            entry = self._store.get(oid)
            if entry is not None:
                entry.writers.discard(ts)

    def collect(self, min_active_ts: int) -> int:
        with self._glock:
            done = [ts for ts, overlap in self._watch.items() if not overlap]
            for ts in done:
                del self._watch[ts]
                self._unlink(ts)
            return len(done)

    # -- store access -------------------------------------------------

    def seed(self, oid: int, value):
        with self._glock:
            self._store[oid] = _Entry(value)

    def read_committed(self, oid: int):
        with self._glock:
            entry = self._store.get(oid)
            if entry is None:
                raise NotFound(f"object {oid}")
            return entry.value

    def object_count(self) -> int:
        with self._glock:
            return len(self._store)

    def object_meta(self, oid: int) -> dict:
        with self._glock:
            entry = self._store.get(oid)
            if entry is None:
                raise NotFound(f"object {oid}")
            return entry.meta()

    # -- introspection ------------------------------------------------

    def graph_size(self) -> int:
        with self._glock:
            return len(self._status)

    def graph_snapshot(self) -> dict[int, list[int]]:
        with self._glock:
            return {ts: sorted(succ) for ts, succ in self._out.items()}
