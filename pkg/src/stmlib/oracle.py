"""Run histories and the conflict-serializability checker.

The engine appends one event per shared-memory effect to a
HistoryRecorder: first reads (with the writer stamp they observed),
write intents, commits and aborts.  After a run terminates, the
recorded history can be checked for conflict-serializability, which
yields a witness order over the committed transactions, and that
witness can be replayed at the set-operation level to confirm the run
is equivalent to a sequential execution.

Transaction ids equal transaction timestamps throughout; each retry of
a set operation is a fresh transaction with a fresh stamp.

Trace files persist one event per line as space-separated decimal
integers, `seq txn ts kind oid [version_ts]`, with kind encoded as
0=read, 1=write-intent, 2=commit, 3=abort and oid 0 where an event has
no object.  Lines starting with `#` are metadata or comments.
"""

from __future__ import annotations

import heapq
import threading
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import IncompleteHistory, WitnessInvalid

READ = 0
WRITE = 1
COMMIT = 2
ABORT = 3

_KIND_NAMES = {READ: "read", WRITE: "write", COMMIT: "commit", ABORT: "abort"}


class Event(NamedTuple):
    seq: int
    txn: int
    ts: int
    kind: int
    oid: int
    version_ts: int | None


class OpRecord(NamedTuple):
    """Outcome of one committed set-level operation."""

    kind: str  # add | remove | contains | snapshot
    key: int | None
    applied: bool
    payload: tuple | None  # snapshot contents, when kind == "snapshot"


@dataclass
class History:
    events: list[Event] = field(default_factory=list)
    set_ops: dict[int, OpRecord] = field(default_factory=dict)
    protocol: str | None = None
    final_snapshot: list[int] | None = None

    @property
    def multiversion(self) -> bool:
        return self.protocol == "mvto"

    def committed_txns(self) -> set[int]:
        return {e.txn for e in self.events if e.kind == COMMIT}


@dataclass
class Verdict:
    serializable: bool
    witness: list[int] | None = None
    cycle: list[int] | None = None


class HistoryRecorder:
    """Thread-safe append-only event log.

    A disabled recorder turns every record call into an immediate
    return so timing runs pay nothing beyond the flag check.
    """

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self.protocol: str | None = None
        self._lock = threading.Lock()
        self._events: list[Event] = []
        self._set_ops: dict[int, OpRecord] = {}
        self._seq = 0

    def _append(self, txn, kind, oid, version_ts):
        with self._lock:
            self._seq += 1
            self._events.append(Event(self._seq, txn, txn, kind, oid, version_ts))

    def record_read(self, txn: int, oid: int, observed_ts: int):
        if self.enabled:
            self._append(txn, READ, oid, observed_ts)

    def record_write_intent(self, txn: int, oid: int):
        if self.enabled:
            self._append(txn, WRITE, oid, None)

    def record_commit(self, txn: int):
        if self.enabled:
            self._append(txn, COMMIT, 0, None)

    def record_abort(self, txn: int):
        if self.enabled:
            self._append(txn, ABORT, 0, None)

    def note_set_op(self, txn: int, kind: str, key, applied: bool, payload=None):
        if self.enabled:
            with self._lock:
                self._set_ops[txn] = OpRecord(kind, key, applied, payload)

    def __len__(self):
        return len(self._events)

    def history(self) -> History:
        with self._lock:
            return History(
                events=list(self._events),
                set_ops=dict(self._set_ops),
                protocol=self.protocol,
            )


def _require_complete(history: History):
    terminated = set()
    touched = set()
    for e in history.events:
        if e.kind in (COMMIT, ABORT):
            terminated.add(e.txn)
        else:
            touched.add(e.txn)
    hanging = touched - terminated
    if hanging:
        raise IncompleteHistory(f"{len(hanging)} transaction(s) never terminated")


def _single_version_edges(history: History, committed: set[int]):
    """Precedence edges for a single-version history.

    Read effects are ordered at their read seq, write effects at their
    writer's commit seq.  Emitting only consecutive write-write edges
    plus each read's nearest enclosing writes keeps the edge count
    linear while preserving reachability, and therefore cycles and
    topological orders, of the full conflict relation.
    """
    commit_seq = {
        e.txn: e.seq for e in history.events if e.kind == COMMIT and e.txn in committed
    }
    reads: dict[int, list[tuple[int, int]]] = {}  # oid -> [(seq, txn)]
    writers: dict[int, set[int]] = {}  # oid -> committed writer txns
    for e in history.events:
        if e.txn not in committed:
            continue
        if e.kind == READ:
            reads.setdefault(e.oid, []).append((e.seq, e.txn))
        elif e.kind == WRITE:
            writers.setdefault(e.oid, set()).add(e.txn)

    edges: set[tuple[int, int]] = set()
    for oid in set(reads) | set(writers):
        ws = sorted(((commit_seq[t], t) for t in writers.get(oid, ())))
        for (_, a), (_, b) in zip(ws, ws[1:]):
            edges.add((a, b))
        if not ws:
            continue
        wseqs = [s for s, _ in ws]
        for rseq, reader in reads.get(oid, ()):
            i = bisect_left(wseqs, rseq)
            # A transaction's own write commits after its reads, so the
            # preceding write can never be the reader's.
            if i > 0:
                edges.add((ws[i - 1][1], reader))
            if i < len(ws) and ws[i][1] != reader:
                edges.add((reader, ws[i][1]))
    return edges


def _multiversion_edges(history: History, committed: set[int]):
    """Precedence edges for a multiversion history.

    Version order is writer-timestamp order.  Each read contributes a
    reads-from edge from the version it observed plus an edge to the
    next committed writer in version order, which chains to the rest.
    """
    reads: dict[int, list[tuple[int, int]]] = {}  # oid -> [(version_ts, reader)]
    writers: dict[int, set[int]] = {}
    for e in history.events:
        if e.txn not in committed:
            continue
        if e.kind == READ:
            reads.setdefault(e.oid, []).append((e.version_ts, e.txn))
        elif e.kind == WRITE:
            writers.setdefault(e.oid, set()).add(e.txn)

    edges: set[tuple[int, int]] = set()
    for oid in set(reads) | set(writers):
        ws = sorted(writers.get(oid, ()))  # txn id == ts, ascending version order
        for a, b in zip(ws, ws[1:]):
            edges.add((a, b))
        for version_ts, reader in reads.get(oid, ()):
            if version_ts and version_ts in writers.get(oid, ()):
                edges.add((version_ts, reader))
            i = bisect_left(ws, version_ts + 1)
            if i < len(ws) and ws[i] != reader:
                edges.add((reader, ws[i]))
    return edges


def _topo_order(nodes: set[int], edges: set[tuple[int, int]]):
    """Timestamp-preferring topological order, or None if cyclic."""
    succ: dict[int, list[int]] = {n: [] for n in nodes}
    indeg = {n: 0 for n in nodes}
    for a, b in edges:
        succ[a].append(b)
        indeg[b] += 1
    ready = [n for n in nodes if indeg[n] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        n = heapq.heappop(ready)
        order.append(n)
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(ready, m)
    if len(order) != len(nodes):
        return None
    return order


def _find_cycle(nodes: set[int], edges: set[tuple[int, int]]):
    """One directed cycle from a graph known to contain at least one."""
    succ: dict[int, list[int]] = {n: [] for n in nodes}
    indeg = {n: 0 for n in nodes}
    for a, b in edges:
        succ[a].append(b)
        indeg[b] += 1
    ready = [n for n in nodes if indeg[n] == 0]
    remaining = set(nodes)
    while ready:
        n = ready.pop()
        remaining.discard(n)
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                ready.append(m)
    # Every remaining node has an in-edge from remaining; walk backward
    # until a node repeats, then cut the walk down to the loop.
    pred: dict[int, int] = {}
    for a, b in edges:
        if a in remaining and b in remaining:
            pred[b] = a
    node = next(iter(remaining))
    seen = {}
    walk = []
    while node not in seen:
        seen[node] = len(walk)
        walk.append(node)
        node = pred[node]
    cycle = walk[seen[node] :]
    cycle.reverse()
    return cycle


def check_conflict_serializability(
    history: History, *, multiversion: bool | None = None
) -> Verdict:
    """Decide whether the committed part of a history is serializable.

    Aborted transactions never published an effect and are ignored.
    With multiversion=None the history's recorded protocol decides how
    read-write conflicts are ordered.
    """
    _require_complete(history)
    if multiversion is None:
        multiversion = history.multiversion
    committed = history.committed_txns()
    if multiversion:
        edges = _multiversion_edges(history, committed)
    else:
        edges = _single_version_edges(history, committed)
    order = _topo_order(committed, edges)
    if order is None:
        return Verdict(serializable=False, cycle=_find_cycle(committed, edges))
    return Verdict(serializable=True, witness=order)


def replay_check(
    history: History, witness: list[int], final_snapshot: list[int]
) -> bool:
    """Replay committed set operations serially in witness order.

    Returns True when every recorded applied/not-applied outcome and
    the final membership match the sequential reference execution.
    """
    committed = history.committed_txns()
    if set(witness) != committed or len(witness) != len(committed):
        raise WitnessInvalid("witness is not a permutation of the committed txns")
    reference: set[int] = set()
    for txn in witness:
        op = history.set_ops.get(txn)
        if op is None:
            continue
        if op.kind == "add":
            ok = op.key not in reference
            reference.add(op.key)
        elif op.kind == "remove":
            ok = op.key in reference
            reference.discard(op.key)
        elif op.kind == "contains":
            ok = op.key in reference
        elif op.kind == "snapshot":
            ok = op.payload is None or list(op.payload) == sorted(reference)
        else:
            raise WitnessInvalid(f"unknown op kind {op.kind!r}")
        if ok != op.applied:
            return False
    return sorted(reference) == list(final_snapshot)


def save_trace(history: History, path):
    with open(path, "w", encoding="ascii") as fh:
        if history.protocol:
            fh.write(f"# protocol={history.protocol}\n")
        for e in history.events:
            if e.kind == READ:
                fh.write(f"{e.seq} {e.txn} {e.ts} {e.kind} {e.oid} {e.version_ts}\n")
            else:
                fh.write(f"{e.seq} {e.txn} {e.ts} {e.kind} {e.oid}\n")


def load_trace(path) -> History:
    history = History()
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "protocol=" in line:
                    history.protocol = line.split("protocol=", 1)[1].split()[0]
                continue
            parts = [int(p) for p in line.split()]
            seq, txn, ts, kind, oid = parts[:5]
            version_ts = parts[5] if len(parts) > 5 else None
            history.events.append(Event(seq, txn, ts, kind, oid, version_ts))
    return history
