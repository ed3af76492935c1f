"""Shared helpers: independent oracles and history generators.

The brute-force serializability check deliberately shares no code with
stmlib.oracle: it enumerates permutations of the committed
transactions and accepts a history iff some serial order makes every
read observe exactly the writer stamp it recorded.
"""

from __future__ import annotations

import random
from collections import defaultdict
from itertools import permutations

import pytest

from stmlib.oracle import ABORT, COMMIT, READ, WRITE, Event, History

PROTOCOLS = ("bto", "sgt", "mvto")


@pytest.fixture(params=PROTOCOLS)
def protocol(request):
    return request.param


def brute_force_serializable(history: History) -> bool:
    """Permutation oracle; factorial, keep histories at <= 7 txns."""
    committed = sorted(history.committed_txns())
    assert len(committed) <= 7, "history too large for the permutation oracle"
    reads = defaultdict(list)
    writes = defaultdict(set)
    for e in history.events:
        if e.kind == READ:
            reads[e.txn].append((e.oid, e.version_ts))
        elif e.kind == WRITE:
            writes[e.txn].add(e.oid)
    for perm in permutations(committed):
        last_writer = {}
        ok = True
        for txn in perm:
            for oid, observed in reads[txn]:
                if last_writer.get(oid, 0) != observed:
                    ok = False
                    break
            if not ok:
                break
            for oid in writes[txn]:
                last_writer[oid] = txn
        if ok:
            return True
    return False


def random_single_version_history(rng: random.Random, max_txns: int = 5,
                                  n_objects: int = 3) -> History:
    """Interleave unprotected single-version transactions.

    No admission control runs, so the result may or may not be
    serializable; reads record whatever the store held at that moment
    and writes land at commit, which keeps the history well formed.
    Writes are drawn from the objects already read (no blind writes to
    shared objects), the regime where the graph checker and the
    permutation oracle provably agree.
    """
    n_txns = rng.randint(1, max_txns)
    plans = []
    for txn in range(1, n_txns + 1):
        read_oids = rng.sample(range(1, n_objects + 1),
                               rng.randint(1, n_objects))
        write_oids = [oid for oid in read_oids if rng.random() < 0.6]
        plans.append((txn, read_oids, write_oids))

    # one step list per txn: its reads in order, then its commit
    pending = {txn: [("r", oid) for oid in reads] + [("c", None)]
               for txn, reads, _ in plans}
    write_sets = {txn: set(writes) for txn, _, writes in plans}

    events = []
    seq = 0
    current_writer = defaultdict(int)  # oid -> last committed writer, 0 seeded
    alive = list(pending)
    while alive:
        txn = rng.choice(alive)
        op, oid = pending[txn].pop(0)
        seq += 1
        if op == "r":
            events.append(Event(seq, txn, txn, READ, oid, current_writer[oid]))
        else:
            for woid in sorted(write_sets[txn]):
                seq += 1
                events.append(Event(seq, txn, txn, WRITE, woid, None))
            seq += 1
            events.append(Event(seq, txn, txn, COMMIT, 0, None))
            for woid in write_sets[txn]:
                current_writer[woid] = txn
            alive.remove(txn)
    return History(events=events)


def scripted_outcomes(eng, script) -> list[str]:
    """Run (slot, action, oid) steps on an engine; label each step.

    A slot is reused by a fresh transaction once its current one
    terminates, so one script exercises many transactions.  Labels are
    "ok", "commit", or the abort reason string.
    """
    from stmlib import TransactionAborted
    from stmlib.core import TxnStatus

    txns = {}
    outcomes = []
    for slot, action, oid in script:
        txn = txns.get(slot)
        if txn is None or txn.status is not TxnStatus.LIVE:
            txn = txns[slot] = eng.begin()
        try:
            if action == "read":
                eng.read(txn, oid)
                outcomes.append("ok")
            elif action == "write":
                eng.read(txn, oid)
                eng.write(txn, oid, txn.ts)
                outcomes.append("ok")
            else:
                result = eng.commit(txn)
                outcomes.append("commit" if result.committed
                                else str(result.reason.value))
        except TransactionAborted as exc:
            outcomes.append(str(exc.reason.value))
    for txn in txns.values():
        if txn.status is TxnStatus.LIVE:
            eng.abort(txn)
    return outcomes


def random_script(rng: random.Random, steps=60, slots=4, oids=3):
    script = []
    for _ in range(steps):
        action = rng.choice(["read", "write", "write", "commit"])
        script.append((rng.randrange(slots), action, rng.randint(1, oids)))
    return script


def history_of(steps: list[tuple], protocol: str | None = None) -> History:
    """Build a history from (txn, kind, oid[, version_ts]) tuples."""
    events = []
    for seq, item in enumerate(steps, start=1):
        txn, kind = item[0], item[1]
        oid = item[2] if len(item) > 2 else 0
        version_ts = item[3] if len(item) > 3 else None
        events.append(Event(seq, txn, txn, kind, oid, version_ts))
    return History(events=events, protocol=protocol)


__all__ = [
    "ABORT",
    "COMMIT",
    "PROTOCOLS",
    "READ",
    "WRITE",
    "brute_force_serializable",
    "history_of",
    "random_script",
    "random_single_version_history",
    "scripted_outcomes",
]
