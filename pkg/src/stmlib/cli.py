"""Command line front end.

stm-bench bench: run the workload driver, optionally sweeping thread
counts, and emit CSV/plot/trace artifacts.

stm-bench check: run the serializability oracle over a saved trace.

stm-bench kernelbench: time the compiled admission kernels against the
pure-Python references.
"""

from __future__ import annotations

import argparse
import random
import sys
import time

from .bench import BenchConfig, emit_report, run_benchmark
from .errors import ConfigInvalid
from .oracle import check_conflict_serializability, load_trace, save_trace


def _parse_threads(text: str) -> list[int]:
    """N, comma list, or LO:HI:STEP sweep."""
    if "," in text:
        return [int(part) for part in text.split(",")]
    if ":" in text:
        parts = [int(part) for part in text.split(":")]
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("sweep must be LO:HI:STEP")
        lo, hi, step = parts
        if step < 1 or lo > hi:
            raise argparse.ArgumentTypeError("bad sweep bounds")
        return list(range(lo, hi + 1, step))
    return [int(text)]


def _parse_key_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("key range must be LO:HI") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stm-bench")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run the set workload")
    bench.add_argument("--protocol", required=True, choices=["bto", "sgt", "mvto"])
    bench.add_argument("--threads", type=_parse_threads, default=[1],
                       metavar="N|A:B:S|N1,N2,...")
    group = bench.add_mutually_exclusive_group(required=True)
    group.add_argument("--ops", type=int, help="operations per thread")
    group.add_argument("--duration", type=float, help="seconds per run")
    bench.add_argument("--update-rate", type=float, default=0.7)
    bench.add_argument("--key-range", type=_parse_key_range, default=(1, 1024),
                       metavar="LO:HI")
    bench.add_argument("--fill", type=float, default=0.5)
    bench.add_argument("--seed", type=int, default=1)
    bench.add_argument("--record-history", action="store_true")
    bench.add_argument("--csv", metavar="PATH")
    bench.add_argument("--plot", metavar="PATH")
    bench.add_argument("--trace", metavar="PATH",
                       help="save the recorded history (needs --record-history)")
    bench.add_argument("--gc-period", type=int, default=None)

    check = sub.add_parser("check", help="verify a saved trace")
    check.add_argument("--trace", required=True, metavar="PATH")
    check.add_argument("--multiversion", action="store_true",
                       help="force multiversion conflict rules")

    kb = sub.add_parser("kernelbench", help="compare kernel backends")
    kb.add_argument("--iters", type=int, default=200_000)
    return parser


def cmd_bench(args) -> int:
    if args.trace and not args.record_history:
        print("--trace requires --record-history", file=sys.stderr)
        return 2
    lo, hi = args.key_range
    reports = []
    failed = False
    for n in args.threads:
        cfg = BenchConfig(
            protocol=args.protocol,
            threads=n,
            ops=args.ops,
            duration=args.duration,
            update_rate=args.update_rate,
            key_lo=lo,
            key_hi=hi,
            fill=args.fill,
            seed=args.seed,
            record_history=args.record_history,
            gc_period=args.gc_period,
        )
        report = run_benchmark(cfg)
        reports.append(report)
        cpu = report.thread_cpu_ms
        line = (
            f"{cfg.protocol} threads={n} wall={report.wall_ms:.1f}ms"
            f" proc_cpu={report.proc_cpu_ms:.1f}ms"
            f" thread_cpu_mean={sum(cpu) / len(cpu):.1f}ms"
            f" committed={report.committed} aborted={report.aborted}"
            f" abort_rate={report.abort_rate:.4f}"
            f" throughput={report.throughput_ops_s:.0f}/s"
        )
        if args.record_history:
            ok = report.serializable and report.replay_ok
            line += f" serializable={'yes' if report.serializable else 'NO'}"
            line += f" replay={'ok' if report.replay_ok else 'MISMATCH'}"
            failed = failed or not ok
        print(line)
    emit_report(reports, csv_path=args.csv, plot_path=args.plot)
    if args.trace:
        save_trace(reports[-1].history, args.trace)
    return 1 if failed else 0


def cmd_check(args) -> int:
    history = load_trace(args.trace)
    multiversion = True if args.multiversion else None
    verdict = check_conflict_serializability(history, multiversion=multiversion)
    committed = history.committed_txns()
    print(f"trace: {len(history.events)} events, {len(committed)} committed txns")
    if verdict.serializable:
        print(f"serializable: yes (witness over {len(verdict.witness)} txns)")
        return 0
    print(f"serializable: NO, cycle: {' -> '.join(map(str, verdict.cycle))}")
    return 1


def cmd_kernelbench(args) -> int:
    from ._kernels import BACKEND, pykernels

    backends = [("py", pykernels)]
    try:
        from ._kernels import _ckernels

        backends.append(("c", _ckernels))
    except ImportError:
        pass

    rng = random.Random(7)
    chains = []
    for _ in range(64):
        n = rng.randint(1, 48)
        chains.append(sorted(rng.sample(range(0, 4096), n)))
    lookups = [(rng.randrange(len(chains)), rng.randint(1, 4096))
               for _ in range(args.iters)]
    graphs = []
    for _ in range(32):
        nodes = list(range(rng.randint(8, 40)))
        adj = {n: set() for n in nodes}
        for _ in range(2 * len(nodes)):
            a, b = rng.sample(nodes, 2)
            adj[a].add(b)
        graphs.append(adj)
    probes = [(rng.randrange(len(graphs)), rng.randint(0, 7))
              for _ in range(args.iters // 20)]

    print(f"active backend: {BACKEND}")
    timings: dict[str, dict[str, float]] = {}
    for name, mod in backends:
        t0 = time.perf_counter()
        for ci, ts in lookups:
            mod.version_index(chains[ci], ts)
        t1 = time.perf_counter()
        for gi, start in probes:
            mod.node_on_cycle(graphs[gi], start)
        t2 = time.perf_counter()
        timings[name] = {"version_index": t1 - t0, "node_on_cycle": t2 - t1}
        print(f"  {name}: version_index {1000 * (t1 - t0):.1f}ms"
              f"  node_on_cycle {1000 * (t2 - t1):.1f}ms")
    if len(backends) == 2:
        for kernel in ("version_index", "node_on_cycle"):
            ratio = timings["py"][kernel] / timings["c"][kernel]
            print(f"  speedup {kernel}: {ratio:.2f}x")
    else:
        print("  compiled backend unavailable; nothing to compare")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "check":
            return cmd_check(args)
        return cmd_kernelbench(args)
    except (ConfigInvalid, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
