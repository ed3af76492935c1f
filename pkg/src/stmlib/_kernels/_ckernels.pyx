# cython: language_level=3, boundscheck=False
"""Compiled admission-path kernels.

Drop-in replacements for stmlib._kernels.pykernels, selected at import
time when this extension was built.
"""

BACKEND = "c"


def version_index(list stamps, ts):
    """Index of the newest stamp strictly below ts, or -1 if none."""
    cdef Py_ssize_t lo = 0, hi = len(stamps), mid
    cdef long long target = ts
    cdef long long v
    while lo < hi:
        mid = (lo + hi) // 2
        v = stamps[mid]
        if v < target:
            lo = mid + 1
        else:
            hi = mid
    return lo - 1


def node_on_cycle(dict adj, start):
    """True if start can reach itself through at least one edge."""
    succ = adj.get(start)
    if succ is None:
        return False
    cdef list stack = list(succ)
    cdef set seen = set()
    while stack:
        node = stack.pop()
        if node == start:
            return True
        if node in seen:
            continue
        seen.add(node)
        succ = adj.get(node)
        if succ:
            stack.extend(succ)
    return False


def graph_has_cycle(dict adj):
    """True if the directed graph given as an adjacency map has a cycle."""
    cdef dict color = {}  # 1 = on the current path, 2 = finished
    cdef list stack, succ, frame
    cdef Py_ssize_t idx, n
    cdef int c
    for root in adj:
        if root in color:
            continue
        color[root] = 1
        stack = [[root, list(adj.get(root, ())), 0]]
        while stack:
            frame = stack[-1]
            succ = frame[1]
            idx = frame[2]
            n = len(succ)
            advanced = False
            while idx < n:
                child = succ[idx]
                idx += 1
                c = color.get(child, 0)
                if c == 1:
                    return True
                if c == 0:
                    frame[2] = idx
                    color[child] = 1
                    stack.append([child, list(adj.get(child, ())), 0])
                    advanced = True
                    break
            if not advanced:
                color[frame[0]] = 2
                stack.pop()
    return False
