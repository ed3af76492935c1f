"""Pure-Python admission-path kernels.

Reference implementations of the two hot loops: directed-cycle checks
over transaction adjacency maps and version selection over sorted stamp
lists.  stmlib._kernels._ckernels provides compiled equivalents with the
same signatures.
"""

from bisect import bisect_left

BACKEND = "py"


def version_index(stamps, ts):
    """Index of the newest stamp strictly below ts, or -1 if none.

    stamps must be sorted ascending with no duplicates.
    """
    return bisect_left(stamps, ts) - 1


def node_on_cycle(adj, start):
    """True if start can reach itself through at least one edge.

    adj maps node -> iterable of successor nodes; nodes absent from adj
    have no successors.
    """
    stack = list(adj.get(start, ()))
    seen = set()
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


def graph_has_cycle(adj):
    """True if the directed graph given as an adjacency map has a cycle."""
    # Iterative three-color DFS; nodes only ever appearing as targets
    # have no successors and cannot close a cycle on their own.
    color = {}  # 1 = on the current path, 2 = finished
    for root in adj:
        if root in color:
            continue
        color[root] = 1
        stack = [(root, iter(adj.get(root, ())))]
        while stack:
            node, succ = stack[-1]
            advanced = False
            for child in succ:
                c = color.get(child, 0)
                if c == 1:
                    return True
                if c == 0:
                    color[child] = 1
                    stack.append((child, iter(adj.get(child, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return False
