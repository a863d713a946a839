"""Reference implementations that share no code with the package's fast paths."""
from collections import deque

import numpy as np

N4 = [(1, 0), (-1, 0), (0, 1), (0, -1)]
N8 = N4 + [(1, 1), (1, -1), (-1, 1), (-1, -1)]


def bfs_components(bits, adjacency):
    """List of components, each a frozenset of (i, j) cells."""
    steps = N4 if adjacency == 4 else N8
    n0, n1 = bits.shape
    seen = np.zeros_like(bits, dtype=bool)
    comps = []
    for i in range(n0):
        for j in range(n1):
            if bits[i, j] and not seen[i, j]:
                comp = set()
                queue = deque([(i, j)])
                seen[i, j] = True
                while queue:
                    a, b = queue.popleft()
                    comp.add((a, b))
                    for da, db in steps:
                        c, d = a + da, b + db
                        if 0 <= c < n0 and 0 <= d < n1 and bits[c, d] and not seen[c, d]:
                            seen[c, d] = True
                            queue.append((c, d))
                comps.append(frozenset(comp))
    return comps


def ring_cells(n):
    return {(i, j) for i in range(n) for j in range(n) if i in (0, n - 1) or j in (0, n - 1)}


def aarnes_solid_value(cells, n):
    c = (n - 1) // 2
    ring = ring_cells(n)
    meets = bool(cells & ring)
    return int(((c, c) in cells and meets) or ring <= cells)


def aarnes_oracle(bits):
    """Open-mask value from the solid decomposition: sum over components C of
    1 - sum of solid values of the components of C's complement."""
    n = bits.shape[0]
    total = 0
    for comp in bfs_components(bits, 8):
        cbits = np.zeros_like(bits, dtype=bool)
        for cell in comp:
            cbits[cell] = True
        holes = bfs_components(~cbits, 4)
        total += 1 - sum(aarnes_solid_value(k, n) for k in holes)
    return total


def naive_existential_rule(bits):
    """1 iff one component holds the center and meets the ring, or holds the whole ring.

    Right on solid sets, wrong on open sets that separate the center from the ring.
    """
    n = bits.shape[0]
    c = (n - 1) // 2
    ring = ring_cells(n)
    for comp in bfs_components(bits, 8):
        if ((c, c) in comp and comp & ring) or ring <= comp:
            return 1
    return 0
