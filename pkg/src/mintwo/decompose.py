"""Sheet decomposition of two-valued grids and branch detection by monodromy.

Labelling walks the grid breadth-first, matching the two values of adjacent
nodes by the pairing of smaller metric; the matching is provably unambiguous
wherever the two values are separated by more than twice the Lipschitz
constant times the spacing, so nodes below that separation are excluded.
A loop whose composed matchings swap the sheets certifies a branch point in
the region it encloses.
"""

from collections import deque

import numpy as np

from .twovalued import lipschitz_estimate


class SheetLabelling:
    """Result of label propagation.

    labels: int array over the grid; -9 unlabelled, -1 excluded,
    0 = storage order, 1 = swapped order relative to the canonical arrays.
    components: connected-component ids (-1 off-domain).  conflicts: nodes
    that received contradictory labels (monodromy witnesses).
    """

    def __init__(self, grid, labels, components, conflicts, branch_points,
                 exclusion):
        self.grid = grid
        self.labels = labels
        self.components = components
        self.conflicts = conflicts
        self.branch_points = branch_points
        self.exclusion = exclusion
        self.decomposed = len(conflicts) == 0

    def sheets(self):
        """The two single-valued selections on labelled nodes (NaN off)."""
        f = self.grid
        s1 = np.full(f.a1.shape, np.nan)
        s2 = np.full(f.a2.shape, np.nan)
        lab0 = self.labels == 0
        lab1 = self.labels == 1
        s1[lab0], s2[lab0] = f.a1[lab0], f.a2[lab0]
        s1[lab1], s2[lab1] = f.a2[lab1], f.a1[lab1]
        return s1, s2

    def exclusion_volume(self):
        """n-volume of the excluded node set (reported, not hidden)."""
        return float(self.exclusion.sum()) * self.grid.h ** self.grid.n


def detect_doubles(f, tol=None, lipschitz=None):
    """Mask of nodes where the two values are closer than ``tol``.

    Defaults tol to twice the Lipschitz estimate times the spacing, the
    smallest separation at which adjacent-node matching is unambiguous.
    """
    if lipschitz is None:
        lipschitz = lipschitz_estimate(f)
    floor = 2.0 * lipschitz * f.h
    if tol is None:
        tol = floor
    if tol < floor - 1e-12:
        raise ValueError("tol below the matching-ambiguity floor 2 L h")
    return f.mask & (f.separation() < tol)


def _inflate(mask):
    out = mask.copy()
    n = mask.ndim
    for ax in range(n):
        lo = [slice(None)] * n
        hi = [slice(None)] * n
        lo[ax] = slice(None, -1)
        hi[ax] = slice(1, None)
        out[tuple(lo)] |= mask[tuple(hi)]
        out[tuple(hi)] |= mask[tuple(lo)]
    return out


def _match_is_straight(f, idx_a, idx_b):
    """True if the straight pairing of values at two nodes is the closer."""
    a1, a2 = f.a1[idx_a], f.a2[idx_a]
    b1, b2 = f.a1[idx_b], f.a2[idx_b]
    straight = np.linalg.norm(a1 - b1) + np.linalg.norm(a2 - b2)
    crossed = np.linalg.norm(a1 - b2) + np.linalg.norm(a2 - b1)
    return straight <= crossed


def propagate_labels(f, exclusion=None, seed_node=None, lipschitz=None):
    """Breadth-first sheet labelling on the complement of the exclusion set.

    Each connected component gets labels from the matching of adjacent
    values; contradictory arrivals are recorded as conflicts (monodromy
    witnesses) and decomposed is true only without conflicts.
    """
    if lipschitz is None:
        lipschitz = lipschitz_estimate(f)
    if exclusion is None:
        exclusion = _inflate(detect_doubles(f, lipschitz=lipschitz))
    doubles = detect_doubles(f, lipschitz=lipschitz)
    if np.any(doubles & ~exclusion):
        raise ValueError("exclusion set must cover all near-double nodes")
    admissible = f.mask & ~exclusion
    labels = np.full(f.dims, -9, dtype=int)
    labels[exclusion & f.mask] = -1
    components = np.full(f.dims, -1, dtype=int)
    conflicts = []
    dims = f.dims
    n = f.n

    def neighbors(idx):
        for ax in range(n):
            for step in (-1, 1):
                j = list(idx)
                j[ax] += step
                if 0 <= j[ax] < dims[ax]:
                    yield tuple(j)

    order = [tuple(i) for i in np.argwhere(admissible)]
    if seed_node is not None:
        seed_node = tuple(seed_node)
        order = [seed_node] + [i for i in order if i != seed_node]
    comp = 0
    for start in order:
        if components[start] >= 0 or not admissible[start]:
            continue
        labels[start] = 0
        components[start] = comp
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            for nb in neighbors(cur):
                if not admissible[nb]:
                    continue
                flip = 0 if _match_is_straight(f, cur, nb) else 1
                lab = labels[cur] ^ flip
                if components[nb] < 0:
                    labels[nb] = lab
                    components[nb] = comp
                    queue.append(nb)
                elif labels[nb] != lab:
                    conflicts.append(nb)
        comp += 1
    branch_points = _responsible_clusters(f, doubles, conflicts)
    return SheetLabelling(f, labels, components, conflicts, branch_points,
                          exclusion & f.mask)


def _responsible_clusters(f, doubles, conflicts):
    """Double-point coordinates of the clusters nearest to conflicts."""
    if not conflicts or not doubles.any():
        return np.zeros((0, f.n))
    dbl = np.argwhere(doubles)
    out = set()
    for c in conflicts:
        dist = np.abs(dbl - np.array(c)).max(axis=1)
        out.add(int(dist.argmin()))
    return f.coords[tuple(dbl[sorted(out)].T)]


def monodromy_test(f, loop, lipschitz=None):
    """Sheet permutation from composing matchings around a closed loop.

    ``loop`` is an ordered cycle of grid multi-indices with consecutive
    nodes lattice-adjacent (the closing edge is implicit).  Returns
    "trivial" or "swap".  Any node with value separation at most 2 L h
    makes the matching ambiguous and raises.
    """
    if lipschitz is None:
        lipschitz = lipschitz_estimate(f)
    floor = 2.0 * lipschitz * f.h
    loop = [tuple(i) for i in loop]
    if loop[0] == loop[-1]:
        loop = loop[:-1]
    if len(loop) < 4:
        raise ValueError("loop too short")
    sep = f.separation()
    flips = 0
    for a, b in zip(loop, loop[1:] + [loop[0]]):
        if sum(abs(x - y) for x, y in zip(a, b)) != 1:
            raise ValueError("loop nodes %s -> %s are not adjacent"
                             % (a, b))
        if sep[a] <= floor or sep[b] <= floor:
            raise ValueError("ambiguous matching: separation below 2 L h "
                             "on the loop")
        if not _match_is_straight(f, a, b):
            flips ^= 1
    return "swap" if flips else "trivial"


def ring_loop(f, center_index, r):
    """Ordered square ring of lattice nodes around a center (2-d grids).

    Chebyshev-radius-r ring traversed once; a convenient monodromy loop.
    """
    if f.n != 2:
        raise ValueError("ring loops are built for 2-d grids")
    ci, cj = center_index
    top = [(ci - r, cj + t) for t in range(-r, r)]
    right = [(ci + t, cj + r) for t in range(-r, r)]
    bottom = [(ci + r, cj - t) for t in range(-r, r)]
    left = [(ci - t, cj - r) for t in range(-r, r)]
    loop = top + right + bottom + left
    for i, j in loop:
        if not (0 <= i < f.dims[0] and 0 <= j < f.dims[1]):
            raise ValueError("ring leaves the grid")
    return loop
