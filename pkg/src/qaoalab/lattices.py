"""Qubit lattice geometries: chains, square patches, the 10-site triangular
patch, and the cross (plus-shaped) arrays used for shallow GHZ circuits.

Sites are numbered 0..n-1.  Edges are ordered pairs (i, j) with i < j except
for periodic wrap edges, which keep their natural (last, first) orientation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

OPEN = "open"
PERIODIC = "periodic"

# Cross-array coupling classes, in the binding order used by the fixed
# GHZ parameter sets: ring (inter-arm), spoke (center-arm), arm (outer arm).
CROSS_CLASS_ORDER = ("ring", "spoke", "arm")


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeGeometry:
    n_sites: int
    edges: tuple
    boundary: str
    positions: np.ndarray | None = None
    symmetry_ops: tuple = ()
    site_classes: tuple | None = None
    kind: str = ""
    symmetry_names: tuple = ()

    def __post_init__(self):
        if self.n_sites < 1:
            raise GeometryError("need at least one site")
        for (i, j) in self.edges:
            if not (0 <= i < self.n_sites and 0 <= j < self.n_sites and i != j):
                raise GeometryError(f"edge ({i},{j}) out of range")
        eset = {frozenset(e) for e in self.edges}
        if len(eset) != len(self.edges):
            raise GeometryError("duplicate edges")
        for perm in self.symmetry_ops:
            if sorted(perm) != list(range(self.n_sites)):
                raise GeometryError("symmetry op is not a site permutation")
            mapped = {frozenset((perm[i], perm[j])) for (i, j) in self.edges}
            if mapped != eset:
                raise GeometryError("symmetry op does not map edges to edges")

    @property
    def n_edges(self):
        return len(self.edges)

    def edge_index(self):
        """Map frozenset{i, j} -> position in the edge list."""
        return {frozenset(e): k for k, e in enumerate(self.edges)}

    def to_json(self):
        doc = {
            "kind": self.kind,
            "n_sites": self.n_sites,
            "edges": [list(e) for e in self.edges],
            "boundary": self.boundary,
        }
        if self.positions is not None:
            doc["positions"] = np.asarray(self.positions).tolist()
        if self.site_classes is not None:
            doc["site_classes"] = list(self.site_classes)
        return json.dumps(doc)


def _chain(n, boundary):
    if n < 2:
        raise GeometryError("chain needs N >= 2")
    edges = [(i, i + 1) for i in range(n - 1)]
    if boundary == PERIODIC:
        edges.append((n - 1, 0))
    inversion = tuple(n - 1 - i for i in range(n))
    pos = np.array([[float(i), 0.0] for i in range(n)])
    ops = [inversion]
    names = ["inversion"]
    if boundary == PERIODIC:
        ops.append(tuple((i + 1) % n for i in range(n)))
        names.append("translation")
    return LatticeGeometry(n, tuple(edges), boundary, pos, tuple(ops), None,
                           "chain", tuple(names))


def _square(rows, cols, boundary):
    if rows < 2 or cols < 2:
        raise GeometryError("square lattice needs rows, cols >= 2")
    n = rows * cols
    idx = lambda r, c: r * cols + c
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((idx(r, c), idx(r, c + 1)))
            elif boundary == PERIODIC and cols > 2:
                edges.append((idx(r, c), idx(r, 0)))
            if r + 1 < rows:
                edges.append((idx(r, c), idx(r + 1, c)))
            elif boundary == PERIODIC and rows > 2:
                edges.append((idx(r, c), idx(0, c)))
    pos = np.array([[float(c), float(-r)] for r in range(rows) for c in range(cols)])
    inversion = tuple(idx(rows - 1 - r, cols - 1 - c)
                      for r in range(rows) for c in range(cols))
    ops = [inversion]
    names = ["inversion"]
    if rows == cols:
        ops.append(tuple(idx(c, rows - 1 - r)
                         for r in range(rows) for c in range(cols)))
        names.append("rotation90")
    return LatticeGeometry(n, tuple(edges), boundary, pos, tuple(ops), None,
                           "square", tuple(names))


# 10-site triangular patch: rows of 1, 2, 3, 4 sites.  Row r, offset c maps
# to site index r(r+1)/2 + c.  Edge list fixed by this arrangement.
def _triangular10(boundary):
    if boundary == PERIODIC:
        raise GeometryError("triangular patch supports open boundary only")
    rows = [range(0, 1), range(1, 3), range(3, 6), range(6, 10)]
    edges = []
    for r, row in enumerate(rows):
        row = list(row)
        for a, b in zip(row, row[1:]):
            edges.append((a, b))
        if r + 1 < len(rows):
            below = list(rows[r + 1])
            for k, s in enumerate(row):
                edges.append((s, below[k]))
                edges.append((s, below[k + 1]))
    pos = []
    for r, row in enumerate(rows):
        for k in range(len(list(row))):
            pos.append([k - r / 2.0, -r * np.sqrt(3.0) / 2.0])
    site_rc = [(r, c) for r, row in enumerate(rows) for c in range(len(list(row)))]
    rc_site = {rc: s for s, rc in enumerate(site_rc)}
    mirror = tuple(rc_site[(r, r - c)] for (r, c) in site_rc)
    rot120 = tuple(rc_site[(3 - r + c, 3 - r)] for (r, c) in site_rc)
    return LatticeGeometry(10, tuple(edges), OPEN, np.array(pos),
                           (mirror, rot120), None, "triangular10",
                           ("mirror", "rotation120"))


def _cross(m, boundary):
    if m < 0:
        raise GeometryError("cross arm extension m must be >= 0")
    if boundary == PERIODIC:
        raise GeometryError("cross geometry supports open boundary only")
    n = 5 + 4 * m
    site = lambda shell, arm: 1 + 4 * (shell - 1) + arm
    edges = [(0, site(1, a)) for a in range(4)]
    for shell in range(1, m + 1):
        for a in range(4):
            edges.append((site(shell, a), site(shell + 1, a)))
    dirs = np.array([[0.0, 1.0], [1.0, 0.0], [0.0, -1.0], [-1.0, 0.0]])
    pos = np.zeros((n, 2))
    for shell in range(1, m + 2):
        for a in range(4):
            pos[site(shell, a)] = shell * dirs[a]
    rot = np.arange(n)
    inv = np.arange(n)
    for shell in range(1, m + 2):
        for a in range(4):
            rot[site(shell, a)] = site(shell, (a + 1) % 4)
            inv[site(shell, a)] = site(shell, (a + 2) % 4)
    classes = ("type2",) + ("type1",) * (n - 1)
    return LatticeGeometry(n, tuple(edges), OPEN, pos,
                           (tuple(rot), tuple(inv)), classes, "cross",
                           ("rotation90", "inversion"))


def build_geometry(kind, size=None, boundary=OPEN):
    """Construct one of the supported lattices.

    kind/size: chain/N, square/(rows, cols), square4x4/None,
    triangular10/None, cross/m (N = 5 + 4m, central site 0).
    """
    if boundary not in (OPEN, PERIODIC):
        raise GeometryError(f"unknown boundary {boundary!r}")
    if kind == "chain":
        return _chain(int(size), boundary)
    if kind == "square":
        rows, cols = size
        return _square(int(rows), int(cols), boundary)
    if kind == "square4x4":
        return _square(4, 4, boundary)
    if kind == "triangular10":
        return _triangular10(boundary)
    if kind == "cross":
        return _cross(int(size), boundary)
    raise GeometryError(f"unknown lattice kind {kind!r}")


def cross_coupling_classes(m):
    """Edge classes of the cross array including the inter-arm ring.

    The plain cross geometry carries only spoke and arm edges; the ring
    edges join first-shell sites of adjacent arms (the closest inter-arm
    pairs, which a distance-dependent interaction cannot switch off).
    Returned in CROSS_CLASS_ORDER = (ring, spoke, arm).
    """
    site = lambda shell, arm: 1 + 4 * (shell - 1) + arm
    ring = tuple((site(1, a), site(1, (a + 1) % 4)) for a in range(4))
    spoke = tuple((0, site(1, a)) for a in range(4))
    arm = tuple((site(shell, a), site(shell + 1, a))
                for shell in range(1, m + 1) for a in range(4))
    return {"ring": ring, "spoke": spoke, "arm": arm}
