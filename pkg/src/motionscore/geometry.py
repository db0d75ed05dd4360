"""Mesh self-intersection machinery: AABB hierarchy and triangle tests.

Intersection is decided by a separating-axis test over the two face
normals, the nine edge-edge cross products, and the six in-plane edge
normals (the latter cover coplanar pairs).  Closed triangles: a shared
vertex or edge counts as an intersection; the non-local frame filter is
the intended noise suppressor at the metric level.
"""

from __future__ import annotations

import numpy as np

from .bundle import MeshFrame
from .errors import DegenerateGeometryError

PLANE_EPS = 1e-10          # separation slack on normalized axes
DEGENERATE_AREA_EPS = 1e-12


def _triangle_normals(tris: np.ndarray) -> np.ndarray:
    return np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0])


def tri_pairs_intersect(tris1, tris2, eps: float = PLANE_EPS) -> np.ndarray:
    """Vectorized closed-triangle intersection test for paired batches.

    Parameters
    ----------
    tris1, tris2 : (N, 3, 3) arrays
        Vertex coordinates of the paired triangles.

    Returns
    -------
    (N,) boolean array, True where the pair intersects.
    """
    a = np.asarray(tris1, dtype=float)
    b = np.asarray(tris2, dtype=float)
    if a.ndim == 2:
        a = a[None]
    if b.ndim == 2:
        b = b[None]
    n1 = _triangle_normals(a)
    n2 = _triangle_normals(b)
    if (np.linalg.norm(n1, axis=1) <= DEGENERATE_AREA_EPS).any() or \
       (np.linalg.norm(n2, axis=1) <= DEGENERATE_AREA_EPS).any():
        raise DegenerateGeometryError("degenerate triangle (near-zero area)")

    ea = np.stack([a[:, 1] - a[:, 0], a[:, 2] - a[:, 1], a[:, 0] - a[:, 2]], axis=1)
    eb = np.stack([b[:, 1] - b[:, 0], b[:, 2] - b[:, 1], b[:, 0] - b[:, 2]], axis=1)

    axes = [n1[:, None, :], n2[:, None, :]]
    # edge-edge cross products
    cross = np.cross(ea[:, :, None, :], eb[:, None, :, :]).reshape(-1, 9, 3)
    axes.append(cross)
    # in-plane edge normals (decide coplanar overlap)
    axes.append(np.cross(n1[:, None, :], ea))
    axes.append(np.cross(n2[:, None, :], eb))
    axes = np.concatenate(axes, axis=1)  # (N, 17, 3)

    lengths = np.linalg.norm(axes, axis=2, keepdims=True)
    safe = np.where(lengths > DEGENERATE_AREA_EPS, lengths, 1.0)
    axes = axes / safe
    # near-zero axes (parallel edges) project everything to ~0: harmless,
    # they can never certify a separation
    proj_a = np.einsum("nkx,nvx->nkv", axes, a)
    proj_b = np.einsum("nkx,nvx->nkv", axes, b)
    min_a, max_a = proj_a.min(axis=2), proj_a.max(axis=2)
    min_b, max_b = proj_b.min(axis=2), proj_b.max(axis=2)
    separated = (min_b - max_a > eps) | (min_a - max_b > eps)
    return ~separated.any(axis=1)


def tri_tri_intersect(t1, t2, eps: float = PLANE_EPS) -> bool:
    """True iff two closed triangles intersect (boundary contact counts)."""
    return bool(tri_pairs_intersect(np.asarray(t1)[None], np.asarray(t2)[None], eps)[0])


def adjacent_faces(f1, f2) -> bool:
    """True iff two faces share at least one vertex index."""
    return not set(int(v) for v in f1).isdisjoint(int(v) for v in f2)


class Bvh:
    """Axis-aligned bounding-box tree over mesh faces.

    Median split on face centroids along the widest axis; leaves hold at
    most ``leaf_size`` faces and every face lives in exactly one leaf.
    """

    def __init__(self, vertices, faces, leaf_size: int = 4):
        self.vertices = np.asarray(vertices, dtype=float)
        self.faces = np.asarray(faces, dtype=np.int64)
        self.leaf_size = max(1, int(leaf_size))
        tris = self.vertices[self.faces]
        self.tri_min = tris.min(axis=1)
        self.tri_max = tris.max(axis=1)
        centroids = tris.mean(axis=1)

        self.node_min = []
        self.node_max = []
        self.node_left = []    # -1 for leaves
        self.node_right = []
        self.node_start = []   # slice into self.order for leaves
        self.node_count = []
        self.order = []

        def build(idx: np.ndarray, depth: int) -> int:
            node = len(self.node_min)
            self.node_min.append(self.tri_min[idx].min(axis=0))
            self.node_max.append(self.tri_max[idx].max(axis=0))
            self.node_left.append(-1)
            self.node_right.append(-1)
            self.node_start.append(-1)
            self.node_count.append(len(idx))
            if len(idx) <= self.leaf_size:
                self.node_start[node] = len(self.order)
                self.order.extend(idx.tolist())
                return node
            c = centroids[idx]
            axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
            mid = len(idx) // 2
            part = idx[np.argsort(c[:, axis], kind="stable")]
            self.node_left[node] = build(part[:mid], depth + 1)
            self.node_right[node] = build(part[mid:], depth + 1)
            return node

        build(np.arange(len(self.faces)), 0)
        self.order = np.asarray(self.order, dtype=np.int64)
        self.node_min = np.asarray(self.node_min)
        self.node_max = np.asarray(self.node_max)
        self.node_left = np.asarray(self.node_left, dtype=np.int64)
        self.node_right = np.asarray(self.node_right, dtype=np.int64)
        self.node_start = np.asarray(self.node_start, dtype=np.int64)
        self.node_count = np.asarray(self.node_count, dtype=np.int64)

    def candidate_pairs(self) -> np.ndarray:
        """All face pairs (i < j) whose face boxes overlap, via self-traversal.

        The traversal keeps a frontier of node pairs and expands it one
        level per iteration, fully vectorized.
        """
        is_leaf = self.node_left < 0
        a = np.zeros(1, dtype=np.int64)
        b = np.zeros(1, dtype=np.int64)
        leaf_a, leaf_b = [], []
        while a.size:
            ok = ((self.node_min[a] <= self.node_max[b] + PLANE_EPS).all(axis=1)
                  & (self.node_min[b] <= self.node_max[a] + PLANE_EPS).all(axis=1))
            a, b = a[ok], b[ok]
            la, lb = is_leaf[a], is_leaf[b]
            done = la & lb
            leaf_a.append(a[done])
            leaf_b.append(b[done])
            both = ~la & ~lb
            ai, bi = a[both], b[both]
            aa, ba = a[la & ~lb], b[la & ~lb]     # a is a leaf: split b
            ab, bb = a[~la & lb], b[~la & lb]     # b is a leaf: split a
            a = np.concatenate([
                self.node_left[ai], self.node_left[ai],
                self.node_right[ai], self.node_right[ai],
                aa, aa,
                self.node_left[ab], self.node_right[ab],
            ])
            b = np.concatenate([
                self.node_left[bi], self.node_right[bi],
                self.node_left[bi], self.node_right[bi],
                self.node_left[ba], self.node_right[ba],
                bb, bb,
            ])
            if a.size:
                # canonicalize unordered pairs; dedupe to stop the mirrored
                # self-pair expansions from multiplying
                frontier = np.unique(
                    np.stack([np.minimum(a, b), np.maximum(a, b)], axis=1), axis=0)
                a, b = frontier[:, 0], frontier[:, 1]
        return self._expand_leaf_pairs(np.concatenate(leaf_a), np.concatenate(leaf_b))

    def _expand_leaf_pairs(self, la: np.ndarray, lb: np.ndarray) -> np.ndarray:
        if la.size == 0:
            return np.empty((0, 2), dtype=np.int64)
        lo = np.minimum(la, lb)
        hi = np.maximum(la, lb)
        uniq = np.unique(np.stack([lo, hi], axis=1), axis=0)
        la, lb = uniq[:, 0], uniq[:, 1]
        L = int(self.node_count[self.node_left < 0].max())
        offs = np.arange(L)
        idx_a = np.minimum(self.node_start[la][:, None] + offs, len(self.order) - 1)
        idx_b = np.minimum(self.node_start[lb][:, None] + offs, len(self.order) - 1)
        mask_a = offs[None, :] < self.node_count[la][:, None]
        mask_b = offs[None, :] < self.node_count[lb][:, None]
        fa = self.order[idx_a]                       # (n, L)
        fb = self.order[idx_b]
        pair_a = np.broadcast_to(fa[:, :, None], (len(la), L, L))
        pair_b = np.broadcast_to(fb[:, None, :], (len(la), L, L))
        valid = mask_a[:, :, None] & mask_b[:, None, :]
        i = pair_a[valid]
        j = pair_b[valid]
        keep = i != j
        i, j = i[keep], j[keep]
        pairs = np.stack([np.minimum(i, j), np.maximum(i, j)], axis=1)
        pairs = np.unique(pairs, axis=0)
        lo, hi = pairs[:, 0], pairs[:, 1]
        ok = ((self.tri_min[lo] <= self.tri_max[hi] + PLANE_EPS).all(axis=1)
              & (self.tri_min[hi] <= self.tri_max[lo] + PLANE_EPS).all(axis=1))
        return pairs[ok]


def _nonadjacent(faces: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    fa = faces[pairs[:, 0]]
    fb = faces[pairs[:, 1]]
    shared = (fa[:, :, None] == fb[:, None, :]).any(axis=(1, 2))
    return ~shared


def colliding_faces(mesh: MeshFrame, min_pairs: int = 8, min_fraction: float = 0.01,
                    leaf_size: int = 4) -> tuple[np.ndarray, float]:
    """Colliding face indices and the colliding-face fraction for one frame.

    Candidate pairs come from a BVH self-query; pairs that intersect and do
    not share a vertex form the raw set.  A frame is declared clean unless
    both the raw pair count and the colliding-face fraction reach the
    non-local thresholds, which suppresses numerical noise and incidental
    surface contact.
    """
    n_faces = mesh.faces.shape[0]
    bvh = Bvh(mesh.vertices, mesh.faces, leaf_size=leaf_size)
    pairs = bvh.candidate_pairs()
    if pairs.shape[0]:
        pairs = pairs[_nonadjacent(mesh.faces, pairs)]
    if pairs.shape[0]:
        tris = mesh.vertices[mesh.faces]
        hits = tri_pairs_intersect(tris[pairs[:, 0]], tris[pairs[:, 1]])
        raw_pairs = pairs[hits]
    else:
        raw_pairs = np.empty((0, 2), dtype=np.int64)
    face_set = np.unique(raw_pairs)
    fraction = face_set.shape[0] / n_faces
    if raw_pairs.shape[0] < min_pairs or fraction < min_fraction:
        return np.empty(0, dtype=np.int64), 0.0
    return face_set, fraction
