"""Agglomerative clustering with Ward's linkage and deterministic leaf order.

Distances start as Euclidean and are updated with the Lance-Williams
recurrence on squared distances, so the merge criterion is exactly the
minimum increase in within-cluster variance (d^2 equals twice that
increase). All tie-breaking is keyed on cluster *content* rather than input
position: shuffling the input rows of a matrix with distinct rows yields the
same final leaf order. Duplicate rows degrade gracefully to a deterministic
but position-dependent order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Merge:
    """One agglomeration step; cluster ids: 0..n-1 leaves, then n, n+1, ..."""

    left: int
    right: int
    height: float
    size: int
    members: frozenset[int]


@dataclass(frozen=True)
class Dendrogram:
    n_leaves: int
    merges: tuple[Merge, ...]
    leaf_order: tuple[int, ...]


class _Cluster:
    __slots__ = ("cid", "size", "key", "members", "children")

    def __init__(self, cid, size, key, members, children):
        self.cid = cid
        self.size = size
        self.key = key
        self.members = members
        self.children = children  # (left _Cluster, right _Cluster) or None


def _leaf_key(row, index: int):
    # content decides ordering; index only breaks exact-duplicate ties
    return (tuple(float(v) for v in row), index)


def ward_linkage(points) -> Dendrogram:
    """Cluster the rows of ``points``; returns merges plus leaf order.

    Leaf order comes from an in-order walk of the merge tree with the
    smaller cluster placed first at every node (key order on equal sizes).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a non-empty 2-d array")
    n = pts.shape[0]
    clusters: dict[int, _Cluster] = {
        i: _Cluster(i, 1, _leaf_key(pts[i], i), frozenset([i]), None) for i in range(n)
    }
    if n == 1:
        return Dendrogram(1, (), (0,))

    # squared Euclidean distances between active clusters
    d2: dict[tuple[int, int], float] = {}
    diffs = pts[:, None, :] - pts[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diffs, diffs)
    for i in range(n):
        for j in range(i + 1, n):
            d2[(i, j)] = float(sq[i, j])

    merges: list[Merge] = []
    next_id = n
    active = list(range(n))
    while len(active) > 1:
        best = None
        best_rank = None
        for ii in range(len(active)):
            for jj in range(ii + 1, len(active)):
                a, b = active[ii], active[jj]
                pair = (a, b) if a < b else (b, a)
                dist = d2[pair]
                ka, kb = clusters[a].key, clusters[b].key
                rank = (dist, min(ka, kb), max(ka, kb))
                if best_rank is None or rank < best_rank:
                    best_rank = rank
                    best = pair
        a, b = best
        ca, cb = clusters[a], clusters[b]
        # child order: smaller cluster first, key order on equal sizes
        if (ca.size, ca.key) <= (cb.size, cb.key):
            left, right = ca, cb
        else:
            left, right = cb, ca
        merged = _Cluster(
            next_id,
            ca.size + cb.size,
            min(ca.key, cb.key),
            ca.members | cb.members,
            (left, right),
        )
        height = float(np.sqrt(d2[(a, b)]))
        merges.append(Merge(a, b, height, merged.size, merged.members))

        dab = d2[(a, b)]
        for k in active:
            if k == a or k == b:
                continue
            ck = clusters[k]
            dka = d2[(min(a, k), max(a, k))]
            dkb = d2[(min(b, k), max(b, k))]
            total = ca.size + cb.size + ck.size
            dnew = (
                (ca.size + ck.size) * dka
                + (cb.size + ck.size) * dkb
                - ck.size * dab
            ) / total
            d2[(k, next_id) if k < next_id else (next_id, k)] = dnew
        active = [c for c in active if c != a and c != b]
        active.append(next_id)
        clusters[next_id] = merged
        next_id += 1

    order: list[int] = []

    def walk(c: _Cluster) -> None:
        if c.children is None:
            order.append(c.cid)
        else:
            walk(c.children[0])
            walk(c.children[1])

    walk(clusters[active[0]])
    return Dendrogram(n, tuple(merges), tuple(order))
