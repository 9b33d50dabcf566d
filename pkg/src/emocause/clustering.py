"""Complete-linkage clustering of cause clauses per (product, emotion).

A clause is represented by the elementwise max, over its in-vocabulary
words, of the concatenation of each word's raw and emotion-aware vectors
(length 2d). Distance is 1 - cosine similarity. Agglomeration merges the
closest pair of clusters (max pairwise member distance) while that distance
stays below the threshold, default 0.13; clusters smaller than 2 are pruned
but reported. Each cluster is represented by its head clause, the member
whose largest distance to any other member is smallest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingTable, cosine_similarity
from .errors import OovError

DEFAULT_THRESHOLD = 0.13
MIN_CLUSTER_SIZE = 2


@dataclass(frozen=True)
class ClauseVector:
    values: np.ndarray  # (2d,)
    review_id: str
    clause_text: str
    sent_index: int = 0
    span: tuple = (0, 0)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("clause vector must be 1-D")
        if not np.all(np.isfinite(values)):
            raise ValueError("clause vector has non-finite entries")
        if not np.any(values):
            raise ValueError("clause vector is all zeros")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def vectorize_clause(clause, raw: EmbeddingTable, aware: EmbeddingTable) -> ClauseVector:
    """Max-pool concat(raw, aware) over the clause's in-vocabulary words."""
    if raw.dim != aware.dim:
        raise ValueError("raw and emotion-aware tables disagree on dimension")
    rows = [np.concatenate([raw[w], aware[w]]) for w in clause.words if w in raw and w in aware]
    if not rows:
        raise OovError("every clause token is out of vocabulary")
    pooled = np.max(np.stack(rows), axis=0)
    return ClauseVector(values=pooled,
                        review_id=clause.sentence.review_id,
                        clause_text=clause.text,
                        sent_index=clause.sentence.sent_index,
                        span=(clause.span.start, clause.span.end))


def cosine_distance(a: ClauseVector, b: ClauseVector) -> float:
    # clamp away float noise so the contract range [0, 2] holds exactly
    return min(max(1.0 - cosine_similarity(a.values, b.values), 0.0), 2.0)


def _pairwise_distances(vectors) -> np.ndarray:
    n = len(vectors)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = cosine_distance(vectors[i], vectors[j])
    return d


def agglomerative_complete_link(vectors, threshold: float = DEFAULT_THRESHOLD) -> list[list[int]]:
    """Member-index partition. Starts from singletons and repeatedly merges
    the pair of clusters with the smallest complete-linkage distance while
    it is strictly below the threshold; distance ties break on the smallest
    (i, j) position pair. Cluster distances are maintained with the
    Lance-Williams complete-link update D(k, i+j) = max(D(k,i), D(k,j)).
    """
    if not vectors:
        raise ValueError("nothing to cluster")
    clusters = [[i] for i in range(len(vectors))]
    dist = _pairwise_distances(vectors)
    while len(clusters) > 1:
        best_i = best_j = -1
        best = np.inf
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                if dist[i, j] < best:
                    best, best_i, best_j = dist[i, j], i, j
        if best >= threshold:
            break
        merged_row = np.maximum(dist[best_i], dist[best_j])
        dist[best_i, :] = merged_row
        dist[:, best_i] = merged_row
        dist[best_i, best_i] = 0.0
        dist = np.delete(np.delete(dist, best_j, axis=0), best_j, axis=1)
        clusters[best_i] = sorted(clusters[best_i] + clusters[best_j])
        del clusters[best_j]
    return sorted(clusters, key=lambda members: members[0])


def prune_small(clusters, min_size: int = MIN_CLUSTER_SIZE):
    """(kept clusters, pruned member indices). Nothing is silently dropped."""
    kept = [c for c in clusters if len(c) >= min_size]
    pruned = sorted(i for c in clusters if len(c) < min_size for i in c)
    return kept, pruned


def head_clause(members, vectors) -> int:
    """The member whose largest distance to any other member is smallest;
    ties go to the smallest index, a singleton to itself."""
    if not members:
        raise ValueError("empty cluster")
    if len(members) == 1:
        return members[0]
    best = None
    best_worst = np.inf
    for m in sorted(members):
        worst = max(cosine_distance(vectors[m], vectors[o]) for o in members if o != m)
        if worst < best_worst:
            best, best_worst = m, worst
    return best


@dataclass(frozen=True)
class Cluster:
    members: tuple  # sorted indices into the group's clause list
    head: int

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class ClusterSet:
    product: str
    emotion: str
    clusters: list[Cluster]
    pruned: list[int]
    threshold: float
    vectors: list = field(default_factory=list)  # group's ClauseVectors, index-aligned

    def to_json_obj(self) -> dict:
        return {
            "product": self.product,
            "emotion": self.emotion,
            "clusters": [
                {
                    "head": {"review_id": self.vectors[c.head].review_id,
                             "clause_text": self.vectors[c.head].clause_text},
                    "members": [{"review_id": self.vectors[m].review_id,
                                 "clause_text": self.vectors[m].clause_text}
                                for m in c.members],
                    "size": c.size,
                }
                for c in self.clusters
            ],
            "pruned": [{"review_id": self.vectors[m].review_id,
                        "clause_text": self.vectors[m].clause_text}
                       for m in self.pruned],
        }


def cluster_causes(entries, threshold: float = DEFAULT_THRESHOLD) -> list[ClusterSet]:
    """Cluster (product, emotion, ClauseVector) entries per (product, emotion)
    group. Output is ordered by (product, emotion); clusters within a set by
    first member index."""
    groups: dict = {}
    for product, emotion, vector in entries:
        groups.setdefault((product, emotion), []).append(vector)
    out = []
    for (product, emotion), vectors in sorted(groups.items()):
        partition = agglomerative_complete_link(vectors, threshold)
        kept, pruned = prune_small(partition)
        clusters = [Cluster(members=tuple(members), head=head_clause(members, vectors))
                    for members in kept]
        out.append(ClusterSet(product=product, emotion=emotion, clusters=clusters,
                              pruned=pruned, threshold=threshold, vectors=vectors))
    return out


def project_2d(vectors) -> np.ndarray:
    """(n, 2) projection onto the first two principal components, for
    external plotting. Sign convention: each component's largest-magnitude
    loading is positive, so the output is deterministic."""
    data = np.stack([v.values for v in vectors])
    centered = data - data.mean(axis=0)
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    points = np.zeros((data.shape[0], 2))
    for k in range(min(2, vt.shape[0])):
        if svals[k] <= 1e-12:
            break
        component = vt[k]
        if component[np.argmax(np.abs(component))] < 0:
            component = -component
        points[:, k] = centered @ component
    return points
