"""Skill vocabulary, co-occurrence model, embeddings, and the 2-D skill map.

Skills co-occur at profile granularity (set semantics). Counts are
reweighted with positive pointwise mutual information and factorized by
truncated SVD into unit-norm vectors of dimension d (default 100). The 2-D
map comes from an exact stochastic neighbor embedding with per-point
bandwidths matched to a target perplexity, followed by density-based
clustering. Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError, OutOfVocabularyError, ParameterError
from .persistence import canonical_json, decode_array, encode_array

DEFAULT_DIMENSION = 100
DEFAULT_MIN_COUNT = 2

_STRIP_CHARS = " \t\r\n!?\"'(),;:[]{}<>*`•·-"
_WS_RX = re.compile(r"\s+")


def normalize_skill(text: str) -> str:
    """Canonical skill token: lowercased, trimmed, inner whitespace collapsed.

    Surrounding punctuation is stripped but internal symbols survive, so
    `C++` -> `c++` and `.NET` -> `.net`.
    """
    token = _WS_RX.sub(" ", text.lower().strip(_STRIP_CHARS)).strip()
    if not token:
        raise NormalizationError(text, "skill is empty after normalization")
    return token


@dataclass(frozen=True)
class SkillVocabulary:
    tokens: tuple[str, ...]              # index -> token, sorted lexicographically
    frequencies: tuple[int, ...]         # per-skill profile frequency

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tokens)})

    def index_of(self, token: str) -> int:
        idx = self._index.get(token)
        if idx is None:
            raise OutOfVocabularyError(token)
        return idx

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """Sparse symmetric profile-level co-occurrence counts.

    `pairs` holds canonical (i < j) index pairs; the diagonal equals the
    per-skill profile frequency.
    """

    vocabulary: SkillVocabulary
    n_profiles: int
    pairs: dict[tuple[int, int], int]

    def count(self, a: int, b: int) -> int:
        if a == b:
            return self.vocabulary.frequencies[a]
        key = (a, b) if a < b else (b, a)
        return self.pairs.get(key, 0)


def corpus_hash(matrix: CooccurrenceMatrix) -> str:
    payload = canonical_json(
        {
            "tokens": list(matrix.vocabulary.tokens),
            "frequencies": list(matrix.vocabulary.frequencies),
            "n_profiles": matrix.n_profiles,
            "pairs": [[a, b, c] for (a, b), c in sorted(matrix.pairs.items())],
        }
    )
    return hashlib.sha256(payload).hexdigest()[:16]


def build_cooccurrence(corpus, min_count: int = DEFAULT_MIN_COUNT):
    """Count profile-level skill co-occurrence over `corpus` (iterable of skill sets).

    Duplicate mentions inside one profile count once; skills below
    `min_count` profiles are dropped from the vocabulary.
    """
    profiles = [frozenset(p) for p in corpus]
    if not profiles:
        raise ParameterError("corpus is empty")
    freq: dict[str, int] = {}
    for profile in profiles:
        for token in profile:
            freq[token] = freq.get(token, 0) + 1
    kept = sorted(t for t, c in freq.items() if c >= min_count)
    if not kept:
        raise ParameterError(f"vocabulary is empty after min_count={min_count} filtering")
    vocab = SkillVocabulary(tokens=tuple(kept), frequencies=tuple(freq[t] for t in kept))
    index = {t: i for i, t in enumerate(kept)}

    pairs: dict[tuple[int, int], int] = {}
    for profile in profiles:
        ids = sorted(index[t] for t in profile if t in index)
        for a_pos in range(len(ids)):
            for b_pos in range(a_pos + 1, len(ids)):
                key = (ids[a_pos], ids[b_pos])
                pairs[key] = pairs.get(key, 0) + 1
    return vocab, CooccurrenceMatrix(vocabulary=vocab, n_profiles=len(profiles), pairs=pairs)


# ---------------------------------------------------------------------------
# PPMI + SVD embedding
# ---------------------------------------------------------------------------

def ppmi_matrix(matrix: CooccurrenceMatrix) -> np.ndarray:
    """Dense positive PMI weights: max(0, ln(count(a,b) * N / (freq_a * freq_b)))."""
    v = len(matrix.vocabulary)
    n = matrix.n_profiles
    freq = np.asarray(matrix.vocabulary.frequencies, dtype=float)
    out = np.zeros((v, v))
    for (a, b), count in matrix.pairs.items():
        val = math.log(count * n / (freq[a] * freq[b]))
        if val > 0:
            out[a, b] = out[b, a] = val
    diag = np.log(n / freq)
    np.fill_diagonal(out, np.maximum(diag, 0.0))
    return out


def factorize_ppmi(ppmi: np.ndarray, d: int):
    """Rank-d SVD factors of the PPMI matrix with deterministic signs."""
    u, s, vt = np.linalg.svd(ppmi)
    for j in range(u.shape[1]):
        pivot = int(np.argmax(np.abs(u[:, j])))
        if u[pivot, j] < 0:
            u[:, j] = -u[:, j]
            vt[j, :] = -vt[j, :]
    return u[:, :d], s[:d], vt[:d, :]


@dataclass(frozen=True)
class SkillEmbedding:
    vocabulary: SkillVocabulary
    vectors: np.ndarray                  # |V| x d, unit rows
    dimension: int
    seed: int
    method: str
    corpus_hash: str

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.vocabulary.index_of(token)]

    def to_payload(self) -> dict:
        return {
            "tokens": list(self.vocabulary.tokens),
            "frequencies": list(self.vocabulary.frequencies),
            "vectors": encode_array(self.vectors),
            "dimension": self.dimension,
            "seed": self.seed,
            "method": self.method,
            "corpus_hash": self.corpus_hash,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "SkillEmbedding":
        vocab = SkillVocabulary(
            tokens=tuple(payload["tokens"]), frequencies=tuple(payload["frequencies"])
        )
        return cls(
            vocabulary=vocab,
            vectors=decode_array(payload["vectors"]),
            dimension=int(payload["dimension"]),
            seed=int(payload["seed"]),
            method=payload["method"],
            corpus_hash=payload["corpus_hash"],
        )


def train_embedding(matrix: CooccurrenceMatrix, d: int = DEFAULT_DIMENSION, seed: int = 0) -> SkillEmbedding:
    """Factorize PPMI weights into d-dimensional unit-norm skill vectors.

    Deterministic closed form: vectors are U_d * sqrt(s_d) row-normalized.
    Rows with no positive PMI mass fall back to a fixed basis vector so the
    unit-norm invariant holds for every row.
    """
    v = len(matrix.vocabulary)
    if d > v:
        raise ParameterError(f"dimension {d} exceeds vocabulary size {v}")
    if d < 1:
        raise ParameterError("dimension must be positive")
    u, s, _ = factorize_ppmi(ppmi_matrix(matrix), d)
    vectors = u * np.sqrt(s)
    norms = np.linalg.norm(vectors, axis=1)
    degenerate = norms <= 1e-12
    for i in np.flatnonzero(degenerate):
        vectors[i] = 0.0
        vectors[i, i % d] = 1.0
        norms[i] = 1.0
    vectors = vectors / norms[:, None]
    return SkillEmbedding(
        vocabulary=matrix.vocabulary,
        vectors=vectors,
        dimension=d,
        seed=seed,
        method="ppmi-svd",
        corpus_hash=corpus_hash(matrix),
    )


def distance(emb: SkillEmbedding, a: str, b: str) -> float:
    """Cosine distance clamped into [0, 1]; identical tokens are at 0 exactly."""
    ia, ib = emb.vocabulary.index_of(a), emb.vocabulary.index_of(b)
    if ia == ib:
        return 0.0
    cos = float(np.dot(emb.vectors[ia], emb.vectors[ib]))
    return min(1.0, max(0.0, 1.0 - cos))


def nearest(emb: SkillEmbedding, token: str, k: int) -> list[tuple[str, float]]:
    """k nearest skills (excluding `token`) with similarity percentages.

    An exhaustive scan through the same scalar arithmetic as `distance`, so
    the ranking equals sorting the whole vocabulary by distance, exactly.
    Ties break by vocabulary index ascending; similarity is (1 - distance) * 100.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    emb.vocabulary.index_of(token)
    scored = sorted(
        (distance(emb, token, other), i, other)
        for i, other in enumerate(emb.vocabulary.tokens)
        if other != token
    )
    return [(other, (1.0 - d) * 100.0) for d, _, other in scored[:k]]


# ---------------------------------------------------------------------------
# Exact stochastic neighbor embedding
# ---------------------------------------------------------------------------

_PERPLEXITY_TOL = 1e-5
_PERPLEXITY_STEPS = 50
_EARLY_EXAGGERATION = 12.0
_EXAGGERATION_ITERS = 250
_EPS = 1e-12


def _conditional_affinities(sq_dists: np.ndarray, perplexity: float) -> np.ndarray:
    """Per-point Gaussian affinities with bandwidth matched to the perplexity."""
    n = sq_dists.shape[0]
    target_entropy = math.log(perplexity)
    P = np.zeros((n, n))
    for i in range(n):
        d = np.delete(sq_dists[i], i)
        beta, beta_min, beta_max = 1.0, 0.0, math.inf
        for _ in range(_PERPLEXITY_STEPS):
            w = np.exp(-d * beta)
            total = w.sum()
            if total <= 0:
                entropy = 0.0
                p = np.zeros_like(w)
            else:
                p = w / total
                entropy = float(beta * np.dot(d, p) + math.log(total))
            diff = entropy - target_entropy
            if abs(diff) <= _PERPLEXITY_TOL:
                break
            if diff > 0:
                beta_min = beta
                beta = beta * 2.0 if beta_max == math.inf else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = beta / 2.0 if beta_min == 0.0 else (beta + beta_min) / 2.0
        row = np.insert(p, i, 0.0)
        P[i] = row
    return P


def project_2d(
    emb: SkillEmbedding,
    perplexity: float = 12.0,
    iterations: int = 1000,
    seed: int = 0,
    learning_rate: float | None = None,
    return_kl_trace: bool = False,
):
    """Exact t-distributed stochastic neighbor embedding to two dimensions.

    Input affinities are Gaussian with per-point bandwidths binary-searched to
    the target perplexity (tolerance 1e-5, at most 50 steps), symmetrized;
    output affinities are Student-t. Gradient descent uses a fixed schedule
    with early exaggeration (factor 12 for the first 250 iterations) and is
    bit-deterministic for a fixed seed.
    """
    n = len(emb.vocabulary)
    if n < 4:
        raise ParameterError("projection requires a vocabulary of at least 4 skills")
    if not 0 < perplexity < (n - 1) / 3:
        raise ParameterError(f"perplexity must be in (0, {(n - 1) / 3}) for {n} skills")
    if iterations < 1:
        raise ParameterError("iterations must be >= 1")

    X = emb.vectors
    sq = np.sum(X * X, axis=1)
    sq_dists = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (X @ X.T), 0.0)
    cond = _conditional_affinities(sq_dists, perplexity)
    P = (cond + cond.T) / (2.0 * n)
    P = np.maximum(P, _EPS)

    rng = np.random.default_rng(seed)
    Y = rng.normal(0.0, 1e-4, size=(n, 2))
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    lr = learning_rate if learning_rate is not None else max(50.0, n / 12.0)
    kl_trace: list[float] = []

    for it in range(iterations):
        p_eff = P * _EARLY_EXAGGERATION if it < _EXAGGERATION_ITERS else P
        momentum = 0.5 if it < _EXAGGERATION_ITERS else 0.8

        diff_sq = np.sum(Y * Y, axis=1)
        num = 1.0 / (1.0 + diff_sq[:, None] + diff_sq[None, :] - 2.0 * (Y @ Y.T))
        np.fill_diagonal(num, 0.0)
        Q = np.maximum(num / num.sum(), _EPS)

        PQ = (p_eff - Q) * num
        grad = 4.0 * ((np.diag(PQ.sum(axis=1)) - PQ) @ Y)

        flip = (update * grad) < 0.0
        gains[flip] += 0.2
        gains[~flip] *= 0.8
        np.clip(gains, 0.01, None, out=gains)
        update = momentum * update - lr * gains * grad
        Y = Y + update
        Y = Y - Y.mean(axis=0)

        if return_kl_trace:
            kl_trace.append(float(np.sum(P * np.log(P / Q))))

    if return_kl_trace:
        return Y, kl_trace
    return Y


# ---------------------------------------------------------------------------
# Density-based clustering
# ---------------------------------------------------------------------------

def cluster_map(coords: np.ndarray, eps: float, min_pts: int) -> np.ndarray:
    """Density clustering of 2-D points; returns per-point cluster ids, -1 = noise.

    A point is core iff at least `min_pts` points (itself included) lie within
    `eps` (inclusive). Clusters are connected components of core points plus
    their border points, discovered in index order so ids are deterministic.
    """
    coords = np.asarray(coords, dtype=float)
    if not np.all(np.isfinite(coords)):
        raise ParameterError("coordinates must be finite")
    if eps <= 0:
        raise ParameterError("eps must be positive")
    if min_pts < 1:
        raise ParameterError("min_pts must be >= 1")

    n = coords.shape[0]
    sq = np.sum(coords * coords, axis=1)
    sq_dists = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (coords @ coords.T), 0.0)
    within = sq_dists <= eps * eps + 1e-12
    neighbor_lists = [np.flatnonzero(within[i]) for i in range(n)]
    core = np.array([len(nb) >= min_pts for nb in neighbor_lists])

    labels = np.full(n, -1, dtype=int)
    next_id = 0
    for start in range(n):
        if labels[start] != -1 or not core[start]:
            continue
        labels[start] = next_id
        queue = [start]
        while queue:
            point = queue.pop(0)
            for nb in neighbor_lists[point]:
                if labels[nb] == -1:
                    labels[nb] = next_id
                    if core[nb]:
                        queue.append(int(nb))
        next_id += 1
    return labels


# ---------------------------------------------------------------------------
# Skill map artifact
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SkillMap2D:
    tokens: tuple[str, ...]
    coords: np.ndarray                   # |V| x 2
    cluster_ids: np.ndarray              # |V|, -1 = noise
    perplexity: float
    iterations: int
    seed: int
    eps: float
    min_pts: int

    def to_payload(self) -> dict:
        return {
            "tokens": list(self.tokens),
            "coords": encode_array(self.coords),
            "cluster_ids": encode_array(self.cluster_ids),
            "perplexity": self.perplexity,
            "iterations": self.iterations,
            "seed": self.seed,
            "eps": self.eps,
            "min_pts": self.min_pts,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "SkillMap2D":
        return cls(
            tokens=tuple(payload["tokens"]),
            coords=decode_array(payload["coords"]),
            cluster_ids=decode_array(payload["cluster_ids"]),
            perplexity=float(payload["perplexity"]),
            iterations=int(payload["iterations"]),
            seed=int(payload["seed"]),
            eps=float(payload["eps"]),
            min_pts=int(payload["min_pts"]),
        )


def build_skill_map(
    emb: SkillEmbedding,
    perplexity: float = 12.0,
    iterations: int = 1000,
    seed: int = 0,
    eps: float | None = None,
    min_pts: int = 3,
) -> SkillMap2D:
    """Project the embedding to 2-D and cluster the result.

    When `eps` is not given it defaults to 20% of the median pairwise
    distance of the projection, a stable desk-scale heuristic.
    """
    coords = project_2d(emb, perplexity=perplexity, iterations=iterations, seed=seed)
    if eps is None:
        sq = np.sum(coords * coords, axis=1)
        sq_dists = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (coords @ coords.T), 0.0)
        upper = np.sqrt(sq_dists[np.triu_indices_from(sq_dists, k=1)])
        eps = float(np.median(upper) * 0.2) if upper.size else 1.0
        if eps <= 0:
            eps = 1.0
    cluster_ids = cluster_map(coords, eps=eps, min_pts=min_pts)
    return SkillMap2D(
        tokens=emb.vocabulary.tokens,
        coords=coords,
        cluster_ids=cluster_ids,
        perplexity=perplexity,
        iterations=iterations,
        seed=seed,
        eps=eps,
        min_pts=min_pts,
    )


def map_to_csv(skill_map: SkillMap2D) -> str:
    """Comma-separated export with header: token,x,y,cluster_id."""
    lines = ["token,x,y,cluster_id"]
    for i, token in enumerate(skill_map.tokens):
        field = f'"{token}"' if "," in token or '"' in token else token
        x, y = (float(v) for v in skill_map.coords[i])
        lines.append(f"{field},{x!r},{y!r},{int(skill_map.cluster_ids[i])}")
    return "\n".join(lines) + "\n"
