"""Benchmark loaders and the three metric families.

Word similarity is scored by Spearman's rank correlation between human
judgments and cosine similarities; categorization by the purity of a
spherical k-means clustering; analogy by 3CosAdd accuracy.  Benchmark
entries involving words missing from the model are skipped and counted,
never zero-scored; the similarity evaluator can optionally substitute the
model's mean vector for missing words, which robustness experiments use
so that coverage gaps actually cost score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .sgns import EmbeddingModel

SIMILARITY = "similarity"
CATEGORIZATION = "categorization"
ANALOGY = "analogy"

OOV_SKIP = "skip"
OOV_MEAN = "mean"


@dataclass
class SimilarityBenchmark:
    name: str
    pairs: list[tuple[str, str, float]]

    def __post_init__(self) -> None:
        if not self.pairs:
            raise ValueError("empty benchmark")
        if any(math.isnan(s) for _, _, s in self.pairs):
            raise ValueError("NaN score in benchmark")

    def unique_words(self) -> set[str]:
        return {w for a, b, _ in self.pairs for w in (a, b)}

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass
class CategorizationBenchmark:
    name: str
    items: list[tuple[str, str]]  # (word, category)

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("empty benchmark")

    @property
    def n_categories(self) -> int:
        return len({c for _, c in self.items})

    def unique_words(self) -> set[str]:
        return {w for w, _ in self.items}

    def __len__(self) -> int:
        return len(self.items)


@dataclass
class AnalogyBenchmark:
    name: str
    quads: list[tuple[str, str, str, str]]

    def __post_init__(self) -> None:
        if not self.quads:
            raise ValueError("empty benchmark")
        for quad in self.quads:
            if len(set(quad)) != 4:
                raise ValueError(f"analogy words must be distinct: {quad}")

    def unique_words(self) -> set[str]:
        return {w for quad in self.quads for w in quad}

    def __len__(self) -> int:
        return len(self.quads)


@dataclass
class EvalResult:
    score: float
    oov_count: int  # unique benchmark words absent from the model
    n_used: int  # benchmark entries that contributed to the score


def _average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the average of their positions."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average-rank vectors."""
    if len(x) != len(y):
        raise ValueError("length mismatch")
    if len(x) < 2:
        raise ValueError("degenerate input: need at least 2 points")
    rx, ry = _average_ranks(x), _average_ranks(y)
    if rx.std() == 0 or ry.std() == 0:
        raise ValueError("degenerate input: zero rank variance")
    return float(np.corrcoef(rx, ry)[0, 1])


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; defined as 0 when either vector is zero."""
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(u @ v / (nu * nv))


def evaluate_similarity(
    model: EmbeddingModel,
    bench: SimilarityBenchmark,
    oov_policy: str = OOV_SKIP,
) -> EvalResult:
    """Spearman correlation between cosine predictions and human scores.

    ``oov_policy="skip"`` drops pairs with a missing word; ``"mean"``
    substitutes the model's mean vector, scoring the full benchmark.
    """
    if oov_policy not in (OOV_SKIP, OOV_MEAN):
        raise ValueError(f"unknown OOV policy {oov_policy!r}")
    oov_words = {w for w in bench.unique_words() if w not in model.vocab}
    mean_vec = model.vectors.mean(axis=0) if oov_policy == OOV_MEAN else None
    preds, humans = [], []
    for a, b, score in bench.pairs:
        ia, ib = model.vocab.get(a), model.vocab.get(b)
        if oov_policy == OOV_SKIP and (ia is None or ib is None):
            continue
        va = model.vectors[ia] if ia is not None else mean_vec
        vb = model.vectors[ib] if ib is not None else mean_vec
        preds.append(cosine(va, vb))
        humans.append(score)
    if len(preds) < 2:
        raise ValueError("fewer than 2 usable pairs")
    return EvalResult(
        score=spearman_rho(preds, humans),
        oov_count=len(oov_words),
        n_used=len(preds),
    )


def purity(assignments: Mapping, truth: Mapping) -> float:
    """Majority-category mass per cluster, relative to the item total."""
    if not assignments:
        raise ValueError("empty input")
    if set(assignments) != set(truth):
        raise ValueError("assignment and truth item sets differ")
    clusters: dict = {}
    for item, cluster in assignments.items():
        clusters.setdefault(cluster, []).append(truth[item])
    correct = 0
    for members in clusters.values():
        counts: dict = {}
        for cat in members:
            counts[cat] = counts.get(cat, 0) + 1
        correct += max(counts.values())
    return correct / len(assignments)


def spherical_kmeans(
    X: np.ndarray,
    k: int,
    seed: int,
    n_restarts: int = 10,
    max_iter: int = 100,
) -> np.ndarray:
    """Cosine k-means on length-normalized rows, best of ``n_restarts``.

    Deterministic given the seed: restarts draw their initial centroids
    from one generator in sequence; an emptied cluster is re-seeded with
    the worst-fitting point; the best restart is the one with the highest
    total assigned similarity (first wins ties).
    """
    n = X.shape[0]
    if n < k:
        raise ValueError(f"need at least {k} points, have {n}")
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    Xn = np.divide(X, norms, out=np.zeros_like(X, dtype=np.float64), where=norms > 0)
    rng = np.random.default_rng(seed)
    best_labels, best_objective = None, -np.inf
    for _ in range(n_restarts):
        centroids = Xn[rng.choice(n, size=k, replace=False)].copy()
        labels = np.full(n, -1)
        for _ in range(max_iter):
            sims = Xn @ centroids.T
            new_labels = np.argmax(sims, axis=1)
            if np.array_equal(new_labels, labels):
                break
            labels = new_labels
            fit = sims[np.arange(n), labels]
            worst_first = np.argsort(fit, kind="stable")
            next_worst = 0
            for c in range(k):
                members = Xn[labels == c]
                if len(members) == 0:
                    centroids[c] = Xn[worst_first[next_worst]]
                    next_worst += 1
                    continue
                mean = members.mean(axis=0)
                norm = np.linalg.norm(mean)
                centroids[c] = mean / norm if norm > 0 else mean
        objective = float((Xn @ centroids.T)[np.arange(n), labels].sum())
        if objective > best_objective:
            best_objective = objective
            best_labels = labels
    return best_labels


def evaluate_categorization(
    model: EmbeddingModel,
    bench: CategorizationBenchmark,
    seed: int = 0,
) -> EvalResult:
    """Cluster in-vocabulary words into n_categories groups, score by purity."""
    in_vocab = [(w, c) for w, c in bench.items if w in model.vocab]
    oov_words = {w for w in bench.unique_words() if w not in model.vocab}
    k = bench.n_categories
    if len(in_vocab) < k:
        raise ValueError(f"only {len(in_vocab)} in-vocabulary words for k={k}")
    X = np.asarray([model.vector(w) for w, _ in in_vocab], dtype=np.float64)
    labels = spherical_kmeans(X, k, seed=seed)
    assignments = {i: int(labels[i]) for i in range(len(in_vocab))}
    truth = {i: in_vocab[i][1] for i in range(len(in_vocab))}
    return EvalResult(
        score=purity(assignments, truth),
        oov_count=len(oov_words),
        n_used=len(in_vocab),
    )


def evaluate_analogy(model: EmbeddingModel, bench: AnalogyBenchmark) -> EvalResult:
    """3CosAdd accuracy: predict argmax cosine(B - A + C) over the vocabulary
    excluding the three query words; a quad counts only if all four words
    are in the vocabulary."""
    oov_words = {w for w in bench.unique_words() if w not in model.vocab}
    norms = np.linalg.norm(model.vectors, axis=1, keepdims=True)
    Xn = np.divide(
        model.vectors, norms, out=np.zeros_like(model.vectors, dtype=np.float64),
        where=norms > 0,
    )
    used = 0
    correct = 0
    for a, b, c, d in bench.quads:
        ids = [model.vocab.get(w) for w in (a, b, c, d)]
        if any(i is None for i in ids):
            continue
        ia, ib, ic, id_ = ids
        query = model.vectors[ib] - model.vectors[ia] + model.vectors[ic]
        sims = Xn @ query
        sims[[ia, ib, ic]] = -np.inf
        if int(np.argmax(sims)) == id_:
            correct += 1
        used += 1
    if used == 0:
        raise ValueError("no usable analogy quads")
    return EvalResult(score=correct / used, oov_count=len(oov_words), n_used=used)


def load_benchmark(path: str | Path, kind: str):
    """Parse a benchmark file; words are lowercased.

    similarity: "word1 word2 score" per line; categorization:
    "word<TAB>category"; analogy: Google questions format, with
    ":"-prefixed section headers and four words per line.
    """
    path = Path(path)
    name = path.stem
    if kind == SIMILARITY:
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                parts = line.split()
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: expected 'word1 word2 score'")
                try:
                    score = float(parts[2])
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: bad score {parts[2]!r}") from exc
                pairs.append((parts[0].lower(), parts[1].lower(), score))
        return SimilarityBenchmark(name=name, pairs=pairs)
    if kind == CATEGORIZATION:
        items = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'word<TAB>category'")
                items.append((parts[0].lower(), parts[1]))
        return CategorizationBenchmark(name=name, items=items)
    if kind == ANALOGY:
        quads = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                if line.startswith(":"):
                    continue  # section header
                parts = line.split()
                if len(parts) != 4:
                    raise ValueError(f"{path}:{lineno}: expected 4 words")
                quads.append(tuple(p.lower() for p in parts))
        return AnalogyBenchmark(name=name, quads=quads)
    raise ValueError(f"unknown benchmark kind {kind!r}")
