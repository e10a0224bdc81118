"""Combining independently trained sub-models into one consensus embedding.

Three methods:

* ``concat`` stacks each word's vectors from all models side by side,
  over the vocabulary *intersection*.
* ``pca`` projects the concatenated matrix onto its top principal
  components, also over the intersection.
* ``alir`` alternates orthogonal-Procrustes alignment of every model to a
  joint matrix with reconstruction of each model's missing rows through
  its fitted transform, producing a consensus over the vocabulary
  *union*.  Convergence is tracked by the mean normalized Frobenius
  displacement between the joint matrix and the aligned models.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Vocabulary
from .sgns import EmbeddingModel

CONCAT = "concat"
PCA = "pca"
ALIR = "alir"
MERGE_METHODS = (CONCAT, PCA, ALIR)

INIT_RANDOM = "random"
INIT_PCA = "pca"


@dataclass
class MergeConfig:
    method: str = ALIR
    alir_init: str = INIT_RANDOM
    target_dim: int | None = None  # pca output dim; None = input model dim
    max_epochs: int = 3
    displacement_threshold: float = 1e-4
    seed: int = 0
    # Ablation: average only models that actually contain a word, instead of
    # letting reconstructed rows take part in the mean.
    mean_over_present_only: bool = False

    def __post_init__(self) -> None:
        if self.method not in MERGE_METHODS:
            raise ValueError(f"unknown merge method {self.method!r}")
        if self.alir_init not in (INIT_RANDOM, INIT_PCA):
            raise ValueError(f"unknown init {self.alir_init!r}")
        if self.target_dim is not None and self.target_dim < 1:
            raise ValueError("target_dim must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.displacement_threshold <= 0:
            raise ValueError("displacement_threshold must be positive")


@dataclass
class MergeReport:
    """Per-iteration displacement plus vocabulary coverage of a merge."""

    displacements: list[float] = field(default_factory=list)
    union_size: int = 0
    intersection_size: int = 0
    missing_per_model: list[int] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["iteration,displacement"]
        for i, d in enumerate(self.displacements, start=1):
            lines.append(f"{i},{d!r}")
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


@dataclass
class AlignmentState:
    """State of one ALiR iteration: joint matrix, per-model transforms and
    presence masks, and the displacement history so far."""

    Y: np.ndarray
    transforms: list[np.ndarray]
    masks: list[np.ndarray]
    displacements: list[float]


def _merged_vocabulary(
    models: Sequence[EmbeddingModel], words: list[str]
) -> Vocabulary:
    """Vocabulary over ``words`` with summed counts, in canonical order
    (descending count, lexicographic ties)."""
    totals = {w: 0 for w in words}
    for model in models:
        for w in words:
            i = model.vocab.get(w)
            if i is not None:
                totals[w] += model.vocab.counts[i]
    ordered = sorted(words, key=lambda w: (-totals[w], w))
    return Vocabulary(
        words=ordered,
        counts=[totals[w] for w in ordered],
        total_tokens=sum(m.vocab.total_tokens for m in models),
    )


def _intersection_words(models: Sequence[EmbeddingModel]) -> set[str]:
    common = set(models[0].vocab.words)
    for model in models[1:]:
        common &= set(model.vocab.words)
    return common


def concat_merge(models: Sequence[EmbeddingModel]) -> EmbeddingModel:
    """Concatenate word vectors model by model over the common vocabulary."""
    if not models:
        raise ValueError("no models")
    common = _intersection_words(models)
    if not common:
        raise ValueError("no common vocabulary")
    vocab = _merged_vocabulary(models, sorted(common))
    blocks = []
    for model in models:
        rows = [model.vocab.id(w) for w in vocab.words]
        blocks.append(np.asarray(model.vectors, dtype=np.float64)[rows])
    return EmbeddingModel(vocab=vocab, vectors=np.hstack(blocks))


def _deterministic_svd(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD with the sign ambiguity resolved: the largest-magnitude
    entry of each left singular vector is made non-negative."""
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    signs = np.sign(U[np.argmax(np.abs(U), axis=0), np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, s, Vt * signs[:, None]


def pca_merge(models: Sequence[EmbeddingModel], d: int) -> EmbeddingModel:
    """Project the column-centered concatenated matrix onto its first d
    principal components."""
    concat = concat_merge(models)
    n_words = len(concat.vocab)
    if n_words <= d:
        raise ValueError(f"need more than {d} common words, have {n_words}")
    X = concat.vectors - concat.vectors.mean(axis=0)
    U, s, _ = _deterministic_svd(X)
    scores = U[:, :d] * s[:d]
    return EmbeddingModel(vocab=concat.vocab, vectors=scores)


def orthogonal_procrustes(M: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """The orthogonal W minimizing ||M W - Y||_F, via the SVD of M^T Y."""
    M = np.asarray(M, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if M.ndim != 2 or M.shape != Y.shape:
        raise ValueError("M and Y must be matrices of identical shape")
    if M.shape[0] < 1:
        raise ValueError("need at least one row")
    U, _, Vt = np.linalg.svd(M.T @ Y)
    return U @ Vt


def reconstruct_missing(Y_star: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Solve Y* = M* W for M*; W orthogonal makes this exact: M* = Y* W^T."""
    return np.asarray(Y_star, dtype=np.float64) @ np.asarray(W, dtype=np.float64).T


def displacement(
    Y: np.ndarray,
    matrices: Sequence[np.ndarray],
    transforms: Sequence[np.ndarray],
) -> float:
    """Mean normalized Frobenius displacement:
    (1/n) * sum_i ||Y - M_i W_i||_F / sqrt(|V| * d)."""
    n_rows, dim = Y.shape
    scale = np.sqrt(n_rows * dim)
    total = 0.0
    for M, W in zip(matrices, transforms):
        total += np.linalg.norm(Y - M @ W) / scale
    return float(total / len(matrices))


def alir_merge(
    models: Sequence[EmbeddingModel], config: MergeConfig
) -> tuple[EmbeddingModel, MergeReport]:
    """Alternating alignment merge over the union vocabulary.

    Each iteration fits an orthogonal transform per model on its present
    rows, reconstructs its missing rows through that transform, and resets
    the joint matrix to the mean of the aligned, completed models.  Stops
    when the displacement change falls below the configured threshold or
    after ``max_epochs`` iterations.
    """
    if not models:
        raise ValueError("no models")
    dim = models[0].dim
    if any(m.dim != dim for m in models):
        raise ValueError("models must share a dimensionality")

    union: set[str] = set()
    for model in models:
        union |= set(model.vocab.words)
    vocab = _merged_vocabulary(models, sorted(union))
    n_words = len(vocab)

    masks = []
    completed = []
    for model in models:
        mask = np.zeros(n_words, dtype=bool)
        M = np.zeros((n_words, dim), dtype=np.float64)
        for row, word in enumerate(vocab.words):
            i = model.vocab.get(word)
            if i is not None:
                mask[row] = True
                M[row] = model.vectors[i]
        if not mask.any():
            raise ValueError("model contributes no words")
        masks.append(mask)
        completed.append(M)

    rng = np.random.default_rng(config.seed)
    scale = 1.0 / np.sqrt(dim)
    Y = rng.normal(0.0, scale, size=(n_words, dim))
    intersection_rows = np.logical_and.reduce(masks)
    if config.alir_init == INIT_PCA:
        pca = pca_merge(models, dim)
        for row, word in enumerate(vocab.words):
            i = pca.vocab.get(word)
            if i is not None:
                Y[row] = pca.vectors[i]

    state = AlignmentState(Y=Y, transforms=[], masks=masks, displacements=[])
    for _ in range(config.max_epochs):
        transforms = []
        for M, mask in zip(completed, masks):
            transforms.append(orthogonal_procrustes(M[mask], state.Y[mask]))
        aligned = []
        for M, W, mask in zip(completed, transforms, masks):
            missing = ~mask
            if missing.any():
                M[missing] = reconstruct_missing(state.Y[missing], W)
            aligned.append(M @ W)
        if config.mean_over_present_only:
            weights = np.stack(masks).astype(np.float64)
            stacked = np.stack(aligned)
            Y_new = (stacked * weights[:, :, None]).sum(axis=0)
            Y_new /= weights.sum(axis=0)[:, None]
        else:
            Y_new = np.mean(aligned, axis=0)
        state.Y = Y_new
        state.transforms = transforms
        state.displacements.append(displacement(Y_new, completed, transforms))
        if (
            len(state.displacements) >= 2
            and abs(state.displacements[-2] - state.displacements[-1])
            < config.displacement_threshold
        ):
            break

    report = MergeReport(
        displacements=state.displacements,
        union_size=n_words,
        intersection_size=int(intersection_rows.sum()),
        missing_per_model=[int((~m).sum()) for m in masks],
    )
    return EmbeddingModel(vocab=vocab, vectors=state.Y), report


def averaging_counterexample_check() -> bool:
    """Check that naive averaging breaks a neighbor relation that an
    alignment-based merge preserves.

    Fixture: two 3-word models that are exact reflections of each other,
    with word1 = [1, 1] / [-1, 1], word2 = [99, 0] / [-99, 0] and
    word3 = [1, -1] / [-1, -1].  In each model word1's nearest neighbor is
    word3 (neighbors are Euclidean here: word2's magnitude makes it the
    cosine argmax even inside each individual model, so only the distance
    relation is shared by both models).  Element-wise averaging collapses
    word2 to the origin and moves it closer to word1 than word3 is,
    breaking the relation; aligning the models first preserves it.

    Returns True iff averaging breaks the relation while the aligned merge
    keeps word3 as word1's nearest neighbor.
    """
    words = ["word1", "word2", "word3"]
    m1 = np.array([[1.0, 1.0], [99.0, 0.0], [1.0, -1.0]])
    m2 = np.array([[-1.0, 1.0], [-99.0, 0.0], [-1.0, -1.0]])

    def nearest(matrix: np.ndarray, row: int) -> int:
        dists = np.linalg.norm(matrix - matrix[row], axis=1)
        dists[row] = np.inf
        return int(np.argmin(dists))

    if nearest(m1, 0) != 2 or nearest(m2, 0) != 2:
        return False
    averaged = (m1 + m2) / 2.0
    averaging_breaks = nearest(averaged, 0) != 2

    models = [
        EmbeddingModel(
            vocab=Vocabulary(words=list(words), counts=[1, 1, 1], total_tokens=3),
            vectors=m,
        )
        for m in (m1, m2)
    ]
    merged, _ = alir_merge(
        models,
        MergeConfig(method=ALIR, max_epochs=10, displacement_threshold=1e-9, seed=0),
    )
    rows = [merged.vocab.id(w) for w in words]
    alir_matrix = merged.vectors[rows]
    alir_preserves = nearest(alir_matrix, 0) == 2

    return averaging_breaks and alir_preserves
