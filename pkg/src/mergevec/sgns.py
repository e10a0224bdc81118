"""Skip-gram negative-sampling training with lock-free parallel workers.

One sub-model trains completely independently of all others: the only
shared mutable state is *inside* a single `train_submodel` call, where
worker threads update the word and context matrices without locks.
Conflicting row updates are accepted (they are rare and statistically
harmless); the learning-rate schedule reads a shared per-worker pair
counter whose staleness is equally harmless.  With ``workers=1`` training
is fully deterministic and bit-reproducible for a fixed seed.

Defaults that the literature leaves open follow the reference toolkit
conventions: word vectors start Uniform(-0.5/d, 0.5/d) and context
vectors at zero; the learning rate decays linearly from ``initial_lr``
to ``min_lr`` over the expected number of training pairs; the effective
window per center word is drawn uniformly from [1, window].
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from ._hash import mix_key
from .corpus import SentenceStream, Vocabulary
from .sampler import SHUFFLE, SubCorpusSpec, shuffle_membership


@dataclass
class TrainConfig:
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    min_lr: float = 1e-4
    subsample_t: float | None = 1e-4  # None disables frequent-word subsampling
    workers: int = 1
    seed: int = 1

    def __post_init__(self) -> None:
        if self.dim < 1 or self.window < 1 or self.negatives < 1:
            raise ValueError("dim, window and negatives must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not self.initial_lr > self.min_lr >= 0:
            raise ValueError("need initial_lr > min_lr >= 0")
        if self.subsample_t is not None and self.subsample_t <= 0:
            raise ValueError("subsample_t must be positive or None")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class EmbeddingModel:
    """A vocabulary plus its |V| x d word-vector matrix (context optional)."""

    vocab: Vocabulary
    vectors: np.ndarray
    context: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.vectors.shape[0] != len(self.vocab):
            raise ValueError("vector row count != vocabulary size")
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be 2-d")
        if not np.isfinite(self.vectors).all():
            raise ValueError("non-finite entries in word vectors")
        if self.context is not None:
            if self.context.shape != self.vectors.shape:
                raise ValueError("context shape mismatch")
            if not np.isfinite(self.context).all():
                raise ValueError("non-finite entries in context vectors")

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __contains__(self, word: str) -> bool:
        return word in self.vocab

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self.vocab.id(word)]


@dataclass
class NoiseTable:
    """Cumulative distribution over word ids with mass proportional to count^0.75."""

    cdf: np.ndarray

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.searchsorted(self.cdf, rng.random(size), side="right")


def build_noise_table(vocab: Vocabulary) -> NoiseTable:
    if len(vocab) < 2:
        raise ValueError("need at least 2 words to sample negatives")
    weights = np.asarray(vocab.counts, dtype=np.float64) ** 0.75
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    return NoiseTable(cdf=cdf)


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _log_sigmoid(x: float) -> float:
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


def sgd_step(
    w_vec: np.ndarray,
    c_vec: np.ndarray,
    label: int,
    lr: float,
) -> tuple[np.ndarray, np.ndarray]:
    """One gradient-ascent step on the pair objective, returning new vectors.

    For g = label - sigmoid(w.c): w' = w + lr*g*c and c' = c + lr*g*w,
    where the context update uses the pre-update w.
    """
    if lr <= 0:
        raise ValueError("lr must be positive")
    g = (label - sigmoid(float(w_vec @ c_vec))) * lr
    w_new = w_vec + g * c_vec
    c_new = c_vec + g * w_vec
    return w_new, c_new


def subsample_keep_probability(word_freq: float, t: float) -> float:
    """Probability of keeping a token of relative frequency ``word_freq``.

    keep = min(1, sqrt(t/f) + t/f): monotonically decreasing in f and equal
    to 1 for all f below roughly 2.62*t.
    """
    if word_freq <= 0:
        raise ValueError("word frequency must be positive")
    if t <= 0:
        raise ValueError("t must be positive")
    ratio = t / word_freq
    return min(1.0, math.sqrt(ratio) + ratio)


def objective_value(
    model: EmbeddingModel,
    pairs: Sequence[tuple[int, int]],
    k: int,
    seed: int = 0,
) -> float:
    """Mean per-pair value of the training objective on the given id pairs.

    Each (word, context) pair contributes log sigmoid(w.c) plus the sum of
    log sigmoid(-w.c') over k negatives drawn from the noise table with a
    fixed seed, so the value is reproducible.  A drawn negative equal to
    the pair's context is redrawn (up to 8 attempts, then skipped), the
    same collision rule the trainer applies, so this measures exactly the
    objective that training ascends.
    """
    if model.context is None:
        raise ValueError("model has no context matrix")
    noise = build_noise_table(model.vocab)
    rng = np.random.default_rng(seed)
    W, C = model.vectors, model.context
    values = []
    for w, c in pairs:
        v = _log_sigmoid(float(W[w] @ C[c]))
        for _ in range(k):
            for _attempt in range(8):
                neg = int(noise.sample(rng, 1)[0])
                if neg != c:
                    v += _log_sigmoid(-float(W[w] @ C[neg]))
                    break
        values.append(v)
    return float(np.mean(values))


@dataclass
class EncodedCorpus:
    """Vocabulary-encoded sentences: concatenated in-vocab token ids plus
    per-sentence offsets.  Out-of-vocabulary tokens are dropped at encode
    time; a sentence may therefore have an empty span."""

    tokens: np.ndarray  # int32
    offsets: np.ndarray  # int64, len = n_sentences + 1
    full_corpus: bool  # True when sentence axis == original sentence ids

    @property
    def n_sentences(self) -> int:
        return len(self.offsets) - 1


def encode_corpus(
    stream: SentenceStream,
    vocab: Vocabulary,
    sentence_ids: Sequence[int] | None = None,
) -> EncodedCorpus:
    tokens: list[int] = []
    offsets = [0]
    sentences = stream if sentence_ids is None else stream.iter_selected(sentence_ids)
    for sent in sentences:
        for tok in sent:
            i = vocab.get(tok)
            if i is not None:
                tokens.append(i)
        offsets.append(len(tokens))
    return EncodedCorpus(
        tokens=np.asarray(tokens, dtype=np.int32),
        offsets=np.asarray(offsets, dtype=np.int64),
        full_corpus=sentence_ids is None,
    )


# splitmix64 constants, shared with mergevec._hash but inlined here so the
# kernel stays self-contained for numba.
_SM_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SM_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(inline="always")
def _rng_next(state):
    state = state + _SM_GOLDEN
    z = state
    z = (z ^ (z >> np.uint64(30))) * _SM_MIX1
    z = (z ^ (z >> np.uint64(27))) * _SM_MIX2
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(inline="always")
def _rng_unit(state):
    state, z = _rng_next(state)
    return state, float(z >> np.uint64(11)) * _INV_2_53


@njit(inline="always")
def _pair_update(W, C, w, c, label, lr):
    dim = W.shape[1]
    dot = 0.0
    for d in range(dim):
        dot += float(W[w, d]) * float(C[c, d])
    if dot > 18.0:
        sig = 1.0
    elif dot < -18.0:
        sig = 0.0
    else:
        sig = 1.0 / (1.0 + math.exp(-dot))
    g = (label - sig) * lr
    for d in range(dim):
        tmp = W[w, d]
        W[w, d] = tmp + np.float32(g * float(C[c, d]))
        C[c, d] = C[c, d] + np.float32(g * float(tmp))


@njit(nogil=True, cache=True)
def _train_shard(
    W,
    C,
    tokens,
    offsets,
    order,
    keep_prob,
    use_subsample,
    noise_cdf,
    window,
    k_neg,
    alpha0,
    min_alpha,
    total_pairs,
    pair_counts,
    worker_id,
    rng_seed,
):
    """Train over one shard of sentences, updating W and C in place.

    Racy updates from concurrent workers are permitted on W and C;
    ``pair_counts[worker_id]`` is this worker's private cell and the
    learning rate reads the (possibly stale) sum of all cells.
    """
    state = rng_seed
    n_workers = pair_counts.shape[0]
    uwin = np.uint64(window)
    max_len = 0
    for s in order:
        span = offsets[s + 1] - offsets[s]
        if span > max_len:
            max_len = span
    kept = np.empty(max_len, dtype=np.int32)
    lr = alpha0
    for s in order:
        start, stop = offsets[s], offsets[s + 1]
        m = 0
        for t in range(start, stop):
            wid = tokens[t]
            if use_subsample:
                state, u = _rng_unit(state)
                if u >= keep_prob[wid]:
                    continue
            kept[m] = wid
            m += 1
        for i in range(m):
            center = kept[i]
            state, z = _rng_next(state)
            b = 1 + int(z % uwin)
            lo = i - b if i - b > 0 else 0
            hi = i + b + 1 if i + b + 1 < m else m
            for j in range(lo, hi):
                if j == i:
                    continue
                ctx = kept[j]
                pair_counts[worker_id] += 1
                done = 0.0
                for wkr in range(n_workers):
                    done += pair_counts[wkr]
                lr = alpha0 * (1.0 - done / total_pairs)
                if lr < min_alpha:
                    lr = min_alpha
                _pair_update(W, C, center, ctx, 1.0, lr)
                for _ in range(k_neg):
                    neg = -1
                    for _attempt in range(8):
                        state, u = _rng_unit(state)
                        cand = np.searchsorted(noise_cdf, u, side="right")
                        if cand != ctx:
                            neg = cand
                            break
                    if neg >= 0:
                        _pair_update(W, C, center, neg, 0.0, lr)


def _keep_probabilities(vocab: Vocabulary, t: float | None) -> np.ndarray:
    if t is None:
        return np.ones(len(vocab), dtype=np.float64)
    total = float(sum(vocab.counts))
    freqs = np.asarray(vocab.counts, dtype=np.float64) / total
    keep = np.minimum(1.0, np.sqrt(t / freqs) + t / freqs)
    return keep


def _expected_pairs(
    tokens_per_epoch: float, keep_prob: np.ndarray, vocab: Vocabulary, config: TrainConfig
) -> float:
    """Rough total pair count driving the linear learning-rate decay."""
    total = float(sum(vocab.counts))
    if total <= 0:
        return 1.0
    freqs = np.asarray(vocab.counts, dtype=np.float64) / total
    kept_ratio = float(np.sum(freqs * keep_prob))
    est = config.epochs * tokens_per_epoch * kept_ratio * (config.window + 1)
    return max(est, 1.0)


def train_submodel(
    spec: SubCorpusSpec | None,
    stream: SentenceStream,
    vocab: Vocabulary,
    config: TrainConfig,
    encoded: EncodedCorpus | None = None,
) -> EmbeddingModel:
    """Train one sub-model on the sentences selected by ``spec``.

    ``spec=None`` trains on the full corpus.  Materialized specs (equal /
    random) reuse the same sentences every epoch; Shuffle specs redraw
    their sentence set each epoch from the spec's seed.  ``encoded`` may
    pass a previously encoded full corpus to avoid re-encoding when many
    sub-models share a vocabulary.
    """
    n_sentences = len(stream)
    if n_sentences == 0:
        raise ValueError("empty corpus")
    if encoded is not None and not encoded.full_corpus:
        raise ValueError("encoded corpus must cover the full stream")

    sub_id = spec.sub_model_id if spec is not None else 0
    if spec is None:
        if encoded is None:
            encoded = encode_corpus(stream, vocab)
        epoch_order = [
            np.arange(encoded.n_sentences, dtype=np.int64) for _ in range(config.epochs)
        ]
    elif spec.strategy == SHUFFLE:
        if encoded is None:
            encoded = encode_corpus(stream, vocab)
        epoch_order = [
            shuffle_membership(n_sentences, e, sub_id, spec.seed, spec.rate_percent)
            for e in range(config.epochs)
        ]
    else:
        if encoded is None:
            encoded = encode_corpus(stream, vocab, spec.sentence_ids)
            ids = np.arange(encoded.n_sentences, dtype=np.int64)
        else:
            ids = np.asarray(spec.sentence_ids, dtype=np.int64)
        epoch_order = [ids for _ in range(config.epochs)]

    dim = config.dim
    rng = np.random.default_rng([config.seed, sub_id])
    W = ((rng.random((len(vocab), dim)) - 0.5) / dim).astype(np.float32)
    C = np.zeros((len(vocab), dim), dtype=np.float32)

    if config.epochs == 0:
        return EmbeddingModel(vocab=vocab, vectors=W, context=C)

    keep_prob = _keep_probabilities(vocab, config.subsample_t)
    noise_cdf = build_noise_table(vocab).cdf
    if spec is not None and spec.strategy == SHUFFLE:
        tokens_per_epoch = len(encoded.tokens) * spec.rate_percent / 100.0
    elif spec is not None and encoded.full_corpus:
        lengths = np.diff(encoded.offsets)
        tokens_per_epoch = float(lengths[np.asarray(spec.sentence_ids)].sum())
    else:
        tokens_per_epoch = float(len(encoded.tokens))
    total_pairs = _expected_pairs(tokens_per_epoch, keep_prob, vocab, config)

    pair_counts = np.zeros(max(config.workers, 1), dtype=np.int64)
    use_subsample = config.subsample_t is not None

    for epoch, order in enumerate(epoch_order):
        shards = np.array_split(order, config.workers)
        if config.workers == 1:
            _train_shard(
                W,
                C,
                encoded.tokens,
                encoded.offsets,
                shards[0],
                keep_prob,
                use_subsample,
                noise_cdf,
                config.window,
                config.negatives,
                config.initial_lr,
                config.min_lr,
                total_pairs,
                pair_counts,
                0,
                mix_key(config.seed, sub_id, epoch, 0),
            )
        else:
            threads = []
            for wkr, shard in enumerate(shards):
                threads.append(
                    threading.Thread(
                        target=_train_shard,
                        args=(
                            W,
                            C,
                            encoded.tokens,
                            encoded.offsets,
                            shard,
                            keep_prob,
                            use_subsample,
                            noise_cdf,
                            config.window,
                            config.negatives,
                            config.initial_lr,
                            config.min_lr,
                            total_pairs,
                            pair_counts,
                            wkr,
                            mix_key(config.seed, sub_id, epoch, wkr),
                        ),
                    )
                )
            for th in threads:
                th.start()
            for th in threads:
                th.join()

    if int(pair_counts.sum()) == 0:
        raise ValueError("no training pairs (corpus empty after subsampling)")
    return EmbeddingModel(vocab=vocab, vectors=W, context=C)


def save_model(model: EmbeddingModel, path: str | Path, save_context: bool = False) -> None:
    """Write the word2vec text format: "|V| d" then one "word v1 .. vd" per line.

    Values are written with full round-trip precision.  With
    ``save_context=True`` the context matrix goes to ``<path>.ctx`` in the
    same format.
    """
    path = Path(path)
    _write_matrix(path, model.vocab, model.vectors)
    if save_context:
        if model.context is None:
            raise ValueError("model has no context matrix")
        _write_matrix(path.with_suffix(path.suffix + ".ctx"), model.vocab, model.context)


def _write_matrix(path: Path, vocab: Vocabulary, matrix: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(vocab)} {matrix.shape[1]}\n")
        for i, word in enumerate(vocab.words):
            row = " ".join(repr(float(v)) for v in matrix[i])
            fh.write(f"{word} {row}\n")


def load_model(path: str | Path, load_context: bool = False) -> EmbeddingModel:
    """Read a word2vec text file; counts are not stored in the format, so
    the resulting vocabulary carries count 1 for every word."""
    path = Path(path)
    words, matrix = _read_matrix(path)
    vocab = Vocabulary(words=words, counts=[1] * len(words), total_tokens=len(words))
    context = None
    ctx_path = path.with_suffix(path.suffix + ".ctx")
    if load_context and ctx_path.exists():
        ctx_words, context = _read_matrix(ctx_path)
        if ctx_words != words:
            raise ValueError(f"{ctx_path}: context vocabulary differs from {path}")
    return EmbeddingModel(vocab=vocab, vectors=matrix, context=context)


def _read_matrix(path: Path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}:1: malformed header")
        n, dim = int(header[0]), int(header[1])
        words: list[str] = []
        matrix = np.empty((n, dim), dtype=np.float64)
        for i in range(n):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: expected {n} rows, found {i}")
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise ValueError(f"{path}:{i + 2}: expected {dim + 1} fields")
            words.append(parts[0])
            matrix[i] = [float(x) for x in parts[1:]]
    return words, matrix
