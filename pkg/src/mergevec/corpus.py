"""Corpus ingestion, vocabulary construction and distributional statistics.

Corpus files are UTF-8 plain text with one sentence per line.  Everything
downstream (sampling, training, merging) indexes words through the
:class:`Vocabulary` built here, so its ordering is the row order of every
embedding matrix in the package.
"""

from __future__ import annotations

import math
import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

import numpy as np

if TYPE_CHECKING:
    from .sgns import EmbeddingModel

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def tokenize_line(text: str) -> list[str]:
    """Lowercase and whitespace-split, stripping punctuation from tokens.

    Tokens that consist only of punctuation are dropped.  Deterministic:
    the same string always yields the same token list.
    """
    tokens = []
    for raw in text.lower().split():
        tok = raw.translate(_PUNCT_TABLE)
        if tok:
            tokens.append(tok)
    return tokens


@dataclass
class Vocabulary:
    """Ordered word list with occurrence counts.

    The word -> index mapping is a bijection onto ``0..len(self)-1`` and is
    the row order of every matrix keyed by this vocabulary.
    ``total_tokens`` counts the corpus tokens seen at construction time,
    before any min-count pruning, so it is >= the sum of retained counts.
    """

    words: list[str]
    counts: list[int]
    total_tokens: int
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.words) != len(self.counts):
            raise ValueError("words and counts length mismatch")
        if len(set(self.words)) != len(self.words):
            raise ValueError("duplicate words in vocabulary")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative count")
        self._index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def id(self, word: str) -> int:
        return self._index[word]

    def get(self, word: str, default: int | None = None) -> int | None:
        return self._index.get(word, default)

    def count(self, word: str) -> int:
        return self.counts[self._index[word]]


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """Write "word<TAB>count" lines in vocabulary order."""
    with open(path, "w", encoding="utf-8") as fh:
        for word, count in zip(vocab.words, vocab.counts):
            fh.write(f"{word}\t{count}\n")


def load_vocabulary(path: str | Path) -> Vocabulary:
    words: list[str] = []
    counts: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                word, count = line.split("\t")
                counts.append(int(count))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed vocabulary line") from exc
            words.append(word)
    return Vocabulary(words=words, counts=counts, total_tokens=sum(counts))


class SentenceStream:
    """Seekable iterator over the tokenized sentences of a corpus.

    Accepts either a path to a one-sentence-per-line text file or an
    in-memory sequence of token lists.  Lines that tokenize to nothing are
    skipped, so every yielded sentence is non-empty and sentence ids are
    stable across passes.  File access opens a fresh handle per pass /
    per `iter_selected` call, which keeps concurrent readers safe.
    """

    def __init__(self, source: str | Path | Sequence[Sequence[str]]):
        if isinstance(source, (str, Path)):
            self._path: Path | None = Path(source)
            self._sentences: list[list[str]] | None = None
        else:
            self._path = None
            self._sentences = [list(s) for s in source if len(s) > 0]
        self._offsets: np.ndarray | None = None
        self._total_tokens: int | None = None

    def _ensure_index(self) -> None:
        """Record the byte offset of every non-empty sentence line."""
        if self._offsets is not None or self._path is None:
            return
        offsets = []
        total = 0
        with open(self._path, "rb") as fh:
            pos = fh.tell()
            for raw in fh:
                toks = tokenize_line(raw.decode("utf-8"))
                if toks:
                    offsets.append(pos)
                    total += len(toks)
                pos += len(raw)
        self._offsets = np.asarray(offsets, dtype=np.int64)
        self._total_tokens = total

    def __len__(self) -> int:
        if self._sentences is not None:
            return len(self._sentences)
        self._ensure_index()
        return int(len(self._offsets))

    def __iter__(self) -> Iterator[list[str]]:
        if self._sentences is not None:
            yield from self._sentences
            return
        with open(self._path, encoding="utf-8") as fh:
            for line in fh:
                toks = tokenize_line(line)
                if toks:
                    yield toks

    def sentence(self, i: int) -> list[str]:
        if self._sentences is not None:
            return self._sentences[i]
        self._ensure_index()
        with open(self._path, encoding="utf-8") as fh:
            fh.seek(int(self._offsets[i]))
            return tokenize_line(fh.readline())

    def iter_selected(self, ids: Sequence[int]) -> Iterator[list[str]]:
        """Yield sentences for the given ids, in order, repeats allowed."""
        if self._sentences is not None:
            for i in ids:
                yield self._sentences[i]
            return
        self._ensure_index()
        with open(self._path, encoding="utf-8") as fh:
            for i in ids:
                fh.seek(int(self._offsets[i]))
                yield tokenize_line(fh.readline())

    def total_tokens(self) -> int:
        if self._total_tokens is None:
            if self._sentences is not None:
                self._total_tokens = sum(len(s) for s in self._sentences)
            else:
                self._ensure_index()
        return int(self._total_tokens)

    def mean_sentence_length(self) -> float:
        n = len(self)
        if n == 0:
            raise ValueError("empty corpus")
        return self.total_tokens() / n


@dataclass
class Distribution:
    """Probability distribution over word ids or ordered word-id pairs."""

    kind: str  # "unigram" | "bigram"
    probs: dict

    def __post_init__(self) -> None:
        if self.kind not in ("unigram", "bigram"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        total = math.fsum(self.probs.values())
        if any(p < 0 for p in self.probs.values()):
            raise ValueError("negative probability")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @property
    def support(self) -> set:
        return {e for e, p in self.probs.items() if p > 0}


def build_vocabulary(
    stream: Iterable[Sequence[str]],
    min_count: int = 1,
    max_size: int | None = None,
) -> Vocabulary:
    """Count words and keep the most frequent ones.

    Retains up to ``max_size`` words with count >= ``min_count``, ordered by
    descending count with lexicographic tie-breaking (the ordering is what
    makes every downstream matrix deterministic).
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    if max_size is not None and max_size < 1:
        raise ValueError("max_size must be >= 1")
    counter: Counter[str] = Counter()
    total = 0
    for sent in stream:
        counter.update(sent)
        total += len(sent)
    if total == 0:
        raise ValueError("empty corpus")
    kept = sorted(
        ((w, c) for w, c in counter.items() if c >= min_count),
        key=lambda wc: (-wc[1], wc[0]),
    )
    if max_size is not None:
        kept = kept[:max_size]
    return Vocabulary(
        words=[w for w, _ in kept],
        counts=[c for _, c in kept],
        total_tokens=total,
    )


def unigram_distribution(stream: Iterable[Sequence[str]], vocab: Vocabulary) -> Distribution:
    """P(w) over vocabulary ids; out-of-vocabulary tokens are ignored.

    Every vocabulary word appears in the support map, possibly with
    probability 0.
    """
    if len(vocab) == 0:
        raise ValueError("empty vocabulary")
    counts = np.zeros(len(vocab), dtype=np.int64)
    for sent in stream:
        for tok in sent:
            i = vocab.get(tok)
            if i is not None:
                counts[i] += 1
    total = int(counts.sum())
    if total == 0:
        raise ValueError("no in-vocabulary tokens")
    return Distribution(
        kind="unigram",
        probs={i: counts[i] / total for i in range(len(vocab))},
    )


def bigram_distribution(stream: Iterable[Sequence[str]], vocab: Vocabulary) -> Distribution:
    """P(w1, w2) over ordered pairs of adjacent in-vocabulary tokens.

    Both tokens of a pair must be adjacent in the sentence and in the
    vocabulary; pairs never cross sentence boundaries.
    """
    if len(vocab) == 0:
        raise ValueError("empty vocabulary")
    counter: Counter[tuple[int, int]] = Counter()
    for sent in stream:
        prev = vocab.get(sent[0]) if sent else None
        for tok in sent[1:]:
            cur = vocab.get(tok)
            if prev is not None and cur is not None:
                counter[(prev, cur)] += 1
            prev = cur
    total = sum(counter.values())
    if total == 0:
        raise ValueError("no bigrams")
    return Distribution(
        kind="bigram",
        probs={pair: c / total for pair, c in counter.items()},
    )


def kl_divergence(p_sample: Distribution, p_full: Distribution) -> float:
    """KL(p_sample || p_full) in nats.

    Events with p_sample = 0 contribute nothing; an event with positive
    sample mass but zero corpus mass is a support violation (it cannot
    happen for samples drawn from the corpus itself).
    """
    if p_sample.kind != p_full.kind:
        raise ValueError("distribution kinds differ")
    terms = []
    for event, p in p_sample.probs.items():
        if p <= 0:
            continue
        q = p_full.probs.get(event, 0.0)
        if q <= 0:
            raise ValueError(f"support violation at event {event!r}")
        terms.append(p * math.log(p / q))
    return math.fsum(terms)


def shifted_pmi_diagnostic(
    model: "EmbeddingModel",
    stream: SentenceStream,
    vocab: Vocabulary,
    k: int,
    pairs: Sequence[tuple[str, str]],
) -> float:
    """Correlation between w.c dot products and PMI(w, c) - log(k).

    A trained skip-gram model factorizes the shifted PMI matrix, so the
    dot product of a word vector with a context vector should track
    log(P(w,c) / (P(w) P(c))) - log(k).  Returns the Pearson correlation
    over the supplied pairs; joint probabilities come from the adjacent
    in-vocabulary pair distribution of the stream.  Diagnostic only, no
    threshold is applied.
    """
    if model.context is None:
        raise ValueError("model has no context matrix")
    if k < 1:
        raise ValueError("k must be >= 1")
    uni = unigram_distribution(stream, vocab)
    bi = bigram_distribution(stream, vocab)
    dots = []
    shifted = []
    for w, c in pairs:
        iw, ic = vocab.get(w), vocab.get(c)
        if iw is None or ic is None:
            continue
        joint = bi.probs.get((iw, ic), 0.0)
        if joint <= 0:
            continue
        mw, mc = model.vocab.get(w), model.vocab.get(c)
        if mw is None or mc is None:
            continue
        dots.append(float(model.vectors[mw] @ model.context[mc]))
        shifted.append(math.log(joint / (uni.probs[iw] * uni.probs[ic])) - math.log(k))
    if len(dots) < 10:
        raise ValueError(f"only {len(dots)} valid pairs, need at least 10")
    return float(np.corrcoef(dots, shifted)[0, 1])
