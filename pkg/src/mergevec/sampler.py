"""Dividing a corpus into sub-corpora for independent training.

Three strategies are supported: contiguous equal partitioning, uniform
random sampling with replacement (the same sample every epoch), and the
stateless per-epoch Shuffle assignment, where every sentence joins each
sub-corpus independently with probability ``rate/100``, re-drawn each
epoch from a counter-based hash so no coordination is needed between
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._hash import unit_uniform, unit_uniform_array
from .corpus import SentenceStream, Vocabulary

EQUAL_PARTITION = "equal"
RANDOM_SAMPLING = "random"
SHUFFLE = "shuffle"
STRATEGIES = (EQUAL_PARTITION, RANDOM_SAMPLING, SHUFFLE)


@dataclass(frozen=True)
class SamplingPlan:
    """How to split a corpus: rate r%% gives round(100/r) sub-models."""

    rate_percent: float
    seed: int = 0
    epochs: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.rate_percent <= 100:
            raise ValueError("rate_percent must be in (0, 100]")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def n_submodels(self) -> int:
        return max(1, round(100.0 / self.rate_percent))


@dataclass(frozen=True)
class SubCorpusSpec:
    """One sub-corpus: explicit sentence ids, or a seed that regenerates them.

    Materialized strategies (equal, random) carry ``sentence_ids`` that are
    identical across epochs.  Shuffle carries only ``seed`` and
    ``rate_percent``; ids are regenerated per epoch and the same
    (seed, epoch, sub_model_id) always yields the same ids.
    """

    sub_model_id: int
    epoch: int
    strategy: str
    sentence_ids: tuple[int, ...] | None = None
    seed: int | None = None
    rate_percent: float | None = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == SHUFFLE:
            if self.seed is None or self.rate_percent is None:
                raise ValueError("shuffle specs need seed and rate_percent")
        elif self.sentence_ids is None:
            raise ValueError(f"{self.strategy} specs need sentence_ids")


def equal_partition(n_sentences: int, plan: SamplingPlan) -> list[SubCorpusSpec]:
    """Contiguous disjoint blocks covering 0..N-1, sizes differing by <= 1."""
    n = plan.n_submodels
    if n_sentences < n:
        raise ValueError(f"corpus has {n_sentences} sentences, need >= {n}")
    base, rem = divmod(n_sentences, n)
    specs = []
    start = 0
    for i in range(n):
        size = base + (1 if i < rem else 0)
        specs.append(
            SubCorpusSpec(
                sub_model_id=i,
                epoch=0,
                strategy=EQUAL_PARTITION,
                sentence_ids=tuple(range(start, start + size)),
            )
        )
        start += size
    return specs


def random_sample(n_sentences: int, plan: SamplingPlan) -> list[SubCorpusSpec]:
    """Per sub-model, draw round(r*N/100) sentence ids i.i.d. with replacement.

    The draw depends only on (plan.seed, sub_model_id), so the sample is
    identical across epochs and across reruns.
    """
    if n_sentences < 1:
        raise ValueError("empty corpus")
    size = max(1, round(plan.rate_percent * n_sentences / 100.0))
    specs = []
    for i in range(plan.n_submodels):
        rng = np.random.default_rng([plan.seed, i])
        ids = rng.integers(0, n_sentences, size=size)
        specs.append(
            SubCorpusSpec(
                sub_model_id=i,
                epoch=0,
                strategy=RANDOM_SAMPLING,
                sentence_ids=tuple(int(x) for x in ids),
            )
        )
    return specs


def shuffle_specs(plan: SamplingPlan) -> list[SubCorpusSpec]:
    """Seed-only specs for the Shuffle strategy (ids regenerated per epoch)."""
    return [
        SubCorpusSpec(
            sub_model_id=i,
            epoch=0,
            strategy=SHUFFLE,
            seed=plan.seed,
            rate_percent=plan.rate_percent,
        )
        for i in range(plan.n_submodels)
    ]


def shuffle_assign(sentence_id: int, epoch: int, plan: SamplingPlan) -> set[int]:
    """Sub-model ids that receive this sentence in this epoch.

    Each of the n sub-models includes the sentence independently with
    probability rate/100; a sentence may land in several sub-corpora or
    none.  Pure function of (seed, epoch, sub_model_id, sentence_id), so
    any worker can evaluate it without shared state.
    """
    p = plan.rate_percent / 100.0
    return {
        i
        for i in range(plan.n_submodels)
        if unit_uniform(plan.seed, epoch, i, sentence_id) < p
    }


def shuffle_membership(
    n_sentences: int,
    epoch: int,
    sub_model_id: int,
    seed: int,
    rate_percent: float,
) -> np.ndarray:
    """All sentence ids assigned to one sub-model in one epoch (vectorized).

    Agrees exactly with `shuffle_assign` evaluated per sentence.
    """
    u = unit_uniform_array(np.arange(n_sentences, dtype=np.uint64), seed, epoch, sub_model_id)
    return np.nonzero(u < rate_percent / 100.0)[0]


def spec_sentence_ids(spec: SubCorpusSpec, n_sentences: int) -> np.ndarray:
    """Sentence ids of a spec for its own epoch, materializing Shuffle specs."""
    if spec.strategy == SHUFFLE:
        return shuffle_membership(
            n_sentences, spec.epoch, spec.sub_model_id, spec.seed, spec.rate_percent
        )
    return np.asarray(spec.sentence_ids, dtype=np.int64)


def missing_word_threshold(u: float, ell: float) -> float:
    """Occurrence-probability threshold above which a word is unlikely to be
    missed by any random sample.

    For sampling fraction u in (0, 1) and mean sentence length ell, a word
    with corpus probability above ``1 - (1-u)**((1-u)/(ell*u))`` is expected
    to be absent from a sampled sub-corpus only exponentially rarely.
    """
    if not 0 < u < 1:
        raise ValueError("u must be in (0, 1)")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return 1.0 - (1.0 - u) ** ((1.0 - u) / (ell * u))


@dataclass
class CoverageReport:
    """How many sub-corpora contain each vocabulary word."""

    presence_counts: np.ndarray  # per vocab word, number of sub-corpora containing it
    n_subcorpora: int
    intersection_size: int
    union_size: int


def vocabulary_coverage(
    specs: Sequence[SubCorpusSpec],
    stream: SentenceStream,
    vocab: Vocabulary,
) -> CoverageReport:
    """Count, per vocabulary word, the sub-corpora where it occurs at least once."""
    if not specs:
        raise ValueError("no specs")
    n_sentences = len(stream)
    presence = np.zeros(len(vocab), dtype=np.int64)
    for spec in specs:
        seen = np.zeros(len(vocab), dtype=bool)
        ids = spec_sentence_ids(spec, n_sentences)
        for sent in stream.iter_selected(ids):
            for tok in sent:
                i = vocab.get(tok)
                if i is not None:
                    seen[i] = True
        presence += seen
    return CoverageReport(
        presence_counts=presence,
        n_subcorpora=len(specs),
        intersection_size=int((presence == len(specs)).sum()),
        union_size=int((presence >= 1).sum()),
    )


def spec_to_line(spec: SubCorpusSpec) -> str:
    """Serialize as "sub_model_id<TAB>epoch<TAB>strategy<TAB>seed-or-id-list"."""
    if spec.strategy == SHUFFLE:
        payload = str(spec.seed)
    else:
        payload = ",".join(str(i) for i in spec.sentence_ids)
    return f"{spec.sub_model_id}\t{spec.epoch}\t{spec.strategy}\t{payload}"


def spec_from_line(line: str, rate_percent: float | None = None) -> SubCorpusSpec:
    """Inverse of `spec_to_line`; Shuffle specs need the plan's rate."""
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 4:
        raise ValueError(f"malformed spec line: {line!r}")
    sub_id, epoch, strategy, payload = parts
    if strategy == SHUFFLE:
        return SubCorpusSpec(
            sub_model_id=int(sub_id),
            epoch=int(epoch),
            strategy=strategy,
            seed=int(payload),
            rate_percent=rate_percent,
        )
    ids = tuple(int(x) for x in payload.split(",")) if payload else ()
    return SubCorpusSpec(
        sub_model_id=int(sub_id), epoch=int(epoch), strategy=strategy, sentence_ids=ids
    )


def save_specs(specs: Iterable[SubCorpusSpec], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for spec in specs:
            fh.write(spec_to_line(spec) + "\n")


def load_specs(path: str | Path, rate_percent: float | None = None) -> list[SubCorpusSpec]:
    specs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                specs.append(spec_from_line(line, rate_percent=rate_percent))
    return specs
