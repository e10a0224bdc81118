"""Command-line pipeline: divide -> train -> merge -> eval, plus the
distribution statistics and missing-word robustness experiments.

Exit codes: 0 success, 1 usage error, 2 runtime failure.  Every output
file is written to a temporary sibling and renamed into place, so a
failing command leaves no partial outputs at the final paths.  All
experiment outputs are CSV so figures can be re-plotted externally.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import corpus as corpus_mod
from . import evaluate as eval_mod
from . import merge as merge_mod
from . import sampler as sampler_mod
from . import sgns as sgns_mod

DEFAULTS = {
    "rate": 10.0,
    "strategy": sampler_mod.SHUFFLE,
    "dim": 100,
    "window": 5,
    "negatives": 5,
    "epochs": 5,
    "min_count": None,
    "max_vocab": None,
    "initial_lr": 0.025,
    "min_lr": 1e-4,
    "subsample_t": 1e-4,
    "no_subsample": False,
    "workers": 1,
    "workers_global": None,
    "seed": 1,
    "merge": merge_mod.ALIR,
    "alir_init": merge_mod.INIT_RANDOM,
    "merge_epochs": 3,
    "displacement_threshold": 1e-4,
    "save_context": False,
    "removal_fraction": 0.5,
}

BENCH_KINDS = {
    ".sim": eval_mod.SIMILARITY,
    ".cat": eval_mod.CATEGORIZATION,
    ".ana": eval_mod.ANALOGY,
}


@dataclass
class PipelineConfig:
    """Everything one run needs; the seed feeds every stochastic component."""

    corpus: Path | None
    out_dir: Path
    strategy: str
    plan: sampler_mod.SamplingPlan
    train: sgns_mod.TrainConfig
    merge: merge_mod.MergeConfig
    benchmarks: Path | None
    min_count: int | None
    max_vocab: int | None
    workers_global: int
    seed: int


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _read_config_file(path: str) -> dict:
    """Plain key=value file; '#' starts a comment.  Flags override these."""
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, raw = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if raw.lower() in ("true", "false"):
                values[key] = raw.lower() == "true"
                continue
            for cast in (int, float):
                try:
                    values[key] = cast(raw)
                    break
                except ValueError:
                    continue
            else:
                values[key] = raw
    return values


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--corpus", help="corpus file, one sentence per line")
    p.add_argument("--out", help="output directory")
    p.add_argument("--rate", type=float, help="sampling rate r in percent")
    p.add_argument(
        "--strategy", choices=list(sampler_mod.STRATEGIES), help="division strategy"
    )
    p.add_argument("--dim", type=int, help="embedding dimensionality")
    p.add_argument("--window", type=int, help="context window size")
    p.add_argument("--negatives", type=int, help="negative samples per pair")
    p.add_argument("--epochs", type=int, help="training epochs")
    p.add_argument("--min-count", type=int, dest="min_count", help="vocabulary min count")
    p.add_argument("--max-vocab", type=int, dest="max_vocab", help="vocabulary size cap")
    p.add_argument("--subsample-t", type=float, dest="subsample_t")
    p.add_argument("--no-subsample", action="store_true", dest="no_subsample", default=None)
    p.add_argument("--workers", type=int, help="threads per sub-model")
    p.add_argument(
        "--workers-global", type=int, dest="workers_global",
        help="sub-models trained concurrently",
    )
    p.add_argument("--seed", type=int)
    p.add_argument("--merge", choices=list(merge_mod.MERGE_METHODS), dest="merge")
    p.add_argument(
        "--alir-init", choices=[merge_mod.INIT_RANDOM, merge_mod.INIT_PCA],
        dest="alir_init",
    )
    p.add_argument("--merge-epochs", type=int, dest="merge_epochs")
    p.add_argument(
        "--displacement-threshold", type=float, dest="displacement_threshold"
    )
    p.add_argument("--benchmarks", help="directory of *.sim/*.cat/*.ana files")
    p.add_argument("--save-context", action="store_true", dest="save_context", default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="mergevec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("divide", "write sub-corpus spec files"),
        ("train", "train one sub-model per spec file"),
        ("merge", "merge trained sub-models"),
        ("eval", "evaluate a model on benchmark files"),
        ("stats", "KL-divergence and coverage statistics of the division"),
        ("missing-words", "robustness to benchmark words removed from sub-models"),
        ("pipeline", "divide, train, merge and evaluate in one run"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "eval":
            p.add_argument("--model", help="word2vec-format model file")
        if name == "missing-words":
            p.add_argument(
                "--removal-fraction", type=float, dest="removal_fraction",
                help="fraction of unique benchmark words to remove",
            )
    return parser


def _resolve(args: argparse.Namespace) -> dict:
    """Flag > config file > built-in default, per option."""
    file_values = _read_config_file(args.config) if args.config else {}
    resolved = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        resolved[key] = flag if flag is not None else file_values.get(key, default)
    for key in ("corpus", "out", "benchmarks", "model"):
        flag = getattr(args, key, None)
        resolved[key] = flag if flag is not None else file_values.get(key)
    return resolved


def _pipeline_config(res: dict, need_corpus: bool) -> PipelineConfig:
    if need_corpus and not res["corpus"]:
        raise ValueError("--corpus is required")
    if not res["out"]:
        raise ValueError("--out is required")
    corpus_path = Path(res["corpus"]) if res["corpus"] else None
    if corpus_path is not None and not corpus_path.exists():
        raise FileNotFoundError(f"corpus not found: {corpus_path}")
    benchmarks = Path(res["benchmarks"]) if res["benchmarks"] else None
    if benchmarks is not None and not benchmarks.is_dir():
        raise FileNotFoundError(f"benchmark directory not found: {benchmarks}")
    seed = int(res["seed"])
    plan = sampler_mod.SamplingPlan(
        rate_percent=float(res["rate"]), seed=seed, epochs=int(res["epochs"])
    )
    train = sgns_mod.TrainConfig(
        dim=int(res["dim"]),
        window=int(res["window"]),
        negatives=int(res["negatives"]),
        epochs=int(res["epochs"]),
        initial_lr=float(res["initial_lr"]),
        min_lr=float(res["min_lr"]),
        subsample_t=None if res["no_subsample"] else float(res["subsample_t"]),
        workers=int(res["workers"]),
        seed=seed,
    )
    merge_cfg = merge_mod.MergeConfig(
        method=res["merge"],
        alir_init=res["alir_init"],
        target_dim=int(res["dim"]),
        max_epochs=int(res["merge_epochs"]),
        displacement_threshold=float(res["displacement_threshold"]),
        seed=seed,
    )
    workers_global = res["workers_global"]
    if workers_global is None:
        workers_global = max(1, min(plan.n_submodels, os.cpu_count() or 1))
    out_dir = Path(res["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    return PipelineConfig(
        corpus=corpus_path,
        out_dir=out_dir,
        strategy=res["strategy"],
        plan=plan,
        train=train,
        merge=merge_cfg,
        benchmarks=benchmarks,
        min_count=res["min_count"],
        max_vocab=res["max_vocab"],
        workers_global=int(workers_global),
        seed=seed,
    )


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _atomic_save(path: Path, save: Callable[[Path], None]) -> None:
    tmp = path.with_name(path.name + ".tmp")
    save(tmp)
    os.replace(tmp, path)


def _spec_path(out_dir: Path, i: int) -> Path:
    return out_dir / f"spec_{i:03d}.tsv"


def _model_path(out_dir: Path, i: int) -> Path:
    return out_dir / f"sub_{i:03d}.vec"


def _make_specs(cfg: PipelineConfig, n_sentences: int) -> list[sampler_mod.SubCorpusSpec]:
    if cfg.strategy == sampler_mod.EQUAL_PARTITION:
        return sampler_mod.equal_partition(n_sentences, cfg.plan)
    if cfg.strategy == sampler_mod.RANDOM_SAMPLING:
        return sampler_mod.random_sample(n_sentences, cfg.plan)
    return sampler_mod.shuffle_specs(cfg.plan)


def cmd_divide(cfg: PipelineConfig) -> list[Path]:
    stream = corpus_mod.SentenceStream(cfg.corpus)
    specs = _make_specs(cfg, len(stream))
    paths = []
    for spec in specs:
        path = _spec_path(cfg.out_dir, spec.sub_model_id)
        _atomic_write_text(path, sampler_mod.spec_to_line(spec) + "\n")
        paths.append(path)
    print(f"divide: wrote {len(paths)} spec files to {cfg.out_dir}")
    return paths


def _effective_min_count(cfg: PipelineConfig) -> int:
    """Shuffle precomputes one full-corpus vocabulary; the materialized
    strategies default to the per-sub-model threshold 100/k."""
    if cfg.min_count is not None:
        return cfg.min_count
    if cfg.strategy == sampler_mod.SHUFFLE:
        return 1
    return max(1, round(100 / cfg.plan.n_submodels))


def cmd_train(cfg: PipelineConfig) -> list[Path]:
    stream = corpus_mod.SentenceStream(cfg.corpus)
    spec_files = sorted(cfg.out_dir.glob("spec_*.tsv"))
    if not spec_files:
        raise FileNotFoundError(f"no spec files in {cfg.out_dir}; run divide first")
    specs = []
    for path in spec_files:
        specs.extend(sampler_mod.load_specs(path, rate_percent=cfg.plan.rate_percent))
    min_count = _effective_min_count(cfg)

    shared_vocab = None
    shared_encoded = None
    if cfg.strategy == sampler_mod.SHUFFLE:
        shared_vocab = corpus_mod.build_vocabulary(
            stream, min_count=min_count, max_size=cfg.max_vocab
        )
        shared_encoded = sgns_mod.encode_corpus(stream, shared_vocab)
        for spec in specs:
            for epoch in range(cfg.train.epochs):
                ids = sampler_mod.shuffle_membership(
                    len(stream), epoch, spec.sub_model_id, spec.seed, spec.rate_percent
                )
                print(
                    f"train: sub {spec.sub_model_id} epoch {epoch}: "
                    f"{len(ids)} sentences (first: {ids[:3].tolist()})"
                )

    def train_one(spec: sampler_mod.SubCorpusSpec) -> Path:
        if cfg.strategy == sampler_mod.SHUFFLE:
            vocab, encoded = shared_vocab, shared_encoded
        else:
            sentences = list(stream.iter_selected(spec.sentence_ids))
            vocab = corpus_mod.build_vocabulary(
                corpus_mod.SentenceStream(sentences),
                min_count=min_count,
                max_size=cfg.max_vocab,
            )
            encoded = None
        model = sgns_mod.train_submodel(spec, stream, vocab, cfg.train, encoded=encoded)
        path = _model_path(cfg.out_dir, spec.sub_model_id)
        _atomic_save(path, lambda p: sgns_mod.save_model(model, p))
        return path

    paths: list[Path] = []
    failures: list[tuple[int, Exception]] = []
    with ThreadPoolExecutor(max_workers=cfg.workers_global) as pool:
        futures = {pool.submit(train_one, spec): spec for spec in specs}
        for future, spec in futures.items():
            try:
                paths.append(future.result())
            except Exception as exc:  # noqa: BLE001 - per-sub-model isolation
                failures.append((spec.sub_model_id, exc))
    print(f"train: {len(paths)} sub-models written, {len(failures)} failed")
    if failures:
        for sub_id, exc in failures:
            print(f"train: sub-model {sub_id} failed: {exc}", file=sys.stderr)
        raise RuntimeError(f"{len(failures)} sub-model(s) failed")
    return sorted(paths)


def _load_submodels(out_dir: Path) -> list[sgns_mod.EmbeddingModel]:
    paths = sorted(out_dir.glob("sub_*.vec"))
    if not paths:
        raise FileNotFoundError(f"no sub-model files in {out_dir}; run train first")
    return [sgns_mod.load_model(p) for p in paths]


def _run_merge(
    models: Sequence[sgns_mod.EmbeddingModel], config: merge_mod.MergeConfig
) -> tuple[sgns_mod.EmbeddingModel, merge_mod.MergeReport | None]:
    if config.method == merge_mod.CONCAT:
        return merge_mod.concat_merge(models), None
    if config.method == merge_mod.PCA:
        dim = config.target_dim or models[0].dim
        return merge_mod.pca_merge(models, dim), None
    return merge_mod.alir_merge(models, config)


def cmd_merge(cfg: PipelineConfig) -> Path:
    models = _load_submodels(cfg.out_dir)
    merged, report = _run_merge(models, cfg.merge)
    out_path = cfg.out_dir / "merged.vec"
    _atomic_save(out_path, lambda p: sgns_mod.save_model(merged, p))
    if report is not None:
        _atomic_write_text(cfg.out_dir / "merge_report.csv", report.to_csv())
        print(
            f"merge: {cfg.merge.method} over {len(models)} models, "
            f"{len(report.displacements)} iterations, "
            f"final displacement {report.displacements[-1]:.6g}"
        )
    else:
        print(f"merge: {cfg.merge.method} over {len(models)} models -> dim {merged.dim}")
    return out_path


def _benchmark_files(bench_dir: Path) -> list[tuple[Path, str]]:
    files = []
    for path in sorted(bench_dir.iterdir()):
        kind = BENCH_KINDS.get(path.suffix)
        if kind is not None:
            files.append((path, kind))
    if not files:
        raise FileNotFoundError(f"no *.sim/*.cat/*.ana files in {bench_dir}")
    return files


def _evaluate_model(
    model: sgns_mod.EmbeddingModel,
    bench_dir: Path,
    seed: int,
    similarity_policy: str = eval_mod.OOV_SKIP,
) -> list[tuple[str, eval_mod.EvalResult]]:
    rows = []
    for path, kind in _benchmark_files(bench_dir):
        bench = eval_mod.load_benchmark(path, kind)
        if kind == eval_mod.SIMILARITY:
            result = eval_mod.evaluate_similarity(model, bench, oov_policy=similarity_policy)
        elif kind == eval_mod.CATEGORIZATION:
            result = eval_mod.evaluate_categorization(model, bench, seed=seed)
        else:
            result = eval_mod.evaluate_analogy(model, bench)
        rows.append((bench.name, result))
    return rows


def cmd_eval(cfg: PipelineConfig, model_path: Path | None = None) -> Path:
    if cfg.benchmarks is None:
        raise ValueError("--benchmarks is required for eval")
    if model_path is None:
        model_path = cfg.out_dir / "merged.vec"
    model = sgns_mod.load_model(model_path)
    rows = _evaluate_model(model, cfg.benchmarks, cfg.seed)
    lines = ["benchmark,score,oov,n_used"]
    for name, result in rows:
        lines.append(f"{name},{result.score!r},{result.oov_count},{result.n_used}")
        print(f"eval: {name}: score={result.score:.4f} oov={result.oov_count} n={result.n_used}")
    out_path = cfg.out_dir / "results.csv"
    _atomic_write_text(out_path, "\n".join(lines) + "\n")
    return out_path


class _Selected:
    """Iterable view of chosen sentence ids, reusable across passes."""

    def __init__(self, stream: corpus_mod.SentenceStream, ids):
        self._stream = stream
        self._ids = ids

    def __iter__(self):
        return self._stream.iter_selected(self._ids)


def cmd_stats(cfg: PipelineConfig) -> Path:
    stream = corpus_mod.SentenceStream(cfg.corpus)
    n_sentences = len(stream)
    vocab = corpus_mod.build_vocabulary(
        stream, min_count=_effective_min_count(cfg), max_size=cfg.max_vocab
    )
    full_uni = corpus_mod.unigram_distribution(stream, vocab)
    full_bi = corpus_mod.bigram_distribution(stream, vocab)
    specs = _make_specs(cfg, n_sentences)
    sampled = specs[: min(10, len(specs))]

    kl_lines = ["sub_model_id,unigram_kl,bigram_kl"]
    uni_kls, bi_kls = [], []
    for spec in sampled:
        ids = sampler_mod.spec_sentence_ids(spec, n_sentences)
        view = _Selected(stream, ids)
        uni = corpus_mod.unigram_distribution(view, vocab)
        bi = corpus_mod.bigram_distribution(view, vocab)
        kl_u = corpus_mod.kl_divergence(uni, full_uni)
        kl_b = corpus_mod.kl_divergence(bi, full_bi)
        uni_kls.append(kl_u)
        bi_kls.append(kl_b)
        kl_lines.append(f"{spec.sub_model_id},{kl_u!r},{kl_b!r}")
    kl_lines.append(f"mean,{float(np.mean(uni_kls))!r},{float(np.mean(bi_kls))!r}")
    _atomic_write_text(cfg.out_dir / "stats_kl.csv", "\n".join(kl_lines) + "\n")

    coverage = sampler_mod.vocabulary_coverage(specs, stream, vocab)
    cov_lines = ["word,present_in"]
    for word, count in zip(vocab.words, coverage.presence_counts):
        cov_lines.append(f"{word},{int(count)}")
    _atomic_write_text(cfg.out_dir / "stats_coverage.csv", "\n".join(cov_lines) + "\n")

    u = cfg.plan.rate_percent / 100.0
    ell = stream.mean_sentence_length()
    threshold = sampler_mod.missing_word_threshold(u, ell) if u < 1 else ""
    summary = [
        "key,value",
        f"strategy,{cfg.strategy}",
        f"rate_percent,{cfg.plan.rate_percent}",
        f"n_submodels,{cfg.plan.n_submodels}",
        f"mean_sentence_length,{ell!r}",
        f"missing_word_threshold,{threshold!r}" if threshold != "" else "missing_word_threshold,",
        f"mean_unigram_kl,{float(np.mean(uni_kls))!r}",
        f"mean_bigram_kl,{float(np.mean(bi_kls))!r}",
        f"vocab_intersection,{coverage.intersection_size}",
        f"vocab_union,{coverage.union_size}",
    ]
    out_path = cfg.out_dir / "stats_summary.csv"
    _atomic_write_text(out_path, "\n".join(summary) + "\n")
    print(
        f"stats: mean unigram KL {np.mean(uni_kls):.6f}, "
        f"mean bigram KL {np.mean(bi_kls):.6f}, "
        f"coverage {coverage.intersection_size}/{coverage.union_size} "
        f"(intersection/union of {len(vocab)})"
    )
    return out_path


def _drop_words(
    model: sgns_mod.EmbeddingModel, words: set[str]
) -> sgns_mod.EmbeddingModel:
    keep = [i for i, w in enumerate(model.vocab.words) if w not in words]
    vocab = corpus_mod.Vocabulary(
        words=[model.vocab.words[i] for i in keep],
        counts=[model.vocab.counts[i] for i in keep],
        total_tokens=model.vocab.total_tokens,
    )
    context = model.context[keep] if model.context is not None else None
    return sgns_mod.EmbeddingModel(vocab=vocab, vectors=model.vectors[keep], context=context)


def plan_word_removal(
    present_in: dict[str, list[int]],
    n_models: int,
    removal_fraction: float,
    rng: np.random.Generator,
) -> dict[int, set[str]]:
    """Choose which benchmark words to drop from which sub-models.

    Each selected word is removed from a random non-empty subset of the
    models containing it, always keeping it in at least one; draws that
    would delete a word everywhere (or nowhere) are resampled.
    """
    words = sorted(w for w, models in present_in.items() if len(models) >= 2)
    n_remove = round(removal_fraction * len(present_in))
    removal: dict[int, set[str]] = {i: set() for i in range(n_models)}
    if n_remove == 0 or not words:
        return removal
    chosen = rng.choice(words, size=min(n_remove, len(words)), replace=False)
    for word in chosen:
        holders = present_in[word]
        subset: list[int] = []
        for _ in range(100):
            subset = [i for i in holders if rng.random() < 0.5]
            if 0 < len(subset) < len(holders):
                break
        else:
            subset = holders[:-1]
        for i in subset:
            removal[i].add(word)
    return removal


def cmd_missing_words(cfg: PipelineConfig, removal_fraction: float) -> Path:
    """Remove benchmark words from random sub-models, re-merge, re-evaluate.

    Similarity scores here substitute the model's mean vector for missing
    words instead of skipping the pair: the experiment asks how well each
    merge answers the *whole* benchmark, so lost coverage must cost score.
    The n_used column still reports strict usable-pair counts.
    """
    if cfg.benchmarks is None:
        raise ValueError("--benchmarks is required for missing-words")
    if not 0 <= removal_fraction < 1:
        raise ValueError("removal fraction must be in [0, 1)")
    models = _load_submodels(cfg.out_dir)
    lines = ["benchmark,method,score,oov,n_used"]
    for bench_index, (path, kind) in enumerate(_benchmark_files(cfg.benchmarks)):
        bench = eval_mod.load_benchmark(path, kind)
        present_in = {}
        for word in sorted(bench.unique_words()):
            holders = [i for i, m in enumerate(models) if word in m.vocab]
            if holders:
                present_in[word] = holders
        rng = np.random.default_rng([cfg.seed, bench_index])
        removal = plan_word_removal(present_in, len(models), removal_fraction, rng)
        modified = [
            _drop_words(m, removal[i]) if removal[i] else m
            for i, m in enumerate(models)
        ]
        for method in merge_mod.MERGE_METHODS:
            merge_cfg = merge_mod.MergeConfig(
                method=method,
                alir_init=cfg.merge.alir_init,
                target_dim=cfg.merge.target_dim,
                max_epochs=cfg.merge.max_epochs,
                displacement_threshold=cfg.merge.displacement_threshold,
                seed=cfg.seed,
            )
            merged, _ = _run_merge(modified, merge_cfg)
            if kind == eval_mod.SIMILARITY:
                scored = eval_mod.evaluate_similarity(
                    merged, bench, oov_policy=eval_mod.OOV_MEAN
                )
                try:
                    strict = eval_mod.evaluate_similarity(
                        merged, bench, oov_policy=eval_mod.OOV_SKIP
                    )
                    n_used = strict.n_used
                except ValueError:
                    n_used = 0
                result = eval_mod.EvalResult(
                    score=scored.score, oov_count=scored.oov_count, n_used=n_used
                )
            elif kind == eval_mod.CATEGORIZATION:
                result = eval_mod.evaluate_categorization(merged, bench, seed=cfg.seed)
            else:
                result = eval_mod.evaluate_analogy(merged, bench)
            lines.append(
                f"{bench.name},{method},{result.score!r},{result.oov_count},{result.n_used}"
            )
            print(
                f"missing-words: {bench.name} {method}: score={result.score:.4f} "
                f"oov={result.oov_count} n_used={result.n_used}"
            )
    out_path = cfg.out_dir / "missing_words.csv"
    _atomic_write_text(out_path, "\n".join(lines) + "\n")
    return out_path


def cmd_pipeline(cfg: PipelineConfig) -> None:
    cmd_divide(cfg)
    cmd_train(cfg)
    cmd_merge(cfg)
    if cfg.benchmarks is not None:
        cmd_eval(cfg)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        res = _resolve(args)
        need_corpus = args.command in ("divide", "train", "stats", "pipeline")
        cfg = _pipeline_config(res, need_corpus=need_corpus)
        if args.command == "divide":
            cmd_divide(cfg)
        elif args.command == "train":
            cmd_train(cfg)
        elif args.command == "merge":
            cmd_merge(cfg)
        elif args.command == "eval":
            model = Path(res["model"]) if res.get("model") else None
            cmd_eval(cfg, model_path=model)
        elif args.command == "stats":
            cmd_stats(cfg)
        elif args.command == "missing-words":
            cmd_missing_words(cfg, float(res["removal_fraction"]))
        elif args.command == "pipeline":
            cmd_pipeline(cfg)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"mergevec: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
