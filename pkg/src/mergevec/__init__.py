"""Asynchronous word embedding training on corpus samples.

Divide a corpus into representative sub-corpora, train independent
skip-gram negative-sampling sub-models with no parameter synchronization,
and merge them into one consensus embedding (concatenation, PCA, or
alternating Procrustes alignment over the vocabulary union).
"""

from .corpus import (
    Distribution,
    SentenceStream,
    Vocabulary,
    bigram_distribution,
    build_vocabulary,
    kl_divergence,
    load_vocabulary,
    save_vocabulary,
    shifted_pmi_diagnostic,
    tokenize_line,
    unigram_distribution,
)
from .evaluate import (
    AnalogyBenchmark,
    CategorizationBenchmark,
    EvalResult,
    SimilarityBenchmark,
    evaluate_analogy,
    evaluate_categorization,
    evaluate_similarity,
    load_benchmark,
    purity,
    spearman_rho,
)
from .merge import (
    AlignmentState,
    MergeConfig,
    MergeReport,
    alir_merge,
    averaging_counterexample_check,
    concat_merge,
    displacement,
    orthogonal_procrustes,
    pca_merge,
    reconstruct_missing,
)
from .sampler import (
    CoverageReport,
    SamplingPlan,
    SubCorpusSpec,
    equal_partition,
    missing_word_threshold,
    random_sample,
    shuffle_assign,
    shuffle_membership,
    shuffle_specs,
    vocabulary_coverage,
)
from .sgns import (
    EmbeddingModel,
    EncodedCorpus,
    NoiseTable,
    TrainConfig,
    build_noise_table,
    encode_corpus,
    load_model,
    objective_value,
    save_model,
    sgd_step,
    subsample_keep_probability,
    train_submodel,
)

__version__ = "0.1.0"
