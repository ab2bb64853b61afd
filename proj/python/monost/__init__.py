"""Unsupervised word translation from embedding alignment, n-gram rescoring and denoising."""

from ._monost import (  # noqa: F401
    Corpus,
    EmbeddingSpace,
    Error,
    FormatError,
    InvalidArgument,
    IoError,
    NGramLM,
    NumericError,
    build_corpus,
    cli,
    corpus_bleu,
    corrupt,
    decode,
    denoise,
    eigenvector_similarity,
    induce_lexicon,
    jitter,
    load_corpus,
    precision_at_k,
    procrustes,
    run_experiment,
    segment,
    self_learn,
    spearman,
    step_score,
    train_lm,
    train_skipgram,
    translate_word,
    write_benchmark,
)

__version__ = "0.1.0"
