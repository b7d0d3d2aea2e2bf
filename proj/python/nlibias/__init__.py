"""Annotation-artifact statistics and hypothesis-only pruning for NLI corpora."""

from ._core import (
    BigramTable,
    Corpus,
    DomainError,
    DoubleRemovalError,
    EmptyCorpusError,
    Error,
    FingerprintMismatch,
    FormatError,
    Instance,
    IoError,
    NaiveBayesModel,
    __version__,
    bigrams,
    compare_splits,
    count_bigrams,
    entropy,
    eval_hypothesis_only,
    load_corpus,
    prune_greedy,
    prune_random,
    run_cli,
    shuffle_premises,
    tokenize,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
