"""Evidence-table extraction from randomized-trial abstracts."""

import json

from ._evtab import (
    Abstract,
    CorpusTooSmall,
    EmptyBody,
    Error,
    Infeasible,
    Model,
    ModeUnsupported,
    ParseError,
    TooFewPairs,
    TransportError,
    build_query,
    evidence_table,
    fold_assignment,
    generate_synthetic,
    ingest_fixtures,
    kfold_json,
    load_corpus,
    normalize_sentence,
    parse_annotated,
    predict,
    preprocess,
    save_corpus,
    train,
    wilcoxon,
)


def kfold(corpus, k=10, seed=1, max_iterations=500, workers=1):
    """Cross-validation report as a dict."""
    return json.loads(kfold_json(corpus, k, seed, max_iterations, workers))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
