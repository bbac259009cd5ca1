"""Naive Bayes sentiment classifier with negation handling and MI feature selection."""

from ._nbsent import (
    ClassLabel,
    ContingencyTable,
    CountMode,
    CountTable,
    DataError,
    DenominatorPolicy,
    EvalReport,
    LabeledDoc,
    Model,
    ModelFormatError,
    PipelineConfig,
    SelectionConfig,
    SmoothingConfig,
    Split,
    TrainConfig,
    apply_negation,
    contingency,
    evaluate,
    featurize,
    featurize_counts,
    load,
    load_split,
    mutual_information,
    ngrams,
    prune_singletons,
    rank_features,
    save,
    select_top_k,
    split_validation,
    subsample,
    sweep_k,
    tokenize,
    toggle_negation,
    train,
)

POSITIVE = ClassLabel.positive
NEGATIVE = ClassLabel.negative


def docs(pairs):
    """[(text, label), ...] -> [LabeledDoc]; label is a ClassLabel or "positive"/"negative"."""
    out = []
    for i, (text, label) in enumerate(pairs):
        if isinstance(label, str):
            label = {"positive": POSITIVE, "negative": NEGATIVE}[label]
        out.append(LabeledDoc(str(i), text, label))
    return out
