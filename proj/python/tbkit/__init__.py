"""Treebank engineering toolkit: CoNLL-U parsing, validation,
harmonization, merging, splitting and attachment scoring."""

from ._core import (
    AttachmentScores,
    ChangeLogEntry,
    Error,
    GroupedScores,
    HarmonizeError,
    HarmonizeResult,
    MultiwordToken,
    Sentence,
    StatsTable,
    Token,
    Treebank,
    ValidationIssue,
    ValidationReport,
    corpus_profile,
    deduplicate,
    harmonize,
    load,
    parse,
    renumber,
    score,
    sentence_type_stats,
    serialize,
    serialize_sentence,
    split,
    validate,
)

__all__ = [
    "AttachmentScores",
    "ChangeLogEntry",
    "Error",
    "GroupedScores",
    "HarmonizeError",
    "HarmonizeResult",
    "MultiwordToken",
    "Sentence",
    "StatsTable",
    "Token",
    "Treebank",
    "ValidationIssue",
    "ValidationReport",
    "corpus_profile",
    "deduplicate",
    "harmonize",
    "load",
    "parse",
    "renumber",
    "score",
    "sentence_type_stats",
    "serialize",
    "serialize_sentence",
    "split",
    "validate",
]
