"""Prompt-corpus curation and detector-benchmark aggregation."""

from curatekit.balancer import partition_corpus, select_balanced
from curatekit.classifier import classify_corpus, classify_prompt
from curatekit.metrics import global_balance, score_corpus
from curatekit.taxonomy import default_taxonomy, load_taxonomy

__version__ = "0.1.0"

__all__ = [
    "classify_corpus",
    "classify_prompt",
    "default_taxonomy",
    "global_balance",
    "load_taxonomy",
    "partition_corpus",
    "score_corpus",
    "select_balanced",
]
