"""Chatbot trust ratings from dialog corpora, per user profile."""

import json
import os
from pathlib import Path

_bundled = Path(__file__).with_name("data")
if "TRUSTLENS_DATA_DIR" not in os.environ and _bundled.is_dir():
    os.environ["TRUSTLENS_DATA_DIR"] = str(_bundled)

from ._core import (  # noqa: E402
    TrustlensError,
    aggregate_abuse,
    bin,
    builtin_profiles,
    default_data_dir,
    map_epochs_to_score,
    run_cli,
)
from . import _core  # noqa: E402

__all__ = [
    "TrustlensError",
    "aggregate_abuse",
    "aggregate_rating",
    "bin",
    "builtin_profiles",
    "default_data_dir",
    "map_epochs_to_score",
    "rate_corpus",
    "run_cli",
    "vote",
]


def rate_corpus(path, profile="P_CU", format="canonical", data_dir=None, seed=42, tie="pessimistic"):
    """Rate a corpus file and return the report as a dict."""
    return json.loads(_core.rate_corpus_json(str(path), profile, format, data_dir, seed, tie))


def aggregate_rating(levels, order, tie="pessimistic"):
    """Aggregate per-issue levels, e.g. {"AL": "M", ...}, for an importance order."""
    return json.loads(_core.aggregate_rating_json(dict(levels), list(order), tie))


def vote(rankings, rule="borda"):
    """Aggregate ranked ballots (lists of issue codes) with a voting rule."""
    return json.loads(_core.vote_json([list(r) for r in rankings], rule))
