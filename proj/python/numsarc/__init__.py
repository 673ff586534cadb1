"""Numerical sarcasm detection: text analysis, rule cascade, classic and neural classifiers."""

import json

from . import _core
from ._core import (
    DataError,
    DivergenceError,
    UsageError,
    f_score,
    label_by_hashtag,
    normalize_tweet,
    numeric_fraction,
    weighted_average,
)

PIPELINES = ("rule-exact", "rule-cosine", "knn", "svm", "forest", "cnn-ff", "lstm-ff", "cnn-lstm-ff")

__all__ = [
    "PIPELINES",
    "DataError",
    "DivergenceError",
    "UsageError",
    "Pipeline",
    "analyze",
    "crossval",
    "f_score",
    "label_by_hashtag",
    "load_pipeline",
    "metrics",
    "normalize_tweet",
    "numeric_fraction",
    "synth",
    "weighted_average",
]


def _tweets(tweets):
    rows = []
    for i, t in enumerate(tweets):
        if isinstance(t, str):
            rows.append({"id": str(i), "text": t})
        else:
            rows.append(dict(t))
    return json.dumps(rows)


def analyze(text):
    """Tokens, tags, noun-phrase words and numeric mentions of one tweet."""
    return json.loads(_core.analyze_json(text))


def metrics(preds, golds):
    """Per-class and support-weighted precision, recall and F."""
    return json.loads(_core.metrics_json(list(preds), list(golds)))


def synth(count=2000, seed=1, sigma=1.0, separation=8.0):
    """Synthetic labeled tweets as dicts with id, text and label."""
    lines = _core.synth_json(count, seed, sigma, separation).splitlines()
    return [json.loads(line) for line in lines if line]


def crossval(pipeline, tweets, folds=5, seed=1, config=None):
    """Stratified k-fold report for a pipeline over labeled tweet dicts."""
    return json.loads(_core.crossval_json(pipeline, _tweets(tweets), folds, seed, json.dumps(config or {})))


class Pipeline:
    """A trainable classifier. Tweets are strings or dicts with "text" and, for fit, "label"."""

    def __init__(self, name, config=None, seed=1, _impl=None):
        self._impl = _impl if _impl is not None else _core._Pipeline(name, json.dumps(config or {}), seed)

    @property
    def name(self):
        return self._impl.name

    def fit(self, tweets):
        self._impl.fit(_tweets(tweets))
        return self

    def predict(self, tweets):
        return list(self._impl.predict(_tweets(tweets)))

    def fingerprints(self):
        return json.loads(self._impl.fingerprints())

    def to_json(self):
        return self._impl.to_json()


def load_pipeline(artifact):
    """Restore a fitted pipeline from Pipeline.to_json() output or a saved model file's text."""
    return Pipeline(None, _impl=_core._load_pipeline(artifact))
