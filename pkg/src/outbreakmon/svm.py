"""Soft-margin linear SVM trained by dual coordinate descent.

The bias rides on an implicit constant feature of value 1 appended to every
example, so it takes part in the regularizer. The objective minimized (and
reported) everywhere is therefore

    0.5 * (||w||^2 + b^2) + C * sum_i max(0, 1 - y_i * (w . x_i + b)).

Coordinate descent moves one dual variable at a time inside [0, C], which
makes the dual value monotone but lets the primal value of the current
iterate rise transiently; the trainer keeps the best primal iterate seen at
any epoch end and returns that, so reported per-epoch objectives never
increase.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import LabeledExample
from .errors import ModelFileError, TrainingDataError
from .vectorizer import (
    SparseVector,
    TfIdfModel,
    TOKEN_RULES_V1,
    Vocabulary,
    fit_tfidf,
    vectorize,
)

MODEL_FORMAT = "outbreakmon-svm-model"
MODEL_VERSION = 1

TraceHook = Callable[[int, list[float], float], None]


@dataclass(frozen=True)
class TrainingConfig:
    """Solver hyperparameters; defaults are documented and overridable."""

    C: float = 1.0
    tolerance: float = 1e-4
    max_epochs: int = 1000
    seed: int = 42

    def __post_init__(self):
        if not (self.C > 0):
            raise ValueError(f"C must be positive, got {self.C}")
        if not (self.tolerance > 0):
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")


@dataclass(frozen=True)
class TrainingMeta:
    C: float
    epochs_run: int
    final_objective: float


@dataclass(frozen=True, eq=False)
class SvmModel:
    """Decision boundary (weights, bias) plus the vectorizer that feeds it."""

    weights: np.ndarray  # length equals vocabulary size when vectorizer is set
    bias: float
    vectorizer: TfIdfModel | None
    training_meta: TrainingMeta

    def __post_init__(self):
        if not np.all(np.isfinite(self.weights)) or not math.isfinite(self.bias):
            raise ValueError("model weights and bias must be finite")
        if self.vectorizer is not None and len(self.weights) != len(self.vectorizer.vocabulary):
            raise ValueError(
                f"weights length {len(self.weights)} does not match "
                f"vocabulary size {len(self.vectorizer.vocabulary)}"
            )


def objective(
    weights: Sequence[float], bias: float, examples: Sequence[tuple[SparseVector, int]], C: float
) -> float:
    """Primal objective with the bias inside the regularized norm."""
    w = np.asarray(weights, dtype=float)
    total = 0.5 * (float(w @ w) + bias * bias)
    hinge = 0.0
    for vector, label in examples:
        margin = label * (vector.dot(w) + bias)
        if margin < 1.0:
            hinge += 1.0 - margin
    return total + C * hinge


def train(
    examples: Sequence[tuple[SparseVector, int]],
    config: TrainingConfig,
    *,
    dim: int | None = None,
    vectorizer: TfIdfModel | None = None,
    trace_hook: TraceHook | None = None,
) -> SvmModel:
    """Fit weights and bias by dual coordinate descent.

    Sweeps the examples in a seeded random order each epoch, clamping each
    dual variable into [0, C]; stops when the projected-gradient gap over an
    epoch drops below ``config.tolerance`` or after ``config.max_epochs``.
    ``dim`` fixes the feature dimension (defaults to 1 + highest index seen).
    ``trace_hook(epoch, dual_variables, objective)`` is called after each
    epoch with a snapshot, for diagnostics and tests.
    """
    examples = list(examples)
    if not examples:
        raise TrainingDataError("no training examples")
    labels = {label for _, label in examples}
    if not labels <= {-1, 1}:
        raise ValueError(f"labels must be -1 or +1, got {sorted(labels - {-1, 1})}")
    if len(labels) < 2:
        raise TrainingDataError("training data contains a single class")
    max_index = -1
    for vector, _ in examples:
        for index, value in vector.entries:
            if not math.isfinite(value):
                raise ValueError(f"non-finite feature value {value!r} at index {index}")
        if vector.entries:
            max_index = max(max_index, vector.entries[-1][0])
    if dim is None:
        dim = max_index + 1
    elif max_index >= dim:
        raise IndexError(f"feature index {max_index} out of range for dimension {dim}")

    n = len(examples)
    C = config.C
    ys = [float(label) for _, label in examples]
    entry_lists = [vector.entries for vector, _ in examples]
    q_diag = [vector.squared_norm() + 1.0 for vector, _ in examples]

    # Augmented weight vector: slots [0, dim) are features, slot dim is bias.
    w = [0.0] * (dim + 1)
    alpha = [0.0] * n
    rng = np.random.default_rng(config.seed)

    def current_objective() -> float:
        return objective(w[:dim], w[dim], examples, C)

    best_objective = current_objective()
    best_w = list(w)
    epochs_run = 0
    for epoch in range(1, config.max_epochs + 1):
        pg_max = -math.inf
        pg_min = math.inf
        for i in rng.permutation(n):
            entries = entry_lists[i]
            y = ys[i]
            g = y * (sum(w[j] * v for j, v in entries) + w[dim]) - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= C:
                pg = max(g, 0.0)
            else:
                pg = g
            if pg > pg_max:
                pg_max = pg
            if pg < pg_min:
                pg_min = pg
            if abs(pg) > 1e-12:
                a_new = min(max(a - g / q_diag[i], 0.0), C)
                delta = (a_new - a) * y
                if delta != 0.0:
                    for j, v in entries:
                        w[j] += delta * v
                    w[dim] += delta
                    alpha[i] = a_new
        epochs_run = epoch
        epoch_objective = current_objective()
        if epoch_objective < best_objective:
            best_objective = epoch_objective
            best_w = list(w)
        if trace_hook is not None:
            trace_hook(epoch, list(alpha), best_objective)
        if pg_max - pg_min < config.tolerance:
            break

    meta = TrainingMeta(C=C, epochs_run=epochs_run, final_objective=best_objective)
    return SvmModel(
        weights=np.asarray(best_w[:dim], dtype=float),
        bias=best_w[dim],
        vectorizer=vectorizer,
        training_meta=meta,
    )


def train_from_labeled(
    examples: Sequence[LabeledExample], config: TrainingConfig = TrainingConfig()
) -> SvmModel:
    """Fit the tf-idf vectorizer on the labeled set, then train on it."""
    tfidf = fit_tfidf(ex.record.text for ex in examples)
    vectors = [(vectorize(tfidf, ex.record.text), ex.label) for ex in examples]
    return train(vectors, config, dim=len(tfidf.vocabulary), vectorizer=tfidf)


def decision_value(model: SvmModel, vector: SparseVector) -> float:
    """Signed distance proxy ``w . v + b`` (sparse dot product)."""
    if vector.entries and vector.entries[-1][0] >= len(model.weights):
        raise IndexError(
            f"vector index {vector.entries[-1][0]} out of range for "
            f"{len(model.weights)} weights"
        )
    return float(vector.dot(model.weights) + model.bias)


def predict(model: SvmModel, vector: SparseVector) -> int:
    """+1 (relevant) when the decision value is >= 0, else -1.

    The tie at exactly zero goes to +1: reviewing one extra record is cheaper
    than dropping a relevant one.
    """
    return 1 if decision_value(model, vector) >= 0.0 else -1


def training_accuracy(model: SvmModel, examples: Sequence[LabeledExample]) -> float:
    """Fraction of labeled examples the model reproduces."""
    if model.vectorizer is None:
        raise ValueError("model has no embedded vectorizer")
    hits = sum(
        1
        for ex in examples
        if predict(model, vectorize(model.vectorizer, ex.record.text)) == ex.label
    )
    return hits / len(examples)


def _reject_constant(value: str):
    raise ModelFileError(f"non-finite number {value!r} in model file")


def save_model(model: SvmModel, destination: str | Path) -> None:
    """Write the model as a versioned, human-inspectable JSON text file.

    Floats are serialized with shortest round-trip repr, so loading restores
    every numeric field bit-exactly; writes are atomic (write then rename).
    """
    if model.vectorizer is None:
        raise ValueError("cannot save a model without an embedded vectorizer")
    vocab = model.vectorizer.vocabulary
    index_to_term = sorted(vocab.terms, key=vocab.terms.get)
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "token_rules": model.vectorizer.token_rules,
        "vocabulary": {
            "corpus_size": vocab.corpus_size,
            "terms": [[term, vocab.doc_frequency[term]] for term in index_to_term],
        },
        "weights": [float(x) for x in model.weights],
        "bias": float(model.bias),
        "training_meta": {
            "C": model.training_meta.C,
            "epochs_run": model.training_meta.epochs_run,
            "final_objective": model.training_meta.final_objective,
        },
    }
    destination = Path(destination)
    destination.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, ensure_ascii=False, allow_nan=False, indent=1)
    tmp = destination.with_name(destination.name + ".tmp")
    tmp.write_text(text + "\n", encoding="utf-8")
    os.replace(tmp, destination)


def load_model(source: str | Path) -> SvmModel:
    """Read a model file back; raises ModelFileError on any inconsistency."""
    raw = Path(source).read_text(encoding="utf-8")
    try:
        payload = json.loads(raw, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"corrupt model file: {exc.msg}") from None
    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise ModelFileError("not a recognized model file")
    if payload.get("version") != MODEL_VERSION:
        raise ModelFileError(
            f"unsupported model file version {payload.get('version')!r} "
            f"(expected {MODEL_VERSION})"
        )
    try:
        token_rules = payload["token_rules"]
        vocab_obj = payload["vocabulary"]
        corpus_size = vocab_obj["corpus_size"]
        term_rows = vocab_obj["terms"]
        weights = payload["weights"]
        bias = payload["bias"]
        meta_obj = payload["training_meta"]
        meta = TrainingMeta(
            C=float(meta_obj["C"]),
            epochs_run=int(meta_obj["epochs_run"]),
            final_objective=float(meta_obj["final_objective"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"model file is missing or mistypes a field: {exc}") from None

    if token_rules != TOKEN_RULES_V1:
        raise ModelFileError(f"unsupported token rules {token_rules!r}")
    if not isinstance(corpus_size, int) or corpus_size < 1:
        raise ModelFileError(f"invalid corpus size {corpus_size!r}")
    if not isinstance(term_rows, list):
        raise ModelFileError("vocabulary terms must be a list")
    terms: dict[str, int] = {}
    doc_frequency: dict[str, int] = {}
    for row in term_rows:
        if (
            not isinstance(row, list)
            or len(row) != 2
            or not isinstance(row[0], str)
            or isinstance(row[1], bool)
            or not isinstance(row[1], int)
        ):
            raise ModelFileError(f"malformed vocabulary row {row!r}")
        term, df = row
        if term in terms:
            raise ModelFileError(f"duplicate vocabulary term {term!r}")
        if not (1 <= df <= corpus_size):
            raise ModelFileError(f"document frequency {df} out of range for term {term!r}")
        terms[term] = len(terms)
        doc_frequency[term] = df
    if not isinstance(weights, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in weights
    ):
        raise ModelFileError("weights must be a list of numbers")
    if len(weights) != len(terms):
        raise ModelFileError(
            f"weights length {len(weights)} does not match vocabulary size {len(terms)}"
        )
    if not isinstance(bias, (int, float)):
        raise ModelFileError("bias must be a number")

    vocabulary = Vocabulary(terms=terms, doc_frequency=doc_frequency, corpus_size=corpus_size)
    return SvmModel(
        weights=np.asarray(weights, dtype=float),
        bias=float(bias),
        vectorizer=TfIdfModel(vocabulary=vocabulary, token_rules=token_rules),
        training_meta=meta,
    )
