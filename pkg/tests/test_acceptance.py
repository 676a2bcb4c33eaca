"""Acceptance gate: one test per shipping criterion, each printing a
pass/fail line with its runtime and enforcing the stated time budget.

Run with ``pytest tests/test_acceptance.py -s`` to see the status lines.
"""
from __future__ import annotations

import random
import time
from contextlib import contextmanager
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from outbreakmon.cli import (
    DAILY_CSV_NAME,
    FILTERED_NAME,
    MANIFEST_NAME,
    PERIOD_CSV_NAME,
    RELEVANT_NAME,
    main,
)
from outbreakmon.corpus import Corpus, TweetRecord, load_corpus, load_labeled_set
from outbreakmon.keywords import default_keywords, filter_corpus, matches
from outbreakmon.svm import (
    TrainingConfig,
    decision_value,
    objective,
    predict,
    save_model,
    train,
    train_from_labeled,
    training_accuracy,
)
from outbreakmon.timeline import (
    bucket_counts,
    builtin_cdc_timeline,
    validate_timeline,
)
from outbreakmon.vectorizer import SparseVector, fit_tfidf, tokenize, vectorize

from oracles import brute_bucket, svm_qp_solve, tfidf_by_hand
from synthdata import (
    ANNOUNCEMENT_DATES,
    CUMULATIVE_STEPS,
    TABLE_COUNTS,
    labeled_lines,
    stream_lines,
    table_replay_records,
)


@contextmanager
def criterion(label: str, time_limit: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {label}: FAIL ({time.perf_counter() - start:.2f}s)")
        raise
    elapsed = time.perf_counter() - start
    within = elapsed < time_limit
    print(
        f"[ACCEPTANCE] {label}: {'PASS' if within else 'FAIL'} "
        f"({elapsed:.2f}s, limit {time_limit:.0f}s)"
    )
    assert within, f"{label} took {elapsed:.2f}s, over the {time_limit:.0f}s budget"


def sv(*dense):
    return SparseVector(entries=tuple((i, float(v)) for i, v in enumerate(dense) if v))


def test_criterion_1_tfidf_formula_fidelity():
    with criterion("C1 tf-idf formula fidelity", 1.0):
        texts = [
            "salmonella cucumbers recall salmonella",
            "cucumbers salad fresh salad salad",
            "recall officials confirm salmonella outbreak",
            "fresh produce shipment outbreak warning warning",
        ]
        model = fit_tfidf(texts)
        expected_per_doc = tfidf_by_hand([tokenize(t) for t in texts])
        index_of = model.vocabulary.terms
        checked = 0
        for text, expected in zip(texts, expected_per_doc):
            produced = vectorize(model, text).as_dict()
            assert set(produced) == {index_of[t] for t in expected}
            for term, value in expected.items():
                got = produced[index_of[term]]
                assert abs(got - value) <= 1e-12 * abs(value)
                checked += 1
        assert checked >= 10  # the corpus genuinely exercises the formulas


SVM_FIXTURES = [
    ("symmetric_1d", [[1.0], [-1.0]], [1, -1], 10.0, 0.5),
    ("separable_2d", [[1.0, 1.0], [2.0, 2.0], [-1.0, -1.0], [-2.0, -1.0]],
     [1, 1, -1, -1], 1.0, 0.25),
    ("overlap_1d", [[1.0], [-1.0], [-0.2], [0.3]], [1, -1, 1, -1], 1.0, 3.0),
    ("axes_3d",
     [[1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0], [-1.0, 0, 0], [0, -1.0, 0], [0, 0, -1.0]],
     [1, 1, 1, -1, -1, -1], 0.5, 1.5),
]


def test_criterion_2_svm_oracle_equivalence():
    with criterion("C2 SVM oracle equivalence", 5.0):
        assert len(SVM_FIXTURES) >= 3
        for name, rows, labels, C, frozen in SVM_FIXTURES:
            oracle_w, oracle_b, oracle_obj = svm_qp_solve(
                np.array(rows, dtype=float), np.array(labels, dtype=float), C
            )
            assert oracle_obj == pytest.approx(frozen, rel=1e-9), name
            examples = [(sv(*row), label) for row, label in zip(rows, labels)]
            model = train(
                examples, TrainingConfig(C=C, tolerance=1e-10, max_epochs=20000, seed=42)
            )
            trained_obj = objective(model.weights, model.bias, examples, C)
            assert abs(trained_obj - oracle_obj) <= 1e-6 * abs(oracle_obj), name
            for vec, _ in examples:
                oracle_sign = 1 if vec.dot(oracle_w) + oracle_b >= 0 else -1
                assert predict(model, vec) == oracle_sign, name


def test_criterion_3_svm_properties(tmp_path):
    with criterion("C3 SVM training properties", 10.0):
        # dual feasibility and per-epoch objective monotonicity on every fixture
        for name, rows, labels, C, _ in SVM_FIXTURES:
            epochs: list[tuple[list[float], float]] = []
            examples = [(sv(*row), label) for row, label in zip(rows, labels)]
            train(
                examples,
                TrainingConfig(C=C, tolerance=1e-10, max_epochs=20000, seed=42),
                trace_hook=lambda e, a, o: epochs.append((a, o)),
            )
            assert epochs
            for alpha, _ in epochs:
                assert all(0.0 <= a <= C for a in alpha), name
            values = [o for _, o in epochs]
            assert all(b <= a + 1e-9 for a, b in zip(values, values[1:])), name

        # the same properties on the realistic 100+100 labeled set
        examples = load_labeled_set(labeled_lines(100, 100))
        texts_model = fit_tfidf(ex.record.text for ex in examples)
        vectors = [(vectorize(texts_model, ex.record.text), ex.label) for ex in examples]
        epochs = []
        train(vectors, TrainingConfig(), trace_hook=lambda e, a, o: epochs.append((a, o)))
        values = [o for _, o in epochs]
        assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))
        for alpha, _ in epochs:
            assert all(0.0 <= a <= 1.0 for a in alpha)

        # label-negation symmetry
        flipped = [(vec, -label) for vec, label in vectors]
        model_pos = train(vectors, TrainingConfig())
        model_neg = train(flipped, TrainingConfig())
        for vec, _ in vectors[::7]:
            assert decision_value(model_neg, vec) == pytest.approx(
                -decision_value(model_pos, vec), abs=1e-9
            )

        # identical seed -> byte-identical model files
        paths = []
        for stem in ("one", "two"):
            model = train_from_labeled(examples, TrainingConfig(seed=42))
            path = tmp_path / f"{stem}.json"
            save_model(model, path)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()


def test_criterion_4_training_protocol_replay():
    examples = load_labeled_set(labeled_lines(100, 100))
    with criterion("C4 100+100 training replay", 1.0):
        model = train_from_labeled(examples, TrainingConfig())
        assert training_accuracy(model, examples) == 1.0


def test_criterion_5_table_fixture_replay():
    with criterion("C5 period-table fixture replay", 30.0):
        records = table_replay_records()
        assert len(records) == sum(TABLE_COUNTS)  # ~40k records
        timeline = builtin_cdc_timeline()
        report = bucket_counts(timeline, records)
        assert tuple(row.count for row in report.rows) == TABLE_COUNTS

        assert validate_timeline(timeline) == []
        announcements = timeline.announcements()
        cumulative = [e.cumulative_ill for e in announcements]
        new = [e.new_ill for e in announcements]
        for k in range(1, len(announcements)):
            assert cumulative[k - 1] + new[k] == cumulative[k]
        # spot anchors for the first and last arithmetic identities
        assert (cumulative[0], new[1], cumulative[1]) == (285, 56, 341)
        assert (cumulative[-2], new[-1], cumulative[-1]) == (888, 19, 907)
        assert (cumulative[0], new[1], cumulative[1]) == CUMULATIVE_STEPS[0]
        assert (cumulative[-2], new[-1], cumulative[-1]) == CUMULATIVE_STEPS[-1]


def test_criterion_6_bucketing_oracle():
    with criterion("C6 bucketing brute-force oracle", 10.0):
        timeline = builtin_cdc_timeline()
        rng = random.Random(2015)
        span = int((datetime(2016, 5, 1) - datetime(2015, 6, 1)).total_seconds())
        start = datetime(2015, 6, 1, tzinfo=timezone.utc)
        tweets = [
            TweetRecord(f"u{i}", start + timedelta(seconds=rng.randrange(span)), "x")
            for i in range(10_000)
        ]
        report = bucket_counts(timeline, tweets)
        expected = brute_bucket(ANNOUNCEMENT_DATES, [t.timestamp for t in tweets])
        assert [row.count for row in report.rows] == expected

        for trial in range(100):
            size = rng.randrange(0, 400)
            corpus = [
                TweetRecord(f"p{trial}_{i}",
                            start + timedelta(seconds=rng.randrange(span)), "x")
                for i in range(size)
            ]
            assert bucket_counts(timeline, corpus).total == size


def test_criterion_7_keyword_filter_properties():
    with criterion("C7 keyword-filter properties", 5.0):
        keywords = default_keywords()
        assert keywords.phrases == (
            "Salmonella",
            "Salmonella Poona",
            "Salmonella Tainted",
            "Contaminated Cucumbers",
            "Andrew & Williamson Fresh Produce",
            "Fat Boy Brand",
            "Mexican Cucumbers",
        )

        rng = random.Random(77)
        vocabulary = [
            "salmonella", "poona", "tainted", "contaminated", "cucumbers", "andrew",
            "&", "williamson", "fresh", "produce", "fat", "boy", "brand", "mexican",
            "tacos", "weather", "game", "salmonellosis", "cucumber", "news",
        ]
        punctuation = ["", "!", "...", "??", ",", " -- "]
        texts = []
        for _ in range(1000):
            words = [rng.choice(vocabulary) for _ in range(rng.randrange(0, 14))]
            shaped = [
                w.upper() if rng.random() < 0.3 else w.title() if rng.random() < 0.3 else w
                for w in words
            ]
            texts.append(" ".join(w + rng.choice(punctuation) for w in shaped))

        base = datetime(2015, 9, 4, tzinfo=timezone.utc)
        corpus = Corpus(
            records=tuple(
                TweetRecord(f"k{i}", base, text or "placeholder")
                for i, text in enumerate(texts)
            )
        )
        once = filter_corpus(corpus, keywords)
        twice = filter_corpus(once, keywords)
        assert once == twice  # idempotence

        kept, dropped = len(once), len(corpus) - len(once)
        assert kept + dropped == len(corpus)  # conservation

        for record in corpus.records[:200]:
            text = record.text
            assert matches(keywords, text) == matches(keywords, text.upper())
            assert matches(keywords, text) == matches(keywords, "   " + text + " \t ")


def test_criterion_8_end_to_end_determinism(tmp_path):
    # the hard target is the inner classify-under-60s assert; the outer bound
    # just keeps the whole scenario (train + classify + two pipelines) sane
    with criterion("C8 end-to-end determinism and throughput", 300.0):
        labeled = tmp_path / "labeled.jsonl"
        labeled.write_text("".join(l + "\n" for l in labeled_lines(100, 100)), "utf-8")
        model_path = tmp_path / "model.json"
        assert main(["train", "--labeled", str(labeled), "--model", str(model_path),
                     "--quiet"]) == 0

        stream = tmp_path / "stream.jsonl"
        stream.write_text("".join(l + "\n" for l in stream_lines(100_000)), "utf-8")

        # throughput: classify 100k records within 60 s
        classify_out = tmp_path / "classify_out"
        started = time.perf_counter()
        assert main(["classify", "--input", str(stream), "--model", str(model_path),
                     "--output", str(classify_out), "--quiet"]) == 0
        classify_elapsed = time.perf_counter() - started
        print(f"[ACCEPTANCE]   classify throughput: 100000 records in "
              f"{classify_elapsed:.2f}s")
        assert classify_elapsed < 60.0
        relevant = load_corpus((classify_out / RELEVANT_NAME).open(encoding="utf-8"))
        assert 0 < len(relevant) < 100_000

        # determinism: two pipeline runs produce byte-identical artifacts
        out_a, out_b = tmp_path / "run_a", tmp_path / "run_b"
        for out in (out_a, out_b):
            assert main(["pipeline", "--input", str(stream), "--model", str(model_path),
                         "--output", str(out), "--quiet"]) == 0
        for name in (FILTERED_NAME, RELEVANT_NAME, PERIOD_CSV_NAME, DAILY_CSV_NAME,
                     MANIFEST_NAME):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name
