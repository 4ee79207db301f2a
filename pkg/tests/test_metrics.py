from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vulnpipe.errors import DataError
from vulnpipe.metrics import (
    ConfusionCounts,
    confusion,
    cross_domain_matrix,
    matrix_to_dict,
    matrix_to_table,
    prf,
)


def test_all_positive_perfect():
    counts = confusion([1] * 7, [1] * 7)
    assert (counts.tp, counts.fp, counts.fn, counts.tn) == (7, 0, 0, 0)


def test_two_by_two_by_definition():
    counts = confusion([1, 1, 0, 0], [1, 0, 1, 0])
    assert (counts.tp, counts.fp, counts.fn, counts.tn) == (1, 1, 1, 1)


def test_confusion_matches_naive_loop_oracle():
    rng = random.Random(123)
    labels = [rng.randint(0, 1) for _ in range(1000)]
    preds = [rng.randint(0, 1) for _ in range(1000)]
    counts = confusion(labels, preds)
    tp = sum(1 for y, p in zip(labels, preds) if y == 1 and p == 1)
    fp = sum(1 for y, p in zip(labels, preds) if y == 0 and p == 1)
    fn = sum(1 for y, p in zip(labels, preds) if y == 1 and p == 0)
    tn = sum(1 for y, p in zip(labels, preds) if y == 0 and p == 0)
    assert (counts.tp, counts.fp, counts.fn, counts.tn) == (tp, fp, fn, tn)
    assert counts.total == 1000


def test_length_mismatch_rejected():
    with pytest.raises(DataError, match="length mismatch"):
        confusion([1, 0], [1])


def test_empty_vectors_rejected():
    with pytest.raises(DataError):
        confusion([], [])


def test_non_binary_rejected():
    with pytest.raises(DataError):
        confusion([2], [1])


def test_prf_perfect_classifier():
    report = prf(ConfusionCounts(tp=9, fp=0, fn=0, tn=3))
    assert (report.precision, report.recall, report.f1) == (1.0, 1.0, 1.0)


def test_prf_hand_computed_values():
    report = prf(ConfusionCounts(tp=2, fp=1, fn=2, tn=0))
    assert report.precision == pytest.approx(2 / 3)
    assert report.recall == pytest.approx(1 / 2)
    assert report.f1 == pytest.approx(4 / 7)


def test_prf_zero_division_conventions():
    report = prf(ConfusionCounts(tp=0, fp=0, fn=5, tn=0))
    assert (report.precision, report.recall, report.f1) == (0.0, 0.0, 0.0)
    report = prf(ConfusionCounts(tp=0, fp=3, fn=0, tn=0))
    assert (report.precision, report.recall, report.f1) == (0.0, 0.0, 0.0)
    report = prf(ConfusionCounts(tp=0, fp=0, fn=0, tn=4))
    assert (report.precision, report.recall, report.f1) == (0.0, 0.0, 0.0)


@given(st.integers(0, 500), st.integers(0, 500), st.integers(0, 500),
       st.integers(0, 500))
@settings(max_examples=300, deadline=None)
def test_f1_is_harmonic_mean_bounded(tp, fp, fn, tn):
    report = prf(ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn))
    assert 0.0 <= report.precision <= 1.0
    assert 0.0 <= report.recall <= 1.0
    if report.precision + report.recall > 0:
        assert min(report.precision, report.recall) - 1e-12 <= report.f1
        assert report.f1 <= max(report.precision, report.recall) + 1e-12
    else:
        assert report.f1 == 0.0


def test_swapping_vectors_transposes_fp_fn_and_swaps_p_r():
    rng = random.Random(7)
    labels = [rng.randint(0, 1) for _ in range(200)]
    preds = [rng.randint(0, 1) for _ in range(200)]
    fwd = confusion(labels, preds)
    rev = confusion(preds, labels)
    assert (fwd.fp, fwd.fn) == (rev.fn, rev.fp)
    assert prf(fwd).precision == pytest.approx(prf(rev).recall)
    assert prf(fwd).recall == pytest.approx(prf(rev).precision)


def test_prf_permutation_invariant():
    rng = random.Random(13)
    pairs = [(rng.randint(0, 1), rng.randint(0, 1)) for _ in range(100)]
    shuffled = list(pairs)
    rng.shuffle(shuffled)
    a = confusion([y for y, _ in pairs], [p for _, p in pairs])
    b = confusion([y for y, _ in shuffled], [p for _, p in shuffled])
    assert a == b


# -------------------------------------------------------------------- matrix

def synth_cell(rng, trained_on, tested_on, strategy, n=60):
    labels = [rng.randint(0, 1) for _ in range(n)]
    preds = [rng.randint(0, 1) for _ in range(n)]
    return (trained_on, tested_on, strategy, labels, preds)


def test_single_cell_matrix():
    reports = cross_domain_matrix([("open", "industry", "NB",
                                    [1, 0, 1], [1, 0, 0])])
    assert len(reports) == 1
    assert reports[0].cell == ("open", "industry", "NB")


def test_full_matrix_matches_per_cell_recomputation():
    rng = random.Random(5)
    datasets = ["open_a", "open_b", "industry"]
    strategies = ["NB", "USC", "URSC", "WLF"]
    cells = [synth_cell(rng, tr, te, s)
             for tr in datasets for te in datasets for s in strategies]
    reports = cross_domain_matrix(cells)
    assert len(reports) == 36
    for (tr, te, s, labels, preds), report in zip(cells, reports):
        again = prf(confusion(labels, preds))
        assert report.precision == again.precision
        assert report.recall == again.recall
        assert report.f1 == again.f1


def test_empty_matrix_is_empty():
    assert cross_domain_matrix([]) == []
    assert matrix_to_table([]) == "(no cells)\n"


def test_duplicate_cell_id_rejected():
    cell = ("a", "b", "NB", [1], [1])
    with pytest.raises(DataError, match="duplicate cell"):
        cross_domain_matrix([cell, cell])


def test_matrix_json_has_full_precision_and_table_four_decimals():
    reports = cross_domain_matrix([("a", "b", "NB", [1, 1, 0], [1, 0, 0])])
    doc = matrix_to_dict(reports)
    assert doc["cells"][0]["recall"] == 0.5
    assert doc["cells"][0]["trained_on"] == "a"
    table = matrix_to_table(reports)
    assert "0.5000" in table and "1.0000" in table


def test_table_groups_by_training_set():
    reports = cross_domain_matrix([
        ("a", "a", "NB", [1], [1]),
        ("b", "a", "NB", [1], [1]),
    ])
    table = matrix_to_table(reports)
    assert "\n\n" in table  # blank line between trained_on groups
