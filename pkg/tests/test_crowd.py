import csv
import json
import random

import pytest
from hypothesis import given, strategies as st

from reviewgen.analysis.crowd import (
    CRITERIA,
    NO_CONSENSUS,
    JudgementRecord,
    Rating,
    agreement,
    distribution,
    distribution_counts,
    export_hits,
    import_judgements,
    labels_path_for,
    majority_vote,
    write_judgements,
)
from reviewgen.generator import Variant, triple_from_record

H, M, L = Rating.HIGH, Rating.MED, Rating.LOW


def item(ratings, tid="t1", variant=Variant.CREATIVE, criterion="naturalness"):
    return [JudgementRecord(tid, variant, criterion, r, f"w{i}") for i, r in enumerate(ratings)]


@pytest.fixture(scope="module")
def triples(pipeline_out):
    return dict(triple_from_record(json.loads(line))
                for line in (pipeline_out / "generate" / "triples.jsonl").read_text(encoding="utf-8").splitlines())


@pytest.mark.parametrize("ratings, label", [
    ([H, H, H, M, L], H),
    ([H, H, M, M, L], NO_CONSENSUS),
    ([L, L, L, L, L], L),
    ([M, L, M, H, M], M),
])
def test_majority_vote(ratings, label):
    assert majority_vote(item(ratings)) == label


@pytest.mark.parametrize("n", [0, 4, 6])
def test_majority_vote_needs_five(n):
    with pytest.raises(ValueError):
        majority_vote(item([H] * n))


def test_majority_vote_single_item():
    with pytest.raises(ValueError):
        majority_vote(item([H, H, H]) + item([H, H], tid="t2"))


def test_rating_parse():
    assert Rating.parse(" Medium ") == M and Rating.parse("h") == H
    with pytest.raises(ValueError):
        Rating.parse("great")


def test_agreement_examples():
    assert agreement(item([H, H, H, M, L])) == pytest.approx(0.6)
    assert agreement(item([L] * 5) + item([H] * 5, tid="t2")) == 1.0
    mixed = item([H, H, H, M, L]) + item([H, H, M, M, L], tid="t2") + item([M, M, M, M, L], tid="t3")
    assert agreement(mixed) == pytest.approx(7 / 10)
    with pytest.raises(ValueError):
        agreement(item([H, H, M, M, L]))


def test_agreement_per_item():
    batch = item([H, H, H, M, L]) + item([L] * 5, tid="t2")
    assert agreement(batch, per_item=True) == pytest.approx((0.6 + 1.0) / 2)


def test_distribution_degenerate_and_rows():
    batch = []
    for k in range(4):
        for v in Variant:
            batch += item([H] * 5 if v == Variant.CREATIVE else [H, M, M, L, L], tid=f"t{k}", variant=v)
    dist = distribution(batch)
    assert dist[(Variant.CREATIVE, "naturalness")] == (100.0, 0.0, 0.0, 0.0)
    assert dist[(Variant.BASIC, "naturalness")] == (0.0, 0.0, 0.0, 100.0)
    assert {v for v, _ in dist} == set(Variant)


rating = st.sampled_from(list(Rating))


@given(st.lists(st.tuples(st.lists(rating, min_size=5, max_size=5), st.sampled_from(list(Variant)),
                          st.sampled_from(CRITERIA)), min_size=1, max_size=40))
def test_distribution_partitions(items):
    batch = []
    for k, (ratings, variant, criterion) in enumerate(items):
        batch += item(ratings, tid=f"t{k}", variant=variant, criterion=criterion)
        label = majority_vote(batch[-5:])
        if label != NO_CONSENSUS:
            assert sum(1 for r in ratings if r == label) >= 3
    counts = distribution_counts(batch)
    assert sum(sum(row.values()) for row in counts.values()) == len(items)
    for row in distribution(batch).values():
        assert sum(row) == pytest.approx(100.0, abs=0.01)


def test_export_rows_and_sidecar(triples, tmp_path):
    path = tmp_path / "hits.csv"
    labels_path = export_hits(triples, path)
    assert labels_path == labels_path_for(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    labels = json.loads(labels_path.read_text(encoding="utf-8"))
    assert len(triples) == 200 and len(labels) == 200
    rows = list(csv.DictReader(lines))
    assert len(rows) == 200
    for row in rows:
        t = triples[row["triple_id"]]
        for slot, variant in labels[row["triple_id"]].items():
            assert row[f"review_{slot}"] == t.by_variant(Variant(variant)).text


def test_import_empty_file(triples, tmp_path):
    path = tmp_path / "hits.csv"
    export_hits(triples, path)
    empty = tmp_path / "judgements.csv"
    empty.write_text("", encoding="utf-8")
    res = import_judgements(empty, labels_path_for(path))
    assert res.batch == [] and len(res.incomplete) == 200 * 3 * len(CRITERIA)


def synthetic_judges(triples, rng):
    out = []
    for tid in triples:
        for v in Variant:
            for c in CRITERIA:
                out += [JudgementRecord(tid, v, c, rng.choice(list(Rating)), f"w{k}") for k in range(5)]
    return out


def test_round_trip_is_bijective(triples, tmp_path):
    labels_path = export_hits(triples, tmp_path / "hits.csv")
    labels = json.loads(labels_path.read_text(encoding="utf-8"))
    records = synthetic_judges(triples, random.Random(3))
    write_judgements(records, labels, tmp_path / "j.csv")
    res = import_judgements(tmp_path / "j.csv", labels_path)
    assert res.complete
    assert sorted(res.batch, key=repr) == sorted(records, key=repr)
    assert {r.triple_id for r in res.batch} == set(triples)


def test_import_flags_incomplete_and_unknown(triples, tmp_path):
    labels_path = export_hits(triples, tmp_path / "hits.csv")
    labels = json.loads(labels_path.read_text(encoding="utf-8"))
    records = synthetic_judges(triples, random.Random(4))
    write_judgements(records[1:], labels, tmp_path / "j.csv")
    res = import_judgements(tmp_path / "j.csv", labels_path)
    assert len(res.incomplete) == 1 and res.incomplete[0].count == 4
    assert len(res.batch) == len(records) - 5

    bad = tmp_path / "bad.csv"
    bad.write_text("triple_id,variant_slot,criterion,rating,worker_id\nzzz,a,naturalness,high,w1\n")
    with pytest.raises(ValueError, match="unknown triple"):
        import_judgements(bad, labels_path)
    bad.write_text("triple_id,variant_slot,criterion,rating,worker_id\npos000,d,naturalness,high,w1\n")
    with pytest.raises(ValueError, match="slot"):
        import_judgements(bad, labels_path)
