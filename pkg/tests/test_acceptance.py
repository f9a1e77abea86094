"""Acceptance checks, one ``criterion`` marker per criterion."""

import json
import random
import re
import shutil
import time
from pathlib import Path

import pytest

from oracles import brute_force_learn, welch_oracle
from reviewgen.analysis.categories import compare_classes, load_category_lexicon, profile
from reviewgen.analysis.crowd import NO_CONSENSUS, JudgementRecord, Rating, agreement, distribution, majority_vote
from reviewgen.analysis.stats import t_two_sided_p, welch_t_test
from reviewgen.generator import Stores, Variant, generate_triple, load_adjectives, triple_from_record
from reviewgen.lexicon import delexicalize, mention_values, relexicalize
from reviewgen.parsing import parse
from reviewgen.patterns import PatternInstance, PatternKind, PatternStats, extract_patterns, learn, read_pattern_dump
from reviewgen.pipeline import STAGES, PipelineConfig, run_all, run_stage
from reviewgen.templates import Polarity, TemplateStore, validate_creative

K = PatternKind
MARKUP = re.compile(r"<[A-Z]+_ENTITY>|\[|\]")


def criterion(n, title):
    return pytest.mark.criterion(n, title)


def class_sentences(pipeline_out):
    by = {}
    for line in (pipeline_out / "ingest" / "sentences.jsonl").read_text(encoding="utf-8").splitlines():
        rec = json.loads(line)
        by.setdefault(rec["class"], []).append(rec["text"])
    return by


# -- 1


def small_corpora(pipeline_out):
    by = class_sentences(pipeline_out)
    yield ["Great food.", "Really great food here."], ["Great food, bad service."]
    yield [], ["The food was awful."]
    for cls in ("positive", "negative"):
        for start in range(0, 200, 50):
            yield by[cls][start:start + 30], by["neutral"][start:start + 20]


@criterion(1, "learn() equals a brute-force recount on small corpora")
def test_ac1_oracle_equivalence(pipeline_out):
    n = 0
    for target, contrast in small_corpora(pipeline_out):
        assert len(target) + len(contrast) <= 50
        t0 = time.perf_counter()
        got = learn([parse(s) for s in target], [parse(s) for s in contrast])
        assert time.perf_counter() - t0 < 1.0
        expected = {p: PatternStats(*fc) for p, fc in
                    brute_force_learn([parse(s) for s in target], [parse(s) for s in contrast]).items()}
        assert got == expected
        n += 1
    assert n >= 10


# -- 2


def scan_filtered(out, min_freq, min_prob):
    rows = 0
    for pol in Polarity:
        learned = read_pattern_dump(out / "learn" / f"{pol.value}_patterns.tsv")
        kept = read_pattern_dump(out / "filter" / f"{pol.value}_filtered.tsv")
        for p, s in kept.items():
            assert s.freq_target >= min_freq and s.prob is not None and s.prob >= min_prob
            assert learned[p] == s
        for p, s in learned.items():
            if s.freq_target >= min_freq and s.prob is not None and s.prob >= min_prob:
                assert p in kept
        rows += len(kept)
    return rows


@criterion(2, "every filtered pattern meets the thresholds, including overrides")
def test_ac2_threshold_conformance(pipeline_out, tmp_path):
    assert scan_filtered(pipeline_out, 3, 0.75) > 0
    out = tmp_path / "o"
    shutil.copytree(pipeline_out, out)
    for freq, prob in ((5, 0.9), (2, 0.5), (3, 1.0)):
        run_stage("filter", PipelineConfig(out=out, min_freq=freq, min_prob=prob))
        scan_filtered(out, freq, prob)


# -- 3

P = PatternInstance
SHAPES = [
    ("People wait to come here.", P(K.SUBJ_ACTINFVP_DOBJ, ("wait", "come"))),
    ("We tucked in a corner booth.", P(K.ACTVP_PREP_NP, ("tucked", "in"))),
    # "hands" is a noun to this tagger, so no AdjAdj pattern forms.
    ("It is hands down the best.", P(K.ADJ_ADJ, ("hands", "down"))),
    # "worth" tags as an adjective and yields SUBJ_AUXVP_ADJ(be worth) instead.
    ("The burger is worth the wait.", P(K.SUBJ_ACTVP_DOBJ, ("worth", "wait"))),
    ("You hear people screaming for seconds.", P(K.NP_PREP_NP, ("screaming", "for"))),
    ("The dessert was scrumptious.", P(K.SUBJ_AUXVP_ADJ, ("be", "scrumptious"))),
    ("They serve great food.", P(K.ADJ_NOUN, ("great", "food"))),
    ("I am addicted to their tacos.", P(K.PASSVP_PREP_NP, ("addicted", "to"))),
    ("The fish is always very fresh.", P(K.ADV_ADJ, ("very", "fresh"))),
    ("You will not waste your money.", P(K.SUBJ_ACTVP, ("not", "waste"))),
]
EXPECTED_MISSES = {"It is hands down the best.", "The burger is worth the wait."}


@criterion(3, "pattern kind and anchor recovered for at least 8 of 10 sentences")
def test_ac3_pattern_shapes():
    hits = {s for s, p in SHAPES if p in extract_patterns(parse(s))}
    print(f"pattern shapes: {len(hits)}/10")
    assert len(hits) >= 8
    assert {s for s, _ in SHAPES} - hits == EXPECTED_MISSES


# -- 4


@criterion(4, "harvested creative templates revalidate with no violations")
def test_ac4_creative_validation(pipeline_out, lexicon):
    store = TemplateStore.load(pipeline_out / "harvest" / "templates.jsonl")
    filtered = {pol: set(read_pattern_dump(pipeline_out / "filter" / f"{pol.value}_filtered.tsv"))
                for pol in Polarity}
    assert store.creative
    violations = {t.id: validate_creative(t, filtered[t.polarity], lexicon) for t in store.creative}
    assert {k: v for k, v in violations.items() if v} == {}


# -- 5


@criterion(5, "delexicalize then relexicalize reproduces every mini-corpus sentence")
def test_ac5_round_trip(lexicon, minicorpus_sentences):
    assert len(minicorpus_sentences) >= 500
    bad = []
    for s in minicorpus_sentences:
        d = delexicalize(s, parse(s), lexicon)
        if relexicalize(d.template_text, mention_values(d.mentions)) != s:
            bad.append(s)
    assert bad == []


# -- 6


@criterion(6, "200 triples regenerate identically, clean, resolvable and polarity-pure")
def test_ac6_generation(pipeline_out):
    stores = Stores(TemplateStore.load(pipeline_out / "harvest" / "templates.jsonl"), load_adjectives())
    lines = (pipeline_out / "generate" / "triples.jsonl").read_text(encoding="utf-8").splitlines()
    triples = [triple_from_record(json.loads(x)) for x in lines]
    assert len(triples) == 200
    assert sum(t.mr.polarity == Polarity.POSITIVE for _, t in triples) == 100
    for tid, t in triples:
        again = generate_triple(t.mr, stores, t.seed)
        assert again == t
        assert json.dumps(again.to_record(tid), ensure_ascii=False) == lines[[x for x, _ in triples].index(tid)]
        for review in t:
            assert not MARKUP.search(review.text), review.text
            for prov in review.provenance:
                item = stores.templates.resolve(prov["id"])
                if review.variant == Variant.CREATIVE:
                    assert item.polarity == t.mr.polarity
                for filler in prov.get("fillers", []):
                    if "id" in filler:
                        assert stores.templates.resolve(filler["id"]).polarity == t.mr.polarity
                    assert filler["polarity"] == t.mr.polarity.value


# -- 7


def fixed_pairs():
    rng = random.Random(20170)
    pairs = [([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])]
    while len(pairs) < 25:
        na, nb = rng.randint(2, 40), rng.randint(2, 40)
        shift, sa, sb = rng.uniform(-3, 3), rng.uniform(0.1, 5), rng.uniform(0.1, 5)
        pairs.append(([rng.gauss(0, sa) for _ in range(na)], [rng.gauss(shift, sb) for _ in range(nb)]))
    return pairs


@criterion(7, "Welch test matches the oracle; symmetry and monotonicity hold")
def test_ac7_statistics():
    worst = 0.0
    for a, b in fixed_pairs():
        r = welch_t_test(a, b)
        t, df, p = welch_oracle(a, b)
        assert abs(r.t_statistic - t) < 1e-9 and abs(r.p_value - p) < 1e-9
        assert abs(r.degrees_of_freedom - df) < 1e-9
        worst = max(worst, abs(r.p_value - p))
    print(f"worst |dp| = {worst:.2e}")
    rng = random.Random(1000)
    for _ in range(1000):
        a = [rng.uniform(-10, 10) for _ in range(rng.randint(2, 15))]
        b = [rng.uniform(-10, 10) for _ in range(rng.randint(2, 15))]
        r, s = welch_t_test(a, b), welch_t_test(b, a)
        assert r.t_statistic == pytest.approx(-s.t_statistic, rel=1e-12)
        assert r.degrees_of_freedom == pytest.approx(s.degrees_of_freedom, rel=1e-12)
        assert abs(r.p_value - s.p_value) < 1e-12
        df = rng.uniform(1, 100)
        t1, t2 = sorted((rng.uniform(0, 15), rng.uniform(0, 15)))
        assert t_two_sided_p(t2, df) <= t_two_sided_p(t1, df)


# -- 8

# (ratings, expected majority, judgements matching it)
BATCH = {
    Variant.CREATIVE: [("HHHHH", "H", 5), ("HHHHM", "H", 4), ("HHHML", "H", 3), ("HHMML", None, 0),
                       ("HHHHL", "H", 4), ("MMMHH", "M", 3), ("HHHHH", "H", 5), ("HHLLM", None, 0),
                       ("HHHMM", "H", 3), ("HHHHH", "H", 5)],
    Variant.HYPERBOLIC: [("MMMMM", "M", 5), ("MMMHL", "M", 3), ("HHMML", None, 0), ("LLMMH", None, 0),
                         ("MMMMH", "M", 4), ("HHHMM", "H", 3), ("MMHHL", None, 0), ("MMMLL", "M", 3),
                         ("LLLMH", "L", 3), ("MMMMM", "M", 5)],
    Variant.BASIC: [("LLLLL", "L", 5), ("LLLMH", "L", 3), ("LLMMH", None, 0), ("LLLLM", "L", 4),
                    ("MMMLL", "M", 3), ("HHLLM", None, 0), ("LLLLL", "L", 5), ("LLLHH", "L", 3),
                    ("MMLLH", None, 0), ("LLLLH", "L", 4)],
}
RATING = {"H": Rating.HIGH, "M": Rating.MED, "L": Rating.LOW}
EXPECTED_DIST = {Variant.CREATIVE: (70.0, 10.0, 0.0, 20.0), Variant.HYPERBOLIC: (10.0, 50.0, 10.0, 30.0),
                 Variant.BASIC: (0.0, 10.0, 60.0, 30.0)}


@criterion(8, "majority vote, agreement and distribution on a 30-item batch")
def test_ac8_aggregation():
    batch = []
    for variant, items in BATCH.items():
        for k, (ratings, label, _) in enumerate(items):
            recs = [JudgementRecord(f"t{k:02d}", variant, "naturalness", RATING[c], f"w{j}")
                    for j, c in enumerate(ratings)]
            assert majority_vote(recs) == (RATING[label] if label else NO_CONSENSUS)
            batch += recs
    assert len(batch) == 150
    assert sum(label is None for items in BATCH.values() for _, label, _ in items) == 8
    assert agreement(batch) == pytest.approx(85 / 110)
    assert agreement(batch, per_item=True) == pytest.approx(85 / 110)
    dist = distribution(batch)
    for variant, row in EXPECTED_DIST.items():
        assert dist[(variant, "naturalness")] == pytest.approx(row)
    for row in dist.values():
        assert abs(sum(row) - 100.0) <= 0.01


# -- 9

CALM = ["the soup was warm and the room was quiet", "we ordered noodles and tea for two",
        "the menu has many dishes to try", "our table was near the window", "they open early on weekends"]
ANGRY = ["the waiter was rude and i was furious", "i hate how angry the manager got",
         "so annoyed by the rude hostess", "we left mad and annoyed"]


@criterion(9, "an anger category dominating negative texts is reported NEGATIVE")
def test_ac9_directionality():
    rng = random.Random(9)
    lex = load_category_lexicon()
    pos = [profile(" ".join(rng.sample(CALM, 3)) + " !", lex, f"p{i}") for i in range(40)]
    neg = [profile(" ".join(rng.sample(CALM, 2) + rng.sample(ANGRY, 1)), lex, f"n{i}") for i in range(40)]
    out = {d.category: d for d in compare_classes(pos, neg)}
    assert "anger" in out
    assert out["anger"].direction == Polarity.NEGATIVE and out["anger"].p_value < 0.05


# -- 10


@criterion(10, "full pipeline runs under 10 s and reruns give identical manifests")
def test_ac10_end_to_end(tmp_path):
    def manifests(out: Path):
        return {s: (out / s / "manifest.json").read_bytes() for s in STAGES}

    t0 = time.perf_counter()
    run_all(PipelineConfig(out=tmp_path / "a"))
    elapsed = time.perf_counter() - t0
    run_all(PipelineConfig(out=tmp_path / "b"))
    print(f"pipeline: {elapsed:.2f} s")
    assert elapsed < 10.0
    assert manifests(tmp_path / "a") == manifests(tmp_path / "b")
