"""Crowd judgement export/import, majority voting and agreement."""

from __future__ import annotations

import csv
import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..generator import Triple, Variant

CRITERIA = ("convincingness", "interestingness", "naturalness")
GRAMMAR_CRITERIA = ("grammar",)
JUDGES_PER_ITEM = 5
MAJORITY = 3
SLOTS = ("a", "b", "c")
JUDGEMENT_HEADER = ("triple_id", "variant_slot", "criterion", "rating", "worker_id")
NO_CONSENSUS = "NO_CONSENSUS"


class Rating(str, Enum):
    HIGH = "HIGH"
    MED = "MED"
    LOW = "LOW"

    @classmethod
    def parse(cls, text: str) -> "Rating":
        key = text.strip().lower()
        table = {"high": cls.HIGH, "h": cls.HIGH, "med": cls.MED, "medium": cls.MED, "m": cls.MED,
                 "low": cls.LOW, "l": cls.LOW}
        if key not in table:
            raise ValueError(f"unknown rating {text!r}")
        return table[key]


@dataclass(frozen=True)
class JudgementRecord:
    triple_id: str
    variant: Variant
    criterion: str
    rating: Rating
    worker_id: str

    @property
    def item(self) -> tuple[str, Variant, str]:
        return (self.triple_id, self.variant, self.criterion)


def group_items(records: Iterable[JudgementRecord]) -> dict[tuple[str, Variant, str], list[JudgementRecord]]:
    items: dict[tuple, list[JudgementRecord]] = defaultdict(list)
    for r in records:
        items[r.item].append(r)
    return dict(items)


def majority_vote(records: Sequence[JudgementRecord]) -> Rating | str:
    if len(records) != JUDGES_PER_ITEM:
        raise ValueError(f"expected {JUDGES_PER_ITEM} judgements, got {len(records)}")
    if len({r.item for r in records}) != 1:
        raise ValueError("judgements belong to different items")
    rating, count = Counter(r.rating for r in records).most_common(1)[0]
    return rating if count >= MAJORITY else NO_CONSENSUS


def agreement(records: Iterable[JudgementRecord], per_item: bool = False) -> float:
    """Share of individual judgements that match their item's majority label.

    Items without a majority are left out.  ``per_item`` averages the
    per-item match rate instead of pooling judgements.
    """
    matched = total = 0
    rates = []
    for recs in group_items(records).values():
        label = majority_vote(recs)
        if label == NO_CONSENSUS:
            continue
        hits = sum(1 for r in recs if r.rating == label)
        matched += hits
        total += len(recs)
        rates.append(hits / len(recs))
    if not total:
        raise ValueError("no item has a majority label")
    return sum(rates) / len(rates) if per_item else matched / total


BUCKETS = (Rating.HIGH, Rating.MED, Rating.LOW, NO_CONSENSUS)


def distribution_counts(records: Iterable[JudgementRecord]) -> dict[tuple[Variant, str], dict]:
    counts: dict[tuple[Variant, str], dict] = {}
    for (_, variant, criterion), recs in sorted(group_items(records).items(), key=lambda kv: _item_order(kv[0])):
        row = counts.setdefault((variant, criterion), dict.fromkeys(BUCKETS, 0))
        row[majority_vote(recs)] += 1
    return counts


def distribution(records: Iterable[JudgementRecord]) -> dict[tuple[Variant, str], tuple[float, float, float, float]]:
    """Per (variant, criterion): percentage of items labelled HIGH, MED, LOW, or with no consensus."""
    out = {}
    for key, row in distribution_counts(records).items():
        n = sum(row.values())
        out[key] = tuple(100.0 * row[b] / n for b in BUCKETS)
    return out


def _item_order(item):
    triple_id, variant, criterion = item
    return (triple_id, list(Variant).index(variant), criterion)


# -- HIT files -------------------------------------------------------------------

def labels_path_for(path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".labels.json")


def export_hits(triples: Mapping[str, Triple] | Sequence[Triple], path, labels_path=None) -> Path:
    """Write one HIT row per triple and a sidecar with the hidden slot labels."""
    if not isinstance(triples, Mapping):
        triples = {f"t{i:04d}": t for i, t in enumerate(triples)}
    labels_path = Path(labels_path) if labels_path else labels_path_for(path)
    labels = {}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["triple_id", "polarity"] + [f"review_{s}" for s in SLOTS])
        for tid, triple in triples.items():
            shown = triple.displayed
            w.writerow([tid, triple.mr.polarity.value] + [r.text for r in shown])
            labels[tid] = {s: r.variant.value for s, r in zip(SLOTS, shown)}
    labels_path.write_text(json.dumps(labels, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return labels_path


@dataclass(frozen=True)
class IncompleteItem:
    triple_id: str
    variant: Variant
    criterion: str
    count: int


@dataclass
class ImportResult:
    batch: list[JudgementRecord]
    incomplete: list[IncompleteItem]

    @property
    def complete(self) -> bool:
        return not self.incomplete


def import_judgements(path, labels_path=None, criteria: Sequence[str] = CRITERIA) -> ImportResult:
    """Read a judgement CSV and join it against the HIT sidecar.

    Only items with exactly five judgements enter the batch; the rest are
    listed in ``incomplete``.
    """
    labels_path = Path(labels_path) if labels_path else labels_path_for(path)
    labels = json.loads(Path(labels_path).read_text(encoding="utf-8"))
    records = []
    text = Path(path).read_text(encoding="utf-8")
    rows = list(csv.DictReader(text.splitlines())) if text.strip() else []
    for lineno, row in enumerate(rows, 2):
        missing = [c for c in JUDGEMENT_HEADER if c not in row or row[c] is None]
        if missing:
            raise ValueError(f"{path}:{lineno}: missing columns {missing}")
        tid = row["triple_id"].strip()
        if tid not in labels:
            raise ValueError(f"{path}:{lineno}: unknown triple id {tid!r}")
        slot = row["variant_slot"].strip().lower()
        if slot not in labels[tid]:
            raise ValueError(f"{path}:{lineno}: unknown variant slot {slot!r}")
        criterion = row["criterion"].strip().lower()
        if criterion not in criteria:
            raise ValueError(f"{path}:{lineno}: unexpected criterion {criterion!r}")
        records.append(JudgementRecord(tid, Variant(labels[tid][slot]), criterion, Rating.parse(row["rating"]),
                                       row["worker_id"].strip()))
    items = group_items(records)
    batch, incomplete = [], []
    for tid in sorted(labels):
        for variant in Variant:
            for criterion in criteria:
                recs = items.get((tid, variant, criterion), [])
                if len(recs) == JUDGES_PER_ITEM:
                    batch.extend(recs)
                else:
                    incomplete.append(IncompleteItem(tid, variant, criterion, len(recs)))
    return ImportResult(batch, incomplete)


def write_judgements(records: Iterable[JudgementRecord], labels: Mapping[str, Mapping[str, str]], path) -> None:
    """Write records back in the CSV layout, mapping variants to their display slots."""
    slot_of = {tid: {v: s for s, v in m.items()} for tid, m in labels.items()}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(JUDGEMENT_HEADER)
        for r in records:
            w.writerow([r.triple_id, slot_of[r.triple_id][r.variant.value], r.criterion, r.rating.value.lower(),
                        r.worker_id])
