"""Star-rated review loading, polarity split and class balancing."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

log = logging.getLogger(__name__)

NEGATIVE_STARS = frozenset({1, 2})
NEUTRAL_STARS = frozenset({3})
POSITIVE_STARS = frozenset({5})


@dataclass(frozen=True)
class RawReview:
    id: str
    stars: int
    text: str
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if isinstance(self.stars, bool) or self.stars not in (1, 2, 3, 4, 5):
            raise ValueError(f"stars must be an integer in 1..5, got {self.stars!r}")
        if not isinstance(self.text, str) or not self.text.strip():
            raise ValueError("review text must be non-empty")


@dataclass
class ReviewBatch:
    """Reviews read from one file plus the number of records skipped."""

    reviews: list[RawReview]
    skipped: int = 0

    def __iter__(self) -> Iterator[RawReview]:
        return iter(self.reviews)

    def __len__(self) -> int:
        return len(self.reviews)

    def __getitem__(self, i):
        return self.reviews[i]


def _coerce_stars(value):
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str) and value.strip().isdigit():
        return int(value)
    return None


def load_reviews(path) -> ReviewBatch:
    """Read one JSON object per line.

    Records without usable ``stars`` or ``text`` are skipped and counted;
    lines that are not JSON objects are skipped with a warning.
    """
    reviews, skipped = [], 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                log.warning("%s:%d: malformed record skipped (%s)", path, lineno, exc.msg)
                skipped += 1
                continue
            if not isinstance(rec, dict):
                log.warning("%s:%d: record is not an object, skipped", path, lineno)
                skipped += 1
                continue
            stars, text = _coerce_stars(rec.get("stars")), rec.get("text")
            if stars not in (1, 2, 3, 4, 5) or not isinstance(text, str) or not text.strip():
                skipped += 1
                continue
            rid = rec.get("review_id", rec.get("id"))
            rid = str(rid) if rid is not None else f"line{lineno}"
            meta = {k: v for k, v in rec.items() if k not in ("stars", "text")}
            reviews.append(RawReview(rid, stars, text, meta))
    if skipped:
        log.warning("%s: skipped %d record(s) without valid stars/text", path, skipped)
    return ReviewBatch(reviews, skipped)


@dataclass(frozen=True)
class ClassifiedCorpus:
    positive: tuple[RawReview, ...] = ()
    neutral: tuple[RawReview, ...] = ()
    negative: tuple[RawReview, ...] = ()

    def sizes(self) -> dict[str, int]:
        return {"positive": len(self.positive), "neutral": len(self.neutral), "negative": len(self.negative)}


def split_by_stars(reviews: Sequence[RawReview]) -> ClassifiedCorpus:
    """1-2 stars negative, 3 neutral, 5 positive; 4-star reviews are dropped."""
    pos, neu, neg = [], [], []
    for r in reviews:
        if r.stars in NEGATIVE_STARS:
            neg.append(r)
        elif r.stars in NEUTRAL_STARS:
            neu.append(r)
        elif r.stars in POSITIVE_STARS:
            pos.append(r)
    return ClassifiedCorpus(tuple(pos), tuple(neu), tuple(neg))


def balance_positive(corpus: ClassifiedCorpus, seed: int) -> ClassifiedCorpus:
    """Downsample positives to the negative class size, keeping file order."""
    n_pos, n_neg = len(corpus.positive), len(corpus.negative)
    if n_pos < n_neg:
        raise ValueError(f"cannot balance: {n_pos} positive < {n_neg} negative reviews")
    if n_pos == n_neg:
        return corpus
    keep = sorted(random.Random(seed).sample(range(n_pos), n_neg))
    return ClassifiedCorpus(tuple(corpus.positive[i] for i in keep), corpus.neutral, corpus.negative)
