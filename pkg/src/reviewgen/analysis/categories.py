"""Dictionary-based word category profiling and per-category class comparison."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from ..parsing import tokenize
from ..templates import Polarity
from .stats import welch_t_test

log = logging.getLogger(__name__)


class DictionaryError(ValueError):
    pass


@dataclass(frozen=True)
class CategoryLexicon:
    categories: dict[str, frozenset[str]]
    punct_categories: frozenset[str] = frozenset()
    _exact: dict[str, tuple[str, ...]] = field(default_factory=dict, repr=False, compare=False)
    _prefixes: tuple[tuple[str, str], ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        exact: dict[str, list[str]] = {}
        prefixes = []
        for name, patterns in self.categories.items():
            for p in patterns:
                if p.endswith("*"):
                    prefixes.append((p[:-1], name))
                else:
                    exact.setdefault(p, []).append(name)
        self._exact.update({w: tuple(sorted(c)) for w, c in exact.items()})
        object.__setattr__(self, "_prefixes", tuple(sorted(prefixes)))

    def categories_of(self, word: str) -> set[str]:
        cats = set(self._exact.get(word, ()))
        for prefix, name in self._prefixes:
            if word.startswith(prefix):
                cats.add(name)
        return cats

    @property
    def names(self) -> list[str]:
        return sorted(self.categories)


def _check_pattern(p: str, lineno: int) -> str:
    if p != p.lower():
        p = p.lower()
    if "*" in p[:-1]:
        raise DictionaryError(f"line {lineno}: '*' is only allowed at the end of a pattern: {p!r}")
    return p


def parse_category_dictionary(text: str) -> CategoryLexicon:
    """Parse a two-section ``%``-delimited category dictionary.

    The header maps ``id<TAB>name``; a third ``punct`` column marks a category
    that also counts punctuation tokens.  Body lines are ``word<TAB>id[,id...]``
    (ids may also be tab separated).
    """
    lines = text.splitlines()
    idx = [i for i, line in enumerate(lines) if line.strip() == "%"]
    if not lines or not any(line.strip() for line in lines):
        log.warning("category dictionary is empty")
        return CategoryLexicon({})
    if len(idx) < 2:
        raise DictionaryError("expected a header section delimited by '%' lines")
    names: dict[str, str] = {}
    punct = set()
    for lineno in range(idx[0] + 1, idx[1]):
        line = lines[lineno].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise DictionaryError(f"line {lineno + 1}: expected id<TAB>name")
        names[parts[0].strip()] = parts[1].strip()
        if len(parts) > 2 and parts[2].strip().lower() == "punct":
            punct.add(parts[1].strip())
    cats: dict[str, set[str]] = {n: set() for n in names.values()}
    for lineno in range(idx[1] + 1, len(lines)):
        line = lines[lineno].rstrip()
        if not line.strip():
            continue
        parts = line.split("\t")
        word = _check_pattern(parts[0].strip(), lineno + 1)
        ids = [i.strip() for field_ in parts[1:] for i in field_.split(",") if i.strip()]
        if not ids:
            raise DictionaryError(f"line {lineno + 1}: no category ids for {word!r}")
        for cid in ids:
            if cid not in names:
                raise DictionaryError(f"line {lineno + 1}: unknown category id {cid!r}")
            cats[names[cid]].add(word)
    if not names:
        log.warning("category dictionary defines no categories")
    return CategoryLexicon({n: frozenset(ws) for n, ws in cats.items()}, frozenset(punct))


def load_category_lexicon(path=None) -> CategoryLexicon:
    if path is None:
        text = (resources.files("reviewgen") / "data" / "categories.dic").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_category_dictionary(text)


@dataclass(frozen=True)
class CategoryProfile:
    review_id: str
    percentages: dict[str, float]
    total_tokens: int


def profile(text: str, lexicon: CategoryLexicon, review_id: str = "") -> CategoryProfile:
    tokens = [s.lower() for s, _, _ in tokenize(text)]
    words = [t for t in tokens if any(ch.isalnum() for ch in t)]
    if not words:
        raise ValueError("text has no word tokens to profile")
    hits = dict.fromkeys(lexicon.categories, 0)
    for tok in tokens:
        is_word = any(ch.isalnum() for ch in tok)
        for cat in lexicon.categories_of(tok):
            if is_word or cat in lexicon.punct_categories:
                hits[cat] += 1
    total = len(words)
    return CategoryProfile(review_id, {c: 100.0 * h / total for c, h in hits.items()}, total)


@dataclass(frozen=True)
class CategoryDifference:
    category: str
    direction: Polarity
    p_value: float
    t_statistic: float
    mean_positive: float
    mean_negative: float

    def __iter__(self):
        return iter((self.category, self.direction, self.p_value))


def compare_classes(pos_profiles: Sequence[CategoryProfile], neg_profiles: Sequence[CategoryProfile],
                    alpha: float = 0.05, correction: str | None = None) -> list[CategoryDifference]:
    """Categories whose per-review percentages differ between classes, most significant first.

    ``correction="bonferroni"`` scales p-values by the number of categories tested.
    """
    if not pos_profiles or not neg_profiles:
        raise ValueError("both classes need at least one profile")
    if correction not in (None, "bonferroni"):
        raise ValueError(f"unknown correction {correction!r}")
    cats = sorted(set().union(*(p.percentages for p in (*pos_profiles, *neg_profiles))))
    out = []
    for cat in cats:
        a = [p.percentages.get(cat, 0.0) for p in pos_profiles]
        b = [p.percentages.get(cat, 0.0) for p in neg_profiles]
        res = welch_t_test(a, b)
        p = res.p_value
        if correction == "bonferroni":
            p = min(1.0, p * len(cats))
        if p < alpha:
            ma, mb = sum(a) / len(a), sum(b) / len(b)
            direction = Polarity.POSITIVE if ma > mb else Polarity.NEGATIVE
            out.append(CategoryDifference(cat, direction, p, res.t_statistic, ma, mb))
    out.sort(key=lambda d: (d.p_value, d.category))
    return out
