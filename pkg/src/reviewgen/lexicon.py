"""Restaurant entity lexicons, entity spotting and (de)lexicalization."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .parsing import ParsedSentence, Token, tokenize_and_tag

log = logging.getLogger(__name__)


class EntityType(str, Enum):
    RESTAURANT = "restaurant"
    CUISINE = "cuisine"
    FOOD = "food"
    SERVICE = "service"
    STAFF = "staff"

    @property
    def placeholder(self) -> str:
        return f"<{self.name}_ENTITY>"


# generation order and cross-type priority
ENTITY_ORDER = (EntityType.RESTAURANT, EntityType.CUISINE, EntityType.FOOD, EntityType.SERVICE, EntityType.STAFF)
DEFAULT_PRIORITY = (EntityType.FOOD, EntityType.CUISINE, EntityType.RESTAURANT, EntityType.STAFF, EntityType.SERVICE)

PLACEHOLDER_RE = re.compile(r"<([A-Z]+)_ENTITY>")
MAX_PHRASE_WORDS = 4


class MissingSlotError(ValueError):
    pass


@dataclass(frozen=True)
class EntityLexicon:
    entries: Mapping[EntityType, frozenset[str]]
    _index: dict[str, EntityType] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for etype, phrases in self.entries.items():
            for p in phrases:
                self._index.setdefault(p, etype)

    def lookup(self, phrase: str) -> EntityType | None:
        return self._index.get(phrase)

    def __contains__(self, phrase: str) -> bool:
        return phrase in self._index

    def __getitem__(self, etype: EntityType) -> frozenset[str]:
        return self.entries.get(etype, frozenset())


@dataclass(frozen=True)
class EntityMention:
    entity_type: EntityType
    surface: str
    span: tuple[int, int]  # inclusive token range


@dataclass(frozen=True)
class DelexicalizedSentence:
    template_text: str
    mentions: tuple[EntityMention, ...]
    word_count: int

    @property
    def entity_types(self) -> set[EntityType]:
        return {m.entity_type for m in self.mentions}


def normalize_phrase(phrase: str) -> str:
    """Lowercase and re-space a phrase the way the tokenizer splits it."""
    return " ".join(t.lower for t in tokenize_and_tag(phrase.strip()))


def _read_phrases(path: Path) -> list[str]:
    phrases = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        phrases.append(normalize_phrase(line))
    return phrases


def load_lexicon(paths: Mapping[EntityType, str | Path],
                 priority: Sequence[EntityType] = DEFAULT_PRIORITY) -> EntityLexicon:
    """Load the five entity files; earlier types in ``priority`` win conflicts."""
    missing = [t for t in EntityType if t not in paths]
    if missing:
        raise FileNotFoundError(f"no lexicon file for: {', '.join(t.value for t in missing)}")
    owner: dict[str, EntityType] = {}
    entries: dict[EntityType, set[str]] = {t: set() for t in EntityType}
    for etype in priority:
        path = Path(paths[etype])
        if not path.is_file():
            raise FileNotFoundError(f"lexicon file for {etype.value} not found: {path}")
        phrases = _read_phrases(path)
        if not phrases:
            log.warning("lexicon for %s is empty (%s)", etype.value, path)
        for p in phrases:
            if not p:
                continue
            if p in owner and owner[p] != etype:
                log.warning("phrase %r listed under %s and %s; keeping %s",
                            p, owner[p].value, etype.value, owner[p].value)
                continue
            owner[p] = etype
            entries[etype].add(p)
    return EntityLexicon({t: frozenset(entries[t]) for t in EntityType})


def lexicon_paths(directory) -> dict[EntityType, Path]:
    d = Path(directory)
    return {t: d / f"{t.value}.txt" for t in EntityType}


@lru_cache(maxsize=1)
def default_lexicon() -> EntityLexicon:
    with resources.as_file(resources.files("reviewgen") / "data" / "entities") as d:
        return load_lexicon(lexicon_paths(d))


def _singulars(word: str) -> list[str]:
    out = []
    if word.endswith("es") and len(word) > 3:
        out.append(word[:-2])
    if word.endswith("s") and len(word) > 2:
        out.append(word[:-1])
    return out


def find_entities(tokens: Sequence[Token], lexicon: EntityLexicon, text: str | None = None) -> list[EntityMention]:
    """Longest-match, left-to-right, non-overlapping lexicon lookup."""
    mentions = []
    i = 0
    n = len(tokens)
    while i < n:
        hit = None
        for size in range(min(MAX_PHRASE_WORDS, n - i), 0, -1):
            window = tokens[i:i + size]
            if any(t.is_punct for t in window):
                continue
            words = [t.lower for t in window]
            etype = lexicon.lookup(" ".join(words))
            if etype is None:
                for sing in _singulars(words[-1]):
                    etype = lexicon.lookup(" ".join(words[:-1] + [sing]))
                    if etype is not None:
                        break
            if etype is not None:
                hit = (etype, size)
                break
        if hit is None:
            i += 1
            continue
        etype, size = hit
        first, last = tokens[i], tokens[i + size - 1]
        if text is not None:
            surface = text[first.start:last.start + len(last.surface)]
        else:
            surface = "".join(t.surface + t.ws for t in tokens[i:i + size - 1]) + last.surface
        mentions.append(EntityMention(etype, surface, (i, i + size - 1)))
        i += size
    return mentions


def word_count(tokens: Sequence[Token], mentions: Sequence[EntityMention] = ()) -> int:
    """Non-punctuation tokens, each mention counted as one word."""
    inside = set()
    for m in mentions:
        inside.update(range(m.span[0] + 1, m.span[1] + 1))
    return sum(1 for t in tokens if not t.is_punct and t.index not in inside)


def delexicalize(sentence: str, parsed: ParsedSentence, lexicon: EntityLexicon) -> DelexicalizedSentence:
    mentions = find_entities(parsed.tokens, lexicon, sentence)
    pieces = []
    cursor = 0
    for m in mentions:
        first, last = parsed.tokens[m.span[0]], parsed.tokens[m.span[1]]
        pieces.append(sentence[cursor:first.start])
        pieces.append(m.entity_type.placeholder)
        cursor = last.start + len(last.surface)
    pieces.append(sentence[cursor:])
    return DelexicalizedSentence("".join(pieces), tuple(mentions), word_count(parsed.tokens, mentions))


def relexicalize(template_text: str, values: Mapping[EntityType, str | Sequence[str]]) -> str:
    """Fill placeholders in order.

    A value may be a list, consumed left to right, when a type occurs more than
    once; a single string is reused for every occurrence.
    """
    used: dict[EntityType, int] = {}

    def fill(m: re.Match) -> str:
        try:
            etype = EntityType[m.group(1)]
        except KeyError:
            raise MissingSlotError(f"unknown placeholder {m.group(0)}") from None
        if etype not in values:
            raise MissingSlotError(f"no value for {etype.value}")
        value = values[etype]
        if isinstance(value, str):
            return value
        k = used.get(etype, 0)
        if k >= len(value):
            raise MissingSlotError(f"not enough values for {etype.value}")
        used[etype] = k + 1
        return value[k]

    return PLACEHOLDER_RE.sub(fill, template_text)


def mention_values(mentions: Sequence[EntityMention]) -> dict[EntityType, list[str]]:
    values: dict[EntityType, list[str]] = {}
    for m in mentions:
        values.setdefault(m.entity_type, []).append(m.surface)
    return values
