"""Basic frames, learned hyperbolic (entity, adjective pattern) pairs and creative sentence templates."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .lexicon import PLACEHOLDER_RE, DelexicalizedSentence, EntityLexicon, EntityMention, EntityType, delexicalize
from .parsing import BE_FORMS, ParsedSentence, parse
from .patterns import (
    NGRAM_KINDS,
    PatternInstance,
    PatternKind,
    PatternMatch,
    PatternStats,
    is_adjective_pattern,
    match_patterns,
)


class Polarity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class Relation(str, Enum):
    HAD = "HAD"
    IS_WAS = "IS_WAS"
    LOOKED_TASTED = "LOOKED_TASTED"


class Arity(str, Enum):
    SINGLE = "SINGLE"
    COMBINED = "COMBINED"


COPULAR_VERBS = BE_FORMS | {
    "taste", "tastes", "tasted", "look", "looks", "looked",
    "smell", "smells", "smelled", "smelt", "seem", "seems", "seemed",
}
MIN_WORDS, MAX_WORDS = 5, 15


@dataclass(frozen=True)
class BasicFrame:
    text: str
    relation: Relation
    arity: Arity
    entity_type: EntityType | None = None
    combined_types: tuple[EntityType, EntityType] | None = None

    @property
    def slot_types(self) -> tuple[EntityType, ...]:
        """Entity slot types in text order."""
        if self.arity == Arity.SINGLE:
            return (self.entity_type,)
        order = sorted(self.combined_types, key=lambda t: self.text.index(f"({t.value})"))
        return tuple(order)

    def entity_slot_count(self) -> int:
        if self.arity == Arity.SINGLE:
            return self.text.count("(entity)")
        return sum(self.text.count(f"({t.value})") for t in self.combined_types)


@dataclass(frozen=True)
class HyperbolicPair:
    entity_type: EntityType
    pattern: PatternInstance
    polarity: Polarity
    realization: str
    freq: int = 0
    prob: float = 0.0

    @property
    def id(self) -> str:
        return "hyperbolic:" + _digest(self.polarity.value, self.entity_type.value, self.pattern.kind.value,
                                       self.pattern.anchor_text)


@dataclass(frozen=True)
class CreativeTemplate:
    entity_type: EntityType
    polarity: Polarity
    text: str
    source_pattern: PatternInstance
    freq: int
    prob: float
    word_count: int
    source_text: str = ""

    @property
    def id(self) -> str:
        return "creative:" + _digest(self.polarity.value, self.entity_type.value, self.text)


@dataclass
class AnnotatedSentence:
    """A corpus sentence with its parse, delexicalized form and pattern matches."""

    text: str
    parsed: ParsedSentence
    delex: DelexicalizedSentence
    matches: list[PatternMatch]


def _digest(*parts: str) -> str:
    return hashlib.sha1("\x1f".join(parts).encode("utf-8")).hexdigest()[:12]


def annotate(sentences: Iterable[str], lexicon: EntityLexicon) -> list[AnnotatedSentence]:
    out = []
    for s in sentences:
        ps = parse(s)
        out.append(AnnotatedSentence(s, ps, delexicalize(s, ps, lexicon), match_patterns(ps)))
    return out


# -- basic frames ------------------------------------------------------------

def basic_frames() -> list[BasicFrame]:
    frames = []
    for etype in (EntityType.RESTAURANT, EntityType.CUISINE, EntityType.FOOD, EntityType.SERVICE, EntityType.STAFF):
        frames.append(BasicFrame("They had [adj] (entity).", Relation.HAD, Arity.SINGLE, etype))
        frames.append(BasicFrame("The (entity) was|is [adj].", Relation.IS_WAS, Arity.SINGLE, etype))
        if etype == EntityType.FOOD:
            frames.append(BasicFrame("The (entity) looked|tasted [adj].", Relation.LOOKED_TASTED, Arity.SINGLE, etype))
    rc = (EntityType.RESTAURANT, EntityType.CUISINE)
    ss = (EntityType.SERVICE, EntityType.STAFF)
    frames.append(BasicFrame("They had [adj] (cuisine) at this [adj] (restaurant).", Relation.HAD, Arity.COMBINED,
                             combined_types=rc))
    frames.append(BasicFrame("The (restaurant) was|is [adj] and the (cuisine) was|is [adj].", Relation.IS_WAS,
                             Arity.COMBINED, combined_types=rc))
    frames.append(BasicFrame("They had [adj] (service) and [adj] (staff).", Relation.HAD, Arity.COMBINED,
                             combined_types=ss))
    frames.append(BasicFrame("The (service) was|is [adj] and the (staff) was|is [adj].", Relation.IS_WAS,
                             Arity.COMBINED, combined_types=ss))
    return frames


def frame_id(index: int) -> str:
    return f"basic:{index}"


# -- hyperbolic pairs ----------------------------------------------------------

def _mention_in_chunk(m: EntityMention, sentence: ParsedSentence, chunk_index: int | None) -> bool:
    if chunk_index is None:
        return False
    c = sentence.chunks[chunk_index]
    return c.start <= m.span[0] and m.span[1] <= c.end


def _copular_vps_with_subject(sentence: ParsedSentence, m: EntityMention) -> list[int]:
    out = []
    for ci, c in enumerate(sentence.chunks):
        if c.kind != "VP":
            continue
        head = sentence.tokens[c.head].lower
        if head in COPULAR_VERBS and _mention_in_chunk(m, sentence, sentence.subject_of.get(ci)):
            out.append(ci)
    return out


def relates_to_mention(match: PatternMatch, sentence: ParsedSentence, m: EntityMention) -> bool:
    """Whether an adjective pattern describes the mention.

    Either the mention is the subject of a copular or perception VP the pattern
    hangs off, or an n-gram pattern sits directly on the mention.
    """
    kind = match.pattern.kind
    lo, hi = match.span
    if kind == PatternKind.SUBJ_AUXVP_ADJ:
        vp = sentence.chunks[match.vp]
        return sentence.tokens[vp.head].lower in BE_FORMS and \
            _mention_in_chunk(m, sentence, sentence.subject_of.get(match.vp))
    if kind not in NGRAM_KINDS:
        return False
    if hi + 1 == m.span[0] or m.span[0] <= hi <= m.span[1]:
        return True
    for ci in _copular_vps_with_subject(sentence, m):
        vp = sentence.chunks[ci]
        if vp.start <= lo <= vp.end + 1:
            return True
    return False


def realization(match: PatternMatch, sentence: ParsedSentence, m: EntityMention | None = None) -> str:
    """Adverb/adjective words of a match, minus auxiliaries and the mention itself."""
    words = []
    for w, i in zip(match.pattern.anchor, match.positions):
        if m is not None and m.span[0] <= i <= m.span[1]:
            continue
        if sentence.tokens[i].pos in ("ADV", "ADJ"):
            words.append(w)
    return " ".join(words)


def _filtered_adjective_matches(s: AnnotatedSentence, filtered: set[PatternInstance]) -> list[PatternMatch]:
    return [mt for mt in s.matches if mt.pattern in filtered and is_adjective_pattern(mt.pattern)]


def extract_hyperbolic_pairs(corpus: Sequence[AnnotatedSentence], filtered: set[PatternInstance],
                             polarity: Polarity,
                             stats: Mapping[PatternInstance, PatternStats] | None = None) -> list[HyperbolicPair]:
    seen = set()
    pairs = []
    for s in corpus:
        if len(s.delex.mentions) != 1:
            continue
        m = s.delex.mentions[0]
        for mt in _filtered_adjective_matches(s, filtered):
            if not relates_to_mention(mt, s.parsed, m):
                continue
            key = (m.entity_type, mt.pattern, polarity)
            if key in seen:
                continue
            text = realization(mt, s.parsed, m)
            if not text:
                continue
            seen.add(key)
            st = stats.get(mt.pattern) if stats else None
            pairs.append(HyperbolicPair(m.entity_type, mt.pattern, polarity, text,
                                        st.freq_target if st else 0, st.prob if st else 0.0))
    return pairs


# -- creative templates --------------------------------------------------------

def _adjective_site(match: PatternMatch, sentence: ParsedSentence) -> int:
    return max(i for i in match.positions if sentence.tokens[i].pos == "ADJ")


def _bracket_choice(matches: list[PatternMatch]) -> PatternMatch:
    def rank(mt: PatternMatch):
        lo, hi = mt.span
        return (mt.pattern.kind not in NGRAM_KINDS, -(hi - lo), lo, mt.pattern.kind.value)
    return min(matches, key=rank)


def render_template_text(s: AnnotatedSentence, bracket: tuple[int, int]) -> str:
    """Delexicalized text with the bracketed token span uppercased inside ``[...]``."""
    toks = s.parsed.tokens
    lo, hi = bracket
    for m in s.delex.mentions:
        if m.span[0] <= hi and lo <= m.span[1]:
            lo, hi = min(lo, m.span[0]), max(hi, m.span[1])
    mention_at = {m.span[0]: m for m in s.delex.mentions}
    out = []
    i = 0
    while i < len(toks):
        if i == lo:
            out.append("[")
        m = mention_at.get(i)
        if m is not None:
            out.append(m.entity_type.placeholder)
            last = m.span[1]
        else:
            t = toks[i]
            out.append(t.surface.upper() if lo <= i <= hi else t.surface)
            last = i
        if last == hi:
            out.append("]")
        out.append(toks[last].ws)
        i = last + 1
    return "".join(out).rstrip()


def count_adjective_sites(s: AnnotatedSentence, filtered: set[PatternInstance]) -> int:
    return len({_adjective_site(mt, s.parsed) for mt in _filtered_adjective_matches(s, filtered)})


def creative_candidate(s: AnnotatedSentence, filtered: set[PatternInstance]) -> PatternMatch | None:
    """The bracketed match if ``s`` meets all three harvesting constraints, else None."""
    matches = _filtered_adjective_matches(s, filtered)
    if not matches:
        return None
    if len({_adjective_site(mt, s.parsed) for mt in matches}) != 1:
        return None
    if len(s.delex.mentions) != 1:
        return None
    if not MIN_WORDS <= s.delex.word_count <= MAX_WORDS:
        return None
    return _bracket_choice(matches)


def extract_creative_templates(corpus: Sequence[AnnotatedSentence], filtered: set[PatternInstance],
                               polarity: Polarity,
                               stats: Mapping[PatternInstance, PatternStats]) -> list[CreativeTemplate]:
    out = []
    seen = set()
    for s in corpus:
        mt = creative_candidate(s, filtered)
        if mt is None:
            continue
        text = render_template_text(s, mt.span)
        key = text.lower()
        if key in seen:
            continue
        seen.add(key)
        st = stats[mt.pattern]
        out.append(CreativeTemplate(s.delex.mentions[0].entity_type, polarity, text, mt.pattern,
                                    st.freq_target, st.prob, s.delex.word_count, s.text))
    return out


def strip_markup(text: str) -> str:
    return text.replace("[", "").replace("]", "")


def validate_creative(t: CreativeTemplate, filtered: set[PatternInstance], lexicon: EntityLexicon) -> list[str]:
    """Re-check a stored creative template; returns a list of violations."""
    problems = []
    placeholders = PLACEHOLDER_RE.findall(t.text)
    if len(placeholders) != 1:
        problems.append(f"{len(placeholders)} placeholders")
    elif placeholders[0] != t.entity_type.name:
        problems.append(f"placeholder type {placeholders[0]} != {t.entity_type.name}")
    if not MIN_WORDS <= t.word_count <= MAX_WORDS:
        problems.append(f"word count {t.word_count}")
    if t.source_pattern not in filtered or not is_adjective_pattern(t.source_pattern):
        problems.append(f"source pattern {t.source_pattern} not a filtered adjective pattern")
    # recount from the text itself
    plain = strip_markup(t.text)
    ps = parse(plain)
    recount = sum(1 for tok in ps.tokens if not tok.is_punct)
    if recount != t.word_count:
        problems.append(f"stored word count {t.word_count} but text has {recount}")
    if len(t.text.split("[")) != 2 or len(t.text.split("]")) != 2:
        problems.append("expected exactly one bracketed pattern")
    if t.source_text:
        (src,) = annotate([t.source_text], lexicon)
        if count_adjective_sites(src, filtered) != 1:
            problems.append(f"source has {count_adjective_sites(src, filtered)} adjective pattern sites")
        if len(src.delex.mentions) != 1:
            problems.append(f"source has {len(src.delex.mentions)} entity mentions")
        mt = creative_candidate(src, filtered)
        if mt is None or render_template_text(src, mt.span) != t.text:
            problems.append("source sentence does not re-derive the stored template")
    return problems


# -- store ---------------------------------------------------------------------

STORE_FIELDS = ("family", "polarity", "entity_type", "text", "pattern_kind", "pattern_anchor", "freq", "prob",
                "word_count")


@dataclass
class TemplateStore:
    pairs: list[HyperbolicPair]
    creative: list[CreativeTemplate]

    def pairs_for(self, etype: EntityType, polarity: Polarity) -> list[HyperbolicPair]:
        return [p for p in self.pairs if p.entity_type == etype and p.polarity == polarity]

    def creative_for(self, etype: EntityType, polarity: Polarity) -> list[CreativeTemplate]:
        return [t for t in self.creative if t.entity_type == etype and t.polarity == polarity]

    def resolve(self, item_id: str):
        for item in (*self.pairs, *self.creative):
            if item.id == item_id:
                return item
        if item_id.startswith("basic:"):
            frames = basic_frames()
            k = int(item_id.split(":", 1)[1])
            if 0 <= k < len(frames):
                return frames[k]
        raise KeyError(item_id)

    def records(self) -> list[dict]:
        rows = []
        for p in self.pairs:
            rows.append({"family": "hyperbolic", "polarity": p.polarity.value, "entity_type": p.entity_type.value,
                         "text": p.realization, "pattern_kind": p.pattern.kind.value,
                         "pattern_anchor": p.pattern.anchor_text, "freq": p.freq, "prob": round(p.prob, 6),
                         "word_count": len(p.realization.split())})
        for t in self.creative:
            rows.append({"family": "creative", "polarity": t.polarity.value, "entity_type": t.entity_type.value,
                         "text": t.text, "pattern_kind": t.source_pattern.kind.value,
                         "pattern_anchor": t.source_pattern.anchor_text, "freq": t.freq, "prob": round(t.prob, 6),
                         "word_count": t.word_count, "source_text": t.source_text})
        rows.sort(key=lambda r: (r["polarity"], r["entity_type"], -r["prob"], r["text"], r["family"]))
        return rows

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for r in self.records():
                fh.write(json.dumps(r, ensure_ascii=False, sort_keys=False) + "\n")

    @classmethod
    def load(cls, path) -> "TemplateStore":
        pairs, creative = [], []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            r = json.loads(line)
            pattern = PatternInstance(PatternKind(r["pattern_kind"]), tuple(r["pattern_anchor"].split(" ")))
            etype, pol = EntityType(r["entity_type"]), Polarity(r["polarity"])
            if r["family"] == "hyperbolic":
                pairs.append(HyperbolicPair(etype, pattern, pol, r["text"], r["freq"], r["prob"]))
            elif r["family"] == "creative":
                creative.append(CreativeTemplate(etype, pol, r["text"], pattern, r["freq"], r["prob"],
                                                 r["word_count"], r.get("source_text", "")))
            else:
                raise ValueError(f"unknown template family {r['family']!r}")
        return cls(pairs, creative)
