"""Lexico-syntactic pattern extraction and per-class statistics."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .parsing import BE_FORMS, HAVE_FORMS, NEGATIONS, Chunk, ParsedSentence, Voice


class PatternKind(str, Enum):
    SUBJ_PASSVP = "SUBJ_PASSVP"
    SUBJ_ACTVP = "SUBJ_ACTVP"
    SUBJ_ACTVP_DOBJ = "SUBJ_ACTVP_DOBJ"
    SUBJ_ACTINFVP_DOBJ = "SUBJ_ACTINFVP_DOBJ"
    SUBJ_AUXVP_ADJ = "SUBJ_AUXVP_ADJ"
    ACTVP_PREP_NP = "ACTVP_PREP_NP"
    PASSVP_PREP_NP = "PASSVP_PREP_NP"
    NP_PREP_NP = "NP_PREP_NP"
    ADJ_NOUN = "ADJ_NOUN"
    ADJ_ADJ = "ADJ_ADJ"
    ADV_ADJ = "ADV_ADJ"
    ADV_ADV_ADJ = "ADV_ADV_ADJ"


NGRAM_KINDS = frozenset({PatternKind.ADJ_NOUN, PatternKind.ADJ_ADJ, PatternKind.ADV_ADJ, PatternKind.ADV_ADV_ADJ})
ADJECTIVE_KINDS = frozenset({
    PatternKind.ADJ_ADJ, PatternKind.ADV_ADJ, PatternKind.ADV_ADV_ADJ,
    PatternKind.SUBJ_AUXVP_ADJ, PatternKind.ADJ_NOUN,
})

_NGRAM_SHAPES = {
    PatternKind.ADJ_NOUN: ("ADJ", "NOUN"),
    PatternKind.ADJ_ADJ: ("ADJ", "ADJ"),
    PatternKind.ADV_ADJ: ("ADV", "ADJ"),
    PatternKind.ADV_ADV_ADJ: ("ADV", "ADV", "ADJ"),
}


def slot_for(kind: PatternKind) -> str:
    if kind.name.startswith("SUBJ_"):
        return "SUBJ"
    if kind.name.endswith("_PREP_NP"):
        return "NP"
    return "NONE"


@dataclass(frozen=True, order=True)
class PatternInstance:
    kind: PatternKind
    anchor: tuple[str, ...]

    def __post_init__(self):
        if not self.anchor:
            raise ValueError("pattern anchor must be non-empty")
        for w in self.anchor:
            if not w or w != w.lower() or any(ch.isspace() for ch in w):
                raise ValueError(f"bad anchor word {w!r}")

    @property
    def slot(self) -> str:
        return slot_for(self.kind)

    @property
    def anchor_text(self) -> str:
        return " ".join(self.anchor)

    def __str__(self) -> str:
        return f"{self.kind.value}({self.anchor_text})"


@dataclass(frozen=True)
class PatternMatch:
    """A pattern occurrence with the token positions that produced its anchor."""

    pattern: PatternInstance
    positions: tuple[int, ...]
    vp: int | None = None  # chunk index of the governing VP, for clausal kinds

    @property
    def span(self) -> tuple[int, int]:
        return (min(self.positions), max(self.positions))


@dataclass(frozen=True)
class PatternStats:
    freq_target: int
    freq_other: int

    @property
    def prob(self) -> float:
        total = self.freq_target + self.freq_other
        if total == 0:
            raise ValueError("probability undefined for an unseen pattern")
        return self.freq_target / total

    def __add__(self, other: "PatternStats") -> "PatternStats":
        return PatternStats(self.freq_target + other.freq_target, self.freq_other + other.freq_other)


class ConfigError(ValueError):
    pass


def _word(lower: str) -> str:
    return "not" if lower in NEGATIONS else lower


def _vp_words(sentence: ParsedSentence, vp: Chunk, keep_head_aux: bool = False) -> list[tuple[str, int]]:
    """Anchor material of a VP: adverbs and verbs, auxiliaries dropped.

    With ``keep_head_aux`` the head be/have form stays, normalized to its
    citation form.
    """
    out = []
    for t in sentence.tokens[vp.start:vp.end + 1]:
        if t.pos in ("ADV", "VERB"):
            out.append((_word(t.lower), t.index))
        elif t.pos == "AUX" and keep_head_aux and t.index == vp.head:
            out.append(("be" if t.lower in BE_FORMS else "have", t.index))
    return out


def _np_head(sentence: ParsedSentence, c: Chunk) -> tuple[str, int]:
    return _word(sentence.tokens[c.head].lower), c.head


def _make(kind: PatternKind, parts: list[tuple[str, int]], vp: int | None = None) -> PatternMatch | None:
    if not parts:
        return None
    words = tuple(w for w, _ in parts)
    return PatternMatch(PatternInstance(kind, words), tuple(i for _, i in parts), vp)


def match_patterns(sentence: ParsedSentence) -> list[PatternMatch]:
    """All template matches in ``sentence``, in a fixed order, duplicates kept."""
    toks, chunks = sentence.tokens, sentence.chunks
    found: list[PatternMatch | None] = []

    for ci, vp in enumerate(chunks):
        if vp.kind != "VP":
            continue
        subj = sentence.subject_of.get(ci)
        has_verb = any(t.pos == "VERB" for t in toks[vp.start:vp.end + 1])
        if subj is not None:
            if vp.voice == Voice.PASSIVE:
                found.append(_make(PatternKind.SUBJ_PASSVP, _vp_words(sentence, vp), ci))
            elif vp.voice == Voice.ACTIVE and has_verb:
                words = _vp_words(sentence, vp)
                found.append(_make(PatternKind.SUBJ_ACTVP, words, ci))
                dobj = sentence.dobj_of.get(ci)
                if dobj is not None:
                    found.append(_make(PatternKind.SUBJ_ACTVP_DOBJ, words + [_np_head(sentence, chunks[dobj])], ci))
            elif vp.voice == Voice.AUXILIARY:
                nxt = vp.end + 1
                if nxt < len(toks) and toks[nxt].pos == "ADJ":
                    words = _vp_words(sentence, vp, keep_head_aux=True) + [(_word(toks[nxt].lower), nxt)]
                    found.append(_make(PatternKind.SUBJ_AUXVP_ADJ, words, ci))

    for ci, gov in sentence.infinitive_of.items():
        inf, vp1 = chunks[ci], chunks[gov]
        if sentence.subject_of.get(gov) is None or vp1.voice != Voice.ACTIVE or inf.voice != Voice.ACTIVE:
            continue
        words = _vp_words(sentence, vp1) + _vp_words(sentence, inf)
        if not any(t.pos == "VERB" for t in toks[inf.start:inf.end + 1]):
            continue
        dobj = sentence.dobj_of.get(ci)
        if dobj is not None:
            words.append(_np_head(sentence, chunks[dobj]))
        found.append(_make(PatternKind.SUBJ_ACTINFVP_DOBJ, words, gov))

    for host_i, pp_i in sentence.prep_attach:
        host, pp = chunks[host_i], chunks[pp_i]
        prep = (_word(toks[pp.head].lower), pp.head)
        if host.kind == "NP":
            found.append(_make(PatternKind.NP_PREP_NP, [_np_head(sentence, host), prep]))
        elif host.voice == Voice.ACTIVE and any(t.pos == "VERB" for t in toks[host.start:host.end + 1]):
            found.append(_make(PatternKind.ACTVP_PREP_NP, _vp_words(sentence, host) + [prep], host_i))
        elif host.voice == Voice.PASSIVE:
            found.append(_make(PatternKind.PASSVP_PREP_NP, _vp_words(sentence, host) + [prep], host_i))

    tags = [t.pos for t in toks]
    for kind, shape in _NGRAM_SHAPES.items():
        n = len(shape)
        for i in range(len(toks) - n + 1):
            if tuple(tags[i:i + n]) == shape:
                found.append(_make(kind, [(_word(toks[j].lower), j) for j in range(i, i + n)]))

    return [m for m in found if m is not None]


def extract_patterns(sentence: ParsedSentence) -> list[PatternInstance]:
    return [m.pattern for m in match_patterns(sentence)]


def count_patterns(sentences: Iterable[ParsedSentence]) -> Counter:
    counts: Counter = Counter()
    for s in sentences:
        counts.update(extract_patterns(s))
    return counts


def learn(target: Iterable[ParsedSentence], contrast: Iterable[ParsedSentence]) -> dict[PatternInstance, PatternStats]:
    """Per-pattern occurrence counts in ``target`` vs ``contrast``."""
    t_counts = count_patterns(target)
    c_counts = count_patterns(contrast)
    return {
        p: PatternStats(t_counts.get(p, 0), c_counts.get(p, 0))
        for p in sorted(set(t_counts) | set(c_counts))
    }


def merge_stats(*tables: Mapping[PatternInstance, PatternStats]) -> dict[PatternInstance, PatternStats]:
    out: dict[PatternInstance, PatternStats] = {}
    for table in tables:
        for p, st in table.items():
            out[p] = out[p] + st if p in out else st
    return dict(sorted(out.items()))


def check_thresholds(min_freq, min_prob) -> None:
    if isinstance(min_freq, bool) or not isinstance(min_freq, int) or min_freq < 1:
        raise ConfigError(f"min_freq must be an integer >= 1, got {min_freq!r}")
    if not 0.0 <= float(min_prob) <= 1.0:
        raise ConfigError(f"min_prob must lie in [0, 1], got {min_prob!r}")


def filter_patterns(stats: Mapping[PatternInstance, PatternStats], min_freq: int = 3,
                    min_prob: float = 0.75) -> set[PatternInstance]:
    check_thresholds(min_freq, min_prob)
    return {p for p, st in stats.items() if st.freq_target >= min_freq and st.prob >= min_prob}


def is_adjective_pattern(p: PatternInstance) -> bool:
    return p.kind in ADJECTIVE_KINDS


# -- dump format ---------------------------------------------------------------

DUMP_COLUMNS = ("kind", "anchor", "freq_target", "freq_other", "prob")


def _dump_order(item):
    p, st = item
    return (-st.prob, -st.freq_target, p.anchor_text, p.kind.value)


def write_pattern_dump(stats: Mapping[PatternInstance, PatternStats], path, only: set | None = None) -> None:
    rows = sorted(((p, st) for p, st in stats.items() if only is None or p in only), key=_dump_order)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(DUMP_COLUMNS)
        for p, st in rows:
            w.writerow([p.kind.value, p.anchor_text, st.freq_target, st.freq_other, f"{st.prob:.6f}"])


def read_pattern_dump(path) -> dict[PatternInstance, PatternStats]:
    out = {}
    with open(Path(path), encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh, delimiter="\t"):
            p = PatternInstance(PatternKind(row["kind"]), tuple(row["anchor"].split(" ")))
            out[p] = PatternStats(int(row["freq_target"]), int(row["freq_other"]))
    return out
