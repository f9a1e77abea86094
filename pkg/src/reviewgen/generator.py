"""Meaning representations and basic / hyperbolic / creative review generation."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .lexicon import ENTITY_ORDER, EntityType, relexicalize
from .templates import (
    Arity,
    BasicFrame,
    CreativeTemplate,
    Polarity,
    TemplateStore,
    basic_frames,
    frame_id,
)

MR_KEYS = tuple(t.value for t in ENTITY_ORDER) + ("polarity",)
COMBINABLE = ((EntityType.RESTAURANT, EntityType.CUISINE), (EntityType.SERVICE, EntityType.STAFF))

_ALTERNATION_RE = re.compile(r"\b(\w+)\|(\w+)\b")
_SPACE_BEFORE_PUNCT_RE = re.compile(r"\s+([.,!?])")
_MARKUP_RE = re.compile(r"\[([^\]]*)\]")


class Variant(str, Enum):
    BASIC = "basic"
    HYPERBOLIC = "hyperbolic"
    CREATIVE = "creative"


class MRParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (at offset {position})")
        self.position = position


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class MeaningRepresentation:
    slots: Mapping[EntityType, str]
    polarity: Polarity

    def __post_init__(self):
        for t in EntityType:
            if not self.slots.get(t, "").strip():
                raise ValueError(f"MR slot {t.value} must be a non-empty string")

    def to_text(self) -> str:
        parts = [f"{t.value}[{self.slots[t]}]" for t in ENTITY_ORDER]
        return ", ".join(parts + [f"polarity[{self.polarity.value}]"])

    def with_polarity(self, polarity: Polarity) -> "MeaningRepresentation":
        return MeaningRepresentation(dict(self.slots), polarity)


def parse_mr(text: str) -> MeaningRepresentation:
    """Parse ``key[value]`` pairs separated by commas or newlines."""
    found: dict[str, str] = {}
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace() or text[i] == ",":
            i += 1
            continue
        start = i
        while i < n and (text[i].isalpha() or text[i] == "_"):
            i += 1
        key = text[start:i].lower()
        if not key:
            raise MRParseError(f"expected a slot name, found {text[i]!r}", i)
        while i < n and text[i] in " \t":
            i += 1
        if i >= n or text[i] != "[":
            raise MRParseError(f"expected '[' after {key!r}", i)
        close = text.find("]", i + 1)
        if close < 0:
            raise MRParseError(f"unclosed bracket for {key!r}", n)
        value = text[i + 1:close]
        if "[" in value:
            raise MRParseError(f"unclosed bracket for {key!r}", i + 1 + value.index("["))
        if key not in MR_KEYS:
            raise MRParseError(f"unknown slot {key!r}", start)
        if key in found:
            raise MRParseError(f"duplicate slot {key!r}", start)
        found[key] = value.strip()
        i = close + 1
        if i < n and not (text[i].isspace() or text[i] == ","):
            raise MRParseError("expected ',' or newline between slots", i)
    missing = [k for k in MR_KEYS if k not in found]
    if missing:
        raise MRParseError(f"missing slots: {', '.join(missing)}")
    try:
        polarity = Polarity(found["polarity"].lower())
    except ValueError:
        raise MRParseError(f"polarity must be positive or negative, got {found['polarity']!r}") from None
    empty = [k for k in MR_KEYS if not found[k]]
    if empty:
        raise MRParseError(f"empty slots: {', '.join(empty)}")
    return MeaningRepresentation({t: found[t.value] for t in EntityType}, polarity)


@dataclass(frozen=True)
class GeneratedReview:
    variant: Variant
    text: str
    provenance: tuple[dict, ...]
    seed: int
    mr: MeaningRepresentation

    def to_record(self) -> dict:
        return {"variant": self.variant.value, "text": self.text, "seed": self.seed,
                "provenance": [dict(p) for p in self.provenance]}


@dataclass(frozen=True)
class Triple:
    basic: GeneratedReview
    hyperbolic: GeneratedReview
    creative: GeneratedReview
    order: tuple[Variant, Variant, Variant]  # display order
    seed: int
    mr: MeaningRepresentation

    def __iter__(self):
        return iter((self.basic, self.hyperbolic, self.creative))

    def by_variant(self, variant: Variant) -> GeneratedReview:
        return {Variant.BASIC: self.basic, Variant.HYPERBOLIC: self.hyperbolic, Variant.CREATIVE: self.creative}[variant]

    @property
    def displayed(self) -> list[GeneratedReview]:
        return [self.by_variant(v) for v in self.order]

    def to_record(self, triple_id: str) -> dict:
        return {"triple_id": triple_id, "polarity": self.mr.polarity.value, "mr": self.mr.to_text(),
                "seed": self.seed, "order": [v.value for v in self.order],
                "reviews": [r.to_record() for r in self]}


def triple_from_record(record: Mapping) -> tuple[str, Triple]:
    mr = parse_mr(record["mr"])
    reviews = {}
    for r in record["reviews"]:
        v = Variant(r["variant"])
        reviews[v] = GeneratedReview(v, r["text"], tuple(r["provenance"]), r["seed"], mr)
    triple = Triple(reviews[Variant.BASIC], reviews[Variant.HYPERBOLIC], reviews[Variant.CREATIVE],
                    tuple(Variant(v) for v in record["order"]), record["seed"], mr)
    return record["triple_id"], triple


# -- adjective lists -----------------------------------------------------------

AdjectiveLists = Mapping[tuple[Polarity, EntityType], Sequence[str]]


def load_adjectives(path=None) -> dict[tuple[Polarity, EntityType], list[str]]:
    """Read ``polarity<TAB>entity_type<TAB>adjective`` lines."""
    if path is None:
        text = (resources.files("reviewgen") / "data" / "adjectives.tsv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    out: dict[tuple[Polarity, EntityType], list[str]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"adjectives line {lineno}: expected 3 tab-separated fields")
        key = (Polarity(parts[0].strip()), EntityType(parts[1].strip()))
        out.setdefault(key, []).append(parts[2].strip())
    return out


# -- surface helpers -------------------------------------------------------------

def capitalize_first(text: str) -> str:
    for i, ch in enumerate(text):
        if ch.isalpha():
            return text[:i] + ch.upper() + text[i + 1:]
    return text


def tidy(text: str) -> str:
    text = _SPACE_BEFORE_PUNCT_RE.sub(r"\1", text)
    return capitalize_first(" ".join(text.split()))


def _unmark(m: re.Match) -> str:
    words = m.group(1).split(" ")
    return " ".join(w if w == "I" or w.startswith("<") else w.lower() for w in words)


def realize_creative(text: str, value: str, etype: EntityType) -> str:
    plain = _MARKUP_RE.sub(_unmark, text)
    return tidy(relexicalize(plain, {etype: value}))


def render_frame(frame: BasicFrame, mr: MeaningRepresentation, rng: random.Random,
                 choose_adj: Callable[[EntityType], tuple[str, dict]]) -> tuple[str, list[dict]]:
    text = _ALTERNATION_RE.sub(lambda m: rng.choice((m.group(1), m.group(2))), frame.text)
    fillers = []
    for etype in frame.slot_types:
        adj, info = choose_adj(etype)
        fillers.append(info)
        text = text.replace("[adj]", adj, 1)
        slot = "(entity)" if frame.arity == Arity.SINGLE else f"({etype.value})"
        text = text.replace(slot, mr.slots[etype], 1)
    return tidy(text), fillers


# -- generators ------------------------------------------------------------------

def _plan(rng: random.Random, combine_prob: float) -> list[tuple[EntityType, ...]]:
    plan = []
    i = 0
    while i < len(ENTITY_ORDER):
        t = ENTITY_ORDER[i]
        nxt = ENTITY_ORDER[i + 1] if i + 1 < len(ENTITY_ORDER) else None
        if nxt is not None and (t, nxt) in COMBINABLE and rng.random() < combine_prob:
            plan.append((t, nxt))
            i += 2
        else:
            plan.append((t,))
            i += 1
    return plan


def _frames_for(frames: Sequence[BasicFrame], types: tuple[EntityType, ...]) -> list[tuple[int, BasicFrame]]:
    out = []
    for k, f in enumerate(frames):
        if len(types) == 1 and f.arity == Arity.SINGLE and f.entity_type == types[0]:
            out.append((k, f))
        elif len(types) == 2 and f.arity == Arity.COMBINED and set(f.combined_types) == set(types):
            out.append((k, f))
    return out


def _frame_review(variant: Variant, mr: MeaningRepresentation, frames: Sequence[BasicFrame], seed: int,
                  combine_prob: float, make_chooser) -> GeneratedReview:
    rng = random.Random(seed)
    choose_adj = make_chooser(rng)
    sentences, provenance = [], []
    for types in _plan(rng, combine_prob):
        candidates = _frames_for(frames, types)
        if not candidates:
            raise GenerationError(f"no basic frame for {'+'.join(t.value for t in types)}")
        k, frame = rng.choice(candidates)
        text, fillers = render_frame(frame, mr, rng, choose_adj)
        sentences.append(text)
        provenance.append({"id": frame_id(k), "entity_types": [t.value for t in frame.slot_types],
                           "fillers": fillers})
    return GeneratedReview(variant, " ".join(sentences), tuple(provenance), seed, mr)


def generate_basic(mr: MeaningRepresentation, frames: Sequence[BasicFrame], adjective_lists: AdjectiveLists,
                   seed: int, combine_prob: float = 0.5) -> GeneratedReview:
    for t in EntityType:
        if not adjective_lists.get((mr.polarity, t)):
            raise GenerationError(f"empty adjective list for {mr.polarity.value} {t.value}")

    def make_chooser(rng):
        def choose(etype):
            adj = rng.choice(list(adjective_lists[(mr.polarity, etype)]))
            return adj, {"adjective": adj, "polarity": mr.polarity.value}
        return choose

    return _frame_review(Variant.BASIC, mr, frames, seed, combine_prob, make_chooser)


def generate_hyperbolic(mr: MeaningRepresentation, frames: Sequence[BasicFrame], store: TemplateStore,
                        seed: int, combine_prob: float = 0.5) -> GeneratedReview:
    pools = {t: store.pairs_for(t, mr.polarity) for t in EntityType}
    for t in ENTITY_ORDER:
        if not pools[t]:
            raise GenerationError(f"no {mr.polarity.value} hyperbolic pairs for {t.value}")

    def make_chooser(rng):
        def choose(etype):
            pair = rng.choice(pools[etype])
            return pair.realization, {"id": pair.id, "pattern_kind": pair.pattern.kind.value,
                                      "pattern_anchor": pair.pattern.anchor_text, "polarity": pair.polarity.value}
        return choose

    return _frame_review(Variant.HYPERBOLIC, mr, frames, seed, combine_prob, make_chooser)


def generate_creative(mr: MeaningRepresentation, store: TemplateStore, seed: int) -> GeneratedReview:
    rng = random.Random(seed)
    sentences, provenance = [], []
    for t in ENTITY_ORDER:
        pool: list[CreativeTemplate] = store.creative_for(t, mr.polarity)
        if not pool:
            raise GenerationError(f"no {mr.polarity.value} creative templates for {t.value}")
        tpl = rng.choice(pool)
        sentences.append(realize_creative(tpl.text, mr.slots[t], t))
        provenance.append({"id": tpl.id, "entity_types": [t.value], "pattern_kind": tpl.source_pattern.kind.value,
                           "pattern_anchor": tpl.source_pattern.anchor_text, "polarity": tpl.polarity.value})
    return GeneratedReview(Variant.CREATIVE, " ".join(sentences), tuple(provenance), seed, mr)


@dataclass
class Stores:
    templates: TemplateStore
    adjectives: AdjectiveLists
    frames: list[BasicFrame] = field(default_factory=basic_frames)


def generate_triple(mr: MeaningRepresentation, stores: Stores, seed: int, combine_prob: float = 0.5) -> Triple:
    rng = random.Random(seed)
    s_basic, s_hyper, s_creative = (rng.getrandbits(32) for _ in range(3))
    order = list(Variant)
    rng.shuffle(order)
    return Triple(
        basic=generate_basic(mr, stores.frames, stores.adjectives, s_basic, combine_prob),
        hyperbolic=generate_hyperbolic(mr, stores.frames, stores.templates, s_hyper, combine_prob),
        creative=generate_creative(mr, stores.templates, s_creative),
        order=tuple(order),
        seed=seed,
        mr=mr,
    )


def generate(variant: Variant, mr: MeaningRepresentation, stores: Stores, seed: int,
             combine_prob: float = 0.5) -> GeneratedReview:
    if variant == Variant.BASIC:
        return generate_basic(mr, stores.frames, stores.adjectives, seed, combine_prob)
    if variant == Variant.HYPERBOLIC:
        return generate_hyperbolic(mr, stores.frames, stores.templates, seed, combine_prob)
    return generate_creative(mr, stores.templates, seed)
