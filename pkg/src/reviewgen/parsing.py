"""Rule-based shallow parser: sentence splitting, tagging, chunking, relations.

Everything here is deterministic and driven by small bundled word lists, so a
given sentence always parses the same way.  The parse is deliberately flat:
NP, VP and PP chunks plus a handful of nearest-chunk relations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path

TAGSET = frozenset(
    {"NOUN", "VERB", "AUX", "ADJ", "ADV", "DET", "PREP", "PRON", "NUM", "PUNCT", "OTHER"}
)

BE_FORMS = frozenset({"be", "am", "is", "are", "was", "were", "been", "being", "'s", "’s", "'re", "’re", "'m", "’m"})
HAVE_FORMS = frozenset({"have", "has", "had", "having", "'ve", "’ve"})
NEGATIONS = frozenset({"n't", "n’t", "not"})

ABBREVIATIONS = frozenset(
    {"mr.", "mrs.", "ms.", "dr.", "st.", "jr.", "sr.", "etc.", "vs.", "e.g.", "i.e.", "approx.", "ave.", "apt."}
)

TOKEN_RE = re.compile(
    r"<[A-Z]+_ENTITY>"  # delexicalization placeholder
    r"|\d+(?:[.,:]\d+)*"
    r"|\w+(?:[-'’]\w+)*"
    r"|[^\w\s]",
)
CLITIC_RE = re.compile(r"^(.+?)(n[’']t|[’'](?:s|re|m|ve|ll|d))$", re.IGNORECASE)
PLACEHOLDER_RE = re.compile(r"^<[A-Z]+_ENTITY>$")
_SENT_END_RE = re.compile(r"[.!?]+")

# a clitic 's after these words is the verb "is", otherwise a possessive
_S_AS_IS = frozenset({"it", "that", "there", "here", "what", "he", "she", "who", "where", "everything", "nothing", "this"})


class Voice(str, Enum):
    ACTIVE = "ACTIVE"
    PASSIVE = "PASSIVE"
    AUXILIARY = "AUXILIARY"
    NONE = "NONE"


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    pos: str
    index: int
    start: int = 0
    ws: str = ""  # whitespace that followed the token in the source

    @property
    def is_punct(self) -> bool:
        return self.pos == "PUNCT"


@dataclass(frozen=True)
class Chunk:
    kind: str  # NP, VP or PP
    start: int
    end: int  # inclusive
    head: int
    voice: Voice = Voice.NONE

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def __contains__(self, index: int) -> bool:
        return self.start <= index <= self.end


@dataclass
class ParsedSentence:
    text: str
    tokens: list[Token]
    chunks: list[Chunk]
    subject_of: dict[int, int] = field(default_factory=dict)
    dobj_of: dict[int, int] = field(default_factory=dict)
    prep_attach: list[tuple[int, int]] = field(default_factory=list)
    infinitive_of: dict[int, int] = field(default_factory=dict)

    def chunk_at(self, token_index: int) -> int | None:
        for i, c in enumerate(self.chunks):
            if token_index in c:
                return i
        return None


@dataclass(frozen=True)
class TaggerLexicon:
    closed: dict[str, str]
    open: dict[str, str]
    participles: frozenset[str]
    noun_readings: frozenset[str]

    @cached_property
    def verb_stems(self) -> frozenset[str]:
        return frozenset(w for w, t in self.open.items() if t == "VERB")


def read_tag_file(path) -> dict[str, str]:
    """Read a ``word<TAB>tag`` file; ``#`` starts a comment."""
    table: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or parts[1].strip() not in TAGSET:
            raise ValueError(f"{path}:{lineno}: expected word<TAB>tag, got {line!r}")
        table.setdefault(parts[0].strip().lower(), parts[1].strip())
    return table


def _read_word_list(path) -> frozenset[str]:
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def load_tagger_lexicon(directory=None) -> TaggerLexicon:
    """Load tagger word lists from ``directory`` (the bundled set by default)."""
    if directory is None:
        return default_tagger_lexicon()
    d = Path(directory)
    return TaggerLexicon(
        closed=read_tag_file(d / "closed.tsv"),
        open=read_tag_file(d / "open.tsv"),
        participles=_read_word_list(d / "participles.txt"),
        noun_readings=_read_word_list(d / "noun_readings.txt"),
    )


@lru_cache(maxsize=1)
def default_tagger_lexicon() -> TaggerLexicon:
    with resources.as_file(resources.files("reviewgen") / "data" / "tagger") as d:
        return load_tagger_lexicon(d)


_active: TaggerLexicon | None = None


def set_tagger_lexicon(lexicon: TaggerLexicon | None) -> TaggerLexicon | None:
    """Make ``lexicon`` the process-wide default (None restores the bundled one); returns the previous."""
    global _active
    prev, _active = _active, lexicon
    return prev


def active_tagger_lexicon() -> TaggerLexicon:
    return _active or default_tagger_lexicon()


# -- sentences ---------------------------------------------------------------

def segment_sentences(text: str) -> list[str]:
    sentences = []
    start = 0
    for m in _SENT_END_RE.finditer(text):
        end = m.end()
        rest = text[end:]
        if rest.strip():
            if not rest[:1].isspace():
                continue
            nxt = rest.lstrip()[:1]
            if not (nxt.isupper() or nxt.isdigit()):
                continue
            if m.group() == ".":
                word = text[start:m.start()].split()[-1:] or [""]
                if (word[0] + ".").lower() in ABBREVIATIONS:
                    continue
        piece = text[start:end].strip()
        if piece:
            sentences.append(piece)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


# -- tokens ------------------------------------------------------------------

def _split_surface(text: str) -> list[tuple[str, int]]:
    pieces = []
    for m in TOKEN_RE.finditer(text):
        word, pos = m.group(), m.start()
        cm = CLITIC_RE.match(word)
        if cm and not word[0].isdigit():
            head, clitic = cm.group(1), cm.group(2)
            pieces.append((head, pos))
            pieces.append((clitic, pos + len(head)))
        else:
            pieces.append((word, pos))
    return pieces


def _suffix_tag(lower: str, lex: TaggerLexicon) -> str | None:
    if lower.isdigit() or re.fullmatch(r"\d+(?:[.,:]\d+)*", lower):
        return "NUM"
    if lower.endswith("ly") and len(lower) > 3:
        return "ADV"
    stems = lex.verb_stems
    if lower.endswith("ed") and len(lower) > 4:
        base = lower[:-2]
        if base in stems or base + "e" in stems or (len(base) > 2 and base[-1] == base[-2] and base[:-1] in stems) \
                or (base.endswith("i") and base[:-1] + "y" in stems):
            return "VERB"
    if lower.endswith("ing") and len(lower) > 5:
        base = lower[:-3]
        if base in stems or base + "e" in stems or (len(base) > 2 and base[-1] == base[-2] and base[:-1] in stems):
            return "VERB"
    if lower.endswith(("ous", "ful", "able", "ible", "ive")) and len(lower) > 4:
        return "ADJ"
    return None


def _base_tag(surface: str, lower: str, lex: TaggerLexicon) -> str:
    if PLACEHOLDER_RE.match(surface):
        return "NOUN"
    if not any(ch.isalnum() for ch in lower):
        return "PUNCT"
    if lower in lex.closed:
        return lex.closed[lower]
    if lower in lex.open:
        return lex.open[lower]
    if lower in lex.participles:
        return "VERB"
    return _suffix_tag(lower, lex) or "NOUN"


def tokenize(sentence: str) -> list[tuple[str, int, str]]:
    """Split into (surface, start offset, trailing whitespace) triples."""
    pieces = _split_surface(sentence)
    out = []
    for i, (surface, start) in enumerate(pieces):
        end = start + len(surface)
        nxt = pieces[i + 1][1] if i + 1 < len(pieces) else len(sentence)
        out.append((surface, start, sentence[end:nxt]))
    return out


def tokenize_and_tag(sentence: str, lexicon: TaggerLexicon | None = None) -> list[Token]:
    lex = lexicon or active_tagger_lexicon()
    raw = tokenize(sentence)
    lowers = [s.lower() for s, _, _ in raw]
    tags = [_base_tag(s, lw, lex) for (s, _, _), lw in zip(raw, lowers)]

    for i, lw in enumerate(lowers):
        if lw in ("'s", "’s"):
            prev = lowers[i - 1] if i else ""
            tags[i] = "AUX" if prev in _S_AS_IS else "OTHER"
    for i, lw in enumerate(lowers):
        if lw == "to":
            j = i + 1
            while j < len(tags) and tags[j] == "ADV":
                j += 1
            if j < len(tags) and tags[j] in ("VERB", "AUX") and lowers[j] not in ("to",):
                tags[i] = "AUX"
    # main-verb "have": no verb or auxiliary follows it
    for i, lw in enumerate(lowers):
        if tags[i] == "AUX" and lw in HAVE_FORMS and lw not in ("'d", "’d"):
            j = i + 1
            while j < len(tags) and tags[j] == "ADV":
                j += 1
            if j >= len(tags) or tags[j] not in ("VERB", "AUX"):
                tags[i] = "VERB"
    for i, lw in enumerate(lowers):
        if i and tags[i] == "VERB" and lw in lex.noun_readings and tags[i - 1] in ("DET", "ADJ", "NUM"):
            tags[i] = "NOUN"

    return [
        Token(surface=s, lower=lw, pos=t, index=i, start=start, ws=ws)
        for i, ((s, start, ws), lw, t) in enumerate(zip(raw, lowers, tags))
    ]


def detokenize(tokens: list[Token]) -> str:
    return "".join(t.surface + t.ws for t in tokens).rstrip() if tokens else ""


# -- chunks ------------------------------------------------------------------

def _match_np(tags: list[str], i: int) -> int:
    """Return the length of an NP starting at ``i`` (0 if none)."""
    n = len(tags)
    if i < n and tags[i] == "PRON":
        return 1
    j = i
    if j < n and tags[j] == "DET":
        j += 1
    while j < n and tags[j] in ("ADJ", "ADV", "NUM"):
        j += 1
    k = j
    while k < n and tags[k] == "NOUN":
        k += 1
    if k == j:
        return 0
    return k - i


def _match_vp_verbal(tags: list[str], i: int) -> int:
    n = len(tags)
    j = i
    while j < n and tags[j] in ("AUX", "ADV"):
        j += 1
    k = j
    while k < n and tags[k] == "VERB":
        k += 1
    if k == j:
        return 0
    return k - i


def _match_vp_aux(tags: list[str], i: int) -> int:
    n = len(tags)
    if i >= n or tags[i] != "AUX":
        return 0
    j = i + 1
    while j < n and tags[j] in ("AUX", "ADV"):
        j += 1
    return j - i


def _vp_voice(tokens: list[Token], start: int, end: int, lex: TaggerLexicon) -> tuple[int, Voice]:
    verbs = [t for t in tokens[start:end + 1] if t.pos == "VERB"]
    if not verbs:
        auxes = [t for t in tokens[start:end + 1] if t.pos == "AUX"]
        bh = [t for t in auxes if t.lower in BE_FORMS or t.lower in HAVE_FORMS]
        if bh:
            return bh[-1].index, Voice.AUXILIARY
        return auxes[-1].index, Voice.ACTIVE
    head = verbs[-1]
    participle = head.lower.endswith("ed") or head.lower in lex.participles
    if participle:
        for t in reversed(tokens[start:head.index]):
            if t.pos == "AUX":
                if t.lower in BE_FORMS:
                    return head.index, Voice.PASSIVE
                break
    return head.index, Voice.ACTIVE


def chunk(tokens: list[Token], lexicon: TaggerLexicon | None = None) -> list[Chunk]:
    lex = lexicon or active_tagger_lexicon()
    tags = [t.pos for t in tokens]
    chunks: list[Chunk] = []
    i = 0
    while i < len(tokens):
        np_len = _match_np(tags, i)
        vp_len = max(_match_vp_verbal(tags, i), _match_vp_aux(tags, i))
        pp_len = 0
        if tags[i] == "PREP":
            inner = _match_np(tags, i + 1)
            if inner:
                pp_len = 1 + inner
        best = max(np_len, vp_len, pp_len)
        if best == 0:
            i += 1
            continue
        end = i + best - 1
        if best == np_len:
            head = max(k for k in range(i, end + 1) if tags[k] in ("NOUN", "PRON"))
            chunks.append(Chunk("NP", i, end, head))
        elif best == vp_len:
            head, voice = _vp_voice(tokens, i, end, lex)
            chunks.append(Chunk("VP", i, end, head, voice))
        else:
            chunks.append(Chunk("PP", i, end, i))
        i = end + 1
    return chunks


# -- relations ---------------------------------------------------------------

_DOBJ_BLOCKERS = frozenset({"PREP", "PUNCT", "OTHER", "VERB", "AUX"})


def find_relations(tokens: list[Token], chunks: list[Chunk], text: str | None = None) -> ParsedSentence:
    ps = ParsedSentence(text=text if text is not None else detokenize(tokens), tokens=tokens, chunks=chunks)
    for ci, c in enumerate(chunks):
        if c.kind != "VP":
            continue
        for pj in range(ci - 1, -1, -1):
            if chunks[pj].kind == "VP":
                break
            if chunks[pj].kind == "NP":
                ps.subject_of[ci] = pj
                break
        if c.voice == Voice.ACTIVE and ci + 1 < len(chunks) and chunks[ci + 1].kind == "NP":
            nxt = chunks[ci + 1]
            between = tokens[c.end + 1:nxt.start]
            if not any(t.pos in _DOBJ_BLOCKERS for t in between):
                ps.dobj_of[ci] = ci + 1

    for ci, c in enumerate(chunks):
        if c.kind != "PP" or ci == 0:
            continue
        prev = chunks[ci - 1]
        if prev.kind in ("VP", "NP") and not any(t.is_punct for t in tokens[prev.end + 1:c.start]):
            ps.prep_attach.append((ci - 1, ci))

    for ci, c in enumerate(chunks):
        if c.kind != "VP":
            continue
        for pj in range(ci - 1, -1, -1):
            prev = chunks[pj]
            if prev.kind == "NP":
                break
            if prev.kind == "VP":
                if tokens[c.start].lower == "to" or c.start == prev.end + 1:
                    ps.infinitive_of[ci] = pj
                break
    return ps


def parse(sentence: str, lexicon: TaggerLexicon | None = None) -> ParsedSentence:
    tokens = tokenize_and_tag(sentence, lexicon)
    return find_relations(tokens, chunk(tokens, lexicon), sentence)
