"""File-based pipeline stages with manifests and a per-directory lock."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import os
import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterator

from filelock import FileLock, Timeout

from . import __version__
from .analysis.categories import compare_classes, load_category_lexicon, profile
from .analysis.crowd import CRITERIA, GRAMMAR_CRITERIA, agreement, distribution, export_hits, import_judgements
from .corpus import balance_positive, load_reviews, split_by_stars
from .generator import Stores, generate_triple, load_adjectives, parse_mr, triple_from_record
from .lexicon import EntityType, default_lexicon, lexicon_paths, load_lexicon
from .parsing import load_tagger_lexicon, parse, segment_sentences, set_tagger_lexicon
from .patterns import ConfigError, check_thresholds, learn, read_pattern_dump, write_pattern_dump
from .templates import Polarity, TemplateStore, annotate, extract_creative_templates, extract_hyperbolic_pairs

log = logging.getLogger(__name__)

STAGES = ("ingest", "learn", "filter", "harvest", "generate", "evaluate", "analyze")
LOCK_NAME = ".reviewgen.lock"
MANIFEST = "manifest.json"
CLASSES = ("positive", "neutral", "negative")


class StageError(RuntimeError):
    pass


def bundled(name: str) -> Path:
    return Path(str(resources.files("reviewgen") / "data" / name))


@dataclass
class PipelineConfig:
    reviews: Path | None = None
    lexicons: Path | None = None
    tagger: Path | None = None
    dictionary: Path | None = None
    adjectives: Path | None = None
    mrs: Path | None = None
    judgements: Path | None = None
    out: Path = Path("out")
    min_freq: int = 3
    min_prob: float = 0.75
    seed: int = 2017
    balance_seed: int = 13
    triples_per_polarity: int = 100
    combine_prob: float = 0.5
    alpha: float = 0.05
    correction: str = "none"
    criteria: tuple[str, ...] = CRITERIA

    def path(self, name: str) -> Path:
        """A configured input path, or the bundled default."""
        value = getattr(self, name)
        if value is not None:
            return Path(value)
        defaults = {"reviews": "minicorpus.jsonl", "lexicons": "entities", "tagger": "tagger", "dictionary": "categories.dic",
                    "adjectives": "adjectives.tsv", "mrs": "mrs.txt"}
        return bundled(defaults[name])

    def label(self, name: str) -> str:
        value = getattr(self, name)
        return str(value) if value is not None else f"bundled:{self.path(name).name}"

    def validate(self) -> None:
        check_thresholds(self.min_freq, self.min_prob)
        if self.triples_per_polarity < 1:
            raise ConfigError("triples_per_polarity must be >= 1")
        if not 0.0 <= self.combine_prob <= 1.0:
            raise ConfigError("combine_prob must lie in [0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.correction not in ("none", "bonferroni"):
            raise ConfigError("correction must be 'none' or 'bonferroni'")
        allowed = set(CRITERIA) | set(GRAMMAR_CRITERIA)
        if not self.criteria or not set(self.criteria) <= allowed:
            raise ConfigError(f"criteria must be drawn from {sorted(allowed)}")
        for name in ("reviews", "lexicons", "tagger", "dictionary", "adjectives", "mrs", "judgements"):
            if getattr(self, name) is not None and not Path(getattr(self, name)).exists():
                raise ConfigError(f"{name} path does not exist: {getattr(self, name)}")


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(PipelineConfig)}


def _coerce(name: str, raw: str, base: Path | None):
    kind = _FIELD_TYPES[name].type
    raw = raw.strip()
    try:
        if name in ("min_freq", "seed", "balance_seed", "triples_per_polarity"):
            return int(raw)
        if name in ("min_prob", "combine_prob", "alpha"):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r} as a number") from None
    if name == "criteria":
        return tuple(c.strip().lower() for c in raw.split(",") if c.strip())
    if name == "correction":
        return raw.lower()
    if "Path" in str(kind):
        p = Path(raw).expanduser()
        return p if p.is_absolute() or base is None else base / p
    return raw


def load_config(path=None, **overrides) -> PipelineConfig:
    """Read ``key = value`` lines; ``overrides`` with a non-None value win."""
    values: dict = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, raw = (x.strip() for x in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _coerce(key, raw, path.parent)
    for key, value in overrides.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        if value is not None:
            values[key] = Path(value) if "Path" in str(_FIELD_TYPES[key].type) else value
    cfg = PipelineConfig(**values)
    cfg.validate()
    return cfg


# -- file helpers ----------------------------------------------------------------

def sha256(path: Path) -> str:
    h = hashlib.sha256()
    p = Path(path)
    files = sorted(q for q in p.rglob("*") if q.is_file()) if p.is_dir() else [p]
    for q in files:
        if p.is_dir():
            h.update(str(q.relative_to(p)).encode("utf-8") + b"\0")
        h.update(q.read_bytes())
    return h.hexdigest()


def _atomic_write(path: Path, write: Callable) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        write(fh)
    os.replace(tmp, path)


def _write_jsonl(path: Path, rows) -> None:
    _atomic_write(path, lambda fh: fh.writelines(json.dumps(r, ensure_ascii=False) + "\n" for r in rows))


def _read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]


def _write_tsv(path: Path, header, rows) -> None:
    def write(fh):
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    _atomic_write(path, write)


# -- stage context -----------------------------------------------------------------

@dataclass
class StageContext:
    name: str
    cfg: PipelineConfig
    inputs: dict[str, Path] = field(default_factory=dict)
    outputs: dict[str, Path] = field(default_factory=dict)
    settings: dict = field(default_factory=dict)

    @property
    def dir(self) -> Path:
        return self.cfg.out / self.name

    def need(self, stage: str, filename: str) -> Path:
        path = self.cfg.out / stage / filename
        if not (self.cfg.out / stage / MANIFEST).is_file() or not path.exists():
            raise StageError(f"stage {self.name!r} needs {stage}/{filename}; run `reviewgen {stage}` first")
        self.inputs[f"{stage}/{filename}"] = path
        return path

    def external(self, name: str) -> Path:
        path = self.cfg.path(name)
        if not path.exists():
            raise StageError(f"{name} input not found: {path}")
        self.inputs[self.cfg.label(name)] = path
        return path

    def output(self, filename: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        path = self.dir / filename
        self.outputs[filename] = path
        return path

    def write_manifest(self) -> Path:
        manifest = {
            "stage": self.name,
            "tool_version": __version__,
            "config": self.settings,
            "inputs": {k: sha256(p) for k, p in sorted(self.inputs.items())},
            "outputs": {k: sha256(p) for k, p in sorted(self.outputs.items())},
        }
        path = self.dir / MANIFEST
        _atomic_write(path, lambda fh: fh.write(json.dumps(manifest, indent=1, sort_keys=True) + "\n"))
        return path


def _lexicon(ctx: StageContext):
    if ctx.cfg.lexicons is None:
        ctx.inputs[ctx.cfg.label("lexicons")] = ctx.cfg.path("lexicons")
        return default_lexicon()
    return load_lexicon(lexicon_paths(ctx.external("lexicons")))


@contextmanager
def _tagger(ctx: StageContext) -> Iterator[None]:
    """Parse with the configured tagger word lists for the duration of a stage."""
    if ctx.cfg.tagger is None:
        ctx.inputs[ctx.cfg.label("tagger")] = ctx.cfg.path("tagger")
        yield
        return
    prev = set_tagger_lexicon(load_tagger_lexicon(ctx.external("tagger")))
    try:
        yield
    finally:
        set_tagger_lexicon(prev)


def _sentences_by_class(path: Path) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {c: [] for c in CLASSES}
    for r in _read_jsonl(path):
        out[r["class"]].append(r["text"])
    return out


# -- stages ------------------------------------------------------------------------

def stage_ingest(ctx: StageContext) -> None:
    batch = load_reviews(ctx.external("reviews"))
    split = split_by_stars(batch.reviews)
    try:
        balanced = balance_positive(split, ctx.cfg.balance_seed)
    except ValueError as exc:
        raise StageError(str(exc)) from None
    ctx.settings = {"balance_seed": ctx.cfg.balance_seed}
    rows = []
    for cls in CLASSES:
        for r in getattr(balanced, cls):
            for k, s in enumerate(segment_sentences(r.text)):
                rows.append({"class": cls, "review_id": r.id, "index": k, "text": s})
    _write_jsonl(ctx.output("sentences.jsonl"), rows)
    summary = {
        "records": len(batch) + batch.skipped,
        "skipped": batch.skipped,
        "four_star_dropped": sum(1 for r in batch if r.stars == 4),
        "before_balance": split.sizes(),
        "reviews": balanced.sizes(),
        "sentences": {c: sum(1 for r in rows if r["class"] == c) for c in CLASSES},
    }
    _atomic_write(ctx.output("split.json"), lambda fh: fh.write(json.dumps(summary, indent=1, sort_keys=True) + "\n"))


def stage_learn(ctx: StageContext) -> None:
    sents = _sentences_by_class(ctx.need("ingest", "sentences.jsonl"))
    with _tagger(ctx):
        parsed = {c: [parse(s) for s in v] for c, v in sents.items()}
    for pol in ("positive", "negative"):
        stats = learn(parsed[pol], parsed["neutral"])
        write_pattern_dump(stats, ctx.output(f"{pol}_patterns.tsv"))


def stage_filter(ctx: StageContext) -> None:
    from .patterns import filter_patterns
    ctx.settings = {"min_freq": ctx.cfg.min_freq, "min_prob": ctx.cfg.min_prob}
    for pol in ("positive", "negative"):
        stats = read_pattern_dump(ctx.need("learn", f"{pol}_patterns.tsv"))
        kept = filter_patterns(stats, ctx.cfg.min_freq, ctx.cfg.min_prob)
        write_pattern_dump(stats, ctx.output(f"{pol}_filtered.tsv"), only=kept)


def stage_harvest(ctx: StageContext) -> None:
    sents = _sentences_by_class(ctx.need("ingest", "sentences.jsonl"))
    lexicon = _lexicon(ctx)
    pairs, creative = [], []
    with _tagger(ctx):
        for pol in (Polarity.POSITIVE, Polarity.NEGATIVE):
            stats = read_pattern_dump(ctx.need("filter", f"{pol.value}_filtered.tsv"))
            filtered = set(stats)
            corpus = annotate(sents[pol.value], lexicon)
            pairs += extract_hyperbolic_pairs(corpus, filtered, pol, stats)
            creative += extract_creative_templates(corpus, filtered, pol, stats)
    # a template text harvested under both polarities belongs to neither
    by_text: dict[str, set] = {}
    for t in creative:
        by_text.setdefault(t.text.lower(), set()).add(t.polarity)
    clash = {k for k, v in by_text.items() if len(v) > 1}
    if clash:
        log.warning("dropping %d creative template(s) harvested under both polarities", len(clash))
    creative = [t for t in creative if t.text.lower() not in clash]
    store = TemplateStore(pairs, creative)
    store.save(ctx.output("templates.jsonl"))
    rows = []
    for pol in Polarity:
        for t in EntityType:
            rows.append([pol.value, t.value, len(store.pairs_for(t, pol)), len(store.creative_for(t, pol))])
    _write_tsv(ctx.output("summary.tsv"), ("polarity", "entity_type", "hyperbolic_pairs", "creative_templates"), rows)


def read_mrs(path: Path) -> list[str]:
    return [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()
            if ln.strip() and not ln.lstrip().startswith("#")]


def with_polarity(mr_text: str, polarity: Polarity) -> str:
    base = mr_text.rstrip().rstrip(",")
    return f"{base}, polarity[{polarity.value}]"


def load_stores(templates_path: Path, adjectives_path: Path | None = None) -> Stores:
    return Stores(TemplateStore.load(templates_path), load_adjectives(adjectives_path))


def stage_generate(ctx: StageContext) -> None:
    cfg = ctx.cfg
    ctx.settings = {"seed": cfg.seed, "triples_per_polarity": cfg.triples_per_polarity,
                    "combine_prob": cfg.combine_prob}
    stores = load_stores(ctx.need("harvest", "templates.jsonl"), ctx.external("adjectives"))
    mrs = read_mrs(ctx.external("mrs"))
    if not mrs:
        raise StageError("no meaning representations to generate from")
    rng = random.Random(cfg.seed)
    rows = []
    for pol in (Polarity.POSITIVE, Polarity.NEGATIVE):
        for i in range(cfg.triples_per_polarity):
            mr = parse_mr(with_polarity(mrs[i % len(mrs)], pol))
            triple = generate_triple(mr, stores, rng.getrandbits(32), cfg.combine_prob)
            rows.append(triple.to_record(f"{pol.value[:3]}{i:03d}"))
    _write_jsonl(ctx.output("triples.jsonl"), rows)


def stage_evaluate(ctx: StageContext) -> None:
    cfg = ctx.cfg
    triples = dict(triple_from_record(r) for r in _read_jsonl(ctx.need("generate", "triples.jsonl")))
    hits = ctx.output("hits.csv")
    labels = ctx.output("hits.labels.json")
    export_hits(triples, hits, labels)
    ctx.settings = {"criteria": list(cfg.criteria)}
    if cfg.judgements is None:
        return
    result = import_judgements(ctx.external("judgements"), labels, cfg.criteria)
    _write_tsv(ctx.output("completeness.tsv"), ("triple_id", "variant", "criterion", "judgements"),
               [[i.triple_id, i.variant.value, i.criterion, i.count] for i in result.incomplete])
    if not result.batch:
        raise StageError("no complete judgement items to aggregate")
    _write_tsv(ctx.output("agreement.tsv"), ("measure", "value"), [
        ["per_judgement", f"{agreement(result.batch):.6f}"],
        ["per_item", f"{agreement(result.batch, per_item=True):.6f}"],
    ])
    rows = [[v.value, c, *(f"{x:.2f}" for x in shares)] for (v, c), shares in distribution(result.batch).items()]
    _write_tsv(ctx.output("distribution.tsv"), ("variant", "criterion", "high", "med", "low", "no_consensus"), rows)


def stage_analyze(ctx: StageContext) -> None:
    cfg = ctx.cfg
    ctx.settings = {"alpha": cfg.alpha, "correction": cfg.correction}
    lexicon = load_category_lexicon(ctx.external("dictionary"))
    by_class: dict[str, list] = {"positive": [], "negative": []}
    for rec in _read_jsonl(ctx.need("generate", "triples.jsonl")):
        text = next(r["text"] for r in rec["reviews"] if r["variant"] == "creative")
        by_class[rec["polarity"]].append(profile(text, lexicon, rec["triple_id"]))
    names = lexicon.names
    rows = [[p.review_id, pol, p.total_tokens, *(f"{p.percentages[n]:.4f}" for n in names)]
            for pol, profs in by_class.items() for p in profs]
    _write_tsv(ctx.output("profiles.tsv"), ("review_id", "polarity", "total_tokens", *names), rows)
    diffs = compare_classes(by_class["positive"], by_class["negative"], cfg.alpha,
                            None if cfg.correction == "none" else cfg.correction)
    _write_tsv(ctx.output("significant.tsv"),
               ("category", "direction", "p_value", "t_statistic", "mean_positive", "mean_negative"),
               [[d.category, d.direction.value, f"{d.p_value:.6e}", f"{d.t_statistic:.6f}",
                 f"{d.mean_positive:.4f}", f"{d.mean_negative:.4f}"] for d in diffs])


STAGE_FUNCS: dict[str, Callable[[StageContext], None]] = {
    "ingest": stage_ingest, "learn": stage_learn, "filter": stage_filter, "harvest": stage_harvest,
    "generate": stage_generate, "evaluate": stage_evaluate, "analyze": stage_analyze,
}


@contextmanager
def locked(out: Path) -> Iterator[None]:
    out.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(out / LOCK_NAME), timeout=0)
    try:
        lock.acquire()
    except Timeout:
        raise StageError(f"{out} is locked by another run ({LOCK_NAME})") from None
    try:
        yield
    finally:
        lock.release()


def _run(name: str, cfg: PipelineConfig) -> Path:
    if name not in STAGE_FUNCS:
        raise StageError(f"unknown stage {name!r}")
    ctx = StageContext(name, cfg)
    STAGE_FUNCS[name](ctx)
    return ctx.write_manifest()


def run_stage(name: str, cfg: PipelineConfig) -> Path:
    """Run one stage; returns the path of its manifest."""
    with locked(cfg.out):
        return _run(name, cfg)


def run_all(cfg: PipelineConfig) -> list[Path]:
    with locked(cfg.out):
        return [_run(name, cfg) for name in STAGES]
