"""Command-line entry point: one subcommand per pipeline stage, plus ``run``."""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from . import __version__
from .generator import GenerationError, MRParseError, Variant, generate, generate_triple, parse_mr
from .lexicon import MissingSlotError
from .patterns import ConfigError
from .pipeline import STAGES, StageError, load_config, load_stores, run_all, run_stage, with_polarity
from .templates import Polarity

log = logging.getLogger("reviewgen")

STAGE_HELP = {
    "ingest": "load reviews, split by stars, balance positives, segment sentences",
    "learn": "count pattern instances per class against the neutral class",
    "filter": "keep patterns above the frequency and probability thresholds",
    "harvest": "build hyperbolic pairs and creative templates",
    "generate": "generate review triples, or ad hoc reviews with --mr",
    "evaluate": "export HITs; aggregate judgements if given",
    "analyze": "profile creative reviews against the category dictionary",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key=value config file")
    p.add_argument("--out", help="output directory (file for ad hoc generate)")
    p.add_argument("--seed", type=int, help="generation seed")
    p.add_argument("--min-freq", type=int, dest="min_freq")
    p.add_argument("--min-prob", type=float, dest="min_prob")
    p.add_argument("--tagger", type=Path, help="directory of tagger word lists (closed.tsv, open.tsv, ...)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="reviewgen", description="Harvest review templates and generate reviews.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in (*STAGES, "run"):
        p = sub.add_parser(name, help=STAGE_HELP.get(name, "run every stage in order"))
        _common(p)
        if name == "generate":
            p.add_argument("--mr", help="meaning representation file or inline text")
            p.add_argument("--polarity", choices=[x.value for x in Polarity])
            p.add_argument("--variant", default="triple", choices=[v.value for v in Variant] + ["triple"])
            p.add_argument("--stores", type=Path, help="harvest directory holding templates.jsonl")
        if name in ("evaluate", "run"):
            p.add_argument("--judgements", type=Path, help="judgement CSV to aggregate")
    return ap


_POLARITY_SLOT_RE = re.compile(r",?\s*polarity\[[^\]]*\]")


def _read_mr_arg(arg: str, polarity: str | None) -> list:
    """Parse ``--mr``: a file or inline text, one MR per line or one MR overall."""
    path = Path(arg)
    text = path.read_text(encoding="utf-8") if path.is_file() else arg
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]

    def one(t: str):
        if polarity is not None:
            t = with_polarity(_POLARITY_SLOT_RE.sub("", t), Polarity(polarity))
        return parse_mr(t)

    if len(lines) > 1:
        try:
            return [one(ln) for ln in lines]
        except MRParseError:
            pass
    return [one(text)]


def _templates_path(stores: Path) -> Path:
    for cand in (stores / "templates.jsonl", stores / "harvest" / "templates.jsonl", stores):
        if cand.is_file():
            return cand
    raise StageError(f"no templates.jsonl under {stores}; run `reviewgen harvest` first")


def _adhoc_generate(args, cfg) -> None:
    stores = load_stores(_templates_path(args.stores or cfg.out / "harvest"), cfg.path("adjectives"))
    records = []
    for k, mr in enumerate(_read_mr_arg(args.mr, args.polarity)):
        seed = cfg.seed + k
        if args.variant == "triple":
            records += [r.to_record() for r in generate_triple(mr, stores, seed, cfg.combine_prob).displayed]
        else:
            records.append(generate(Variant(args.variant), mr, stores, seed, cfg.combine_prob).to_record())
    text = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    adhoc = args.command == "generate" and args.mr is not None
    try:
        cfg = load_config(args.config, out=None if adhoc else args.out, seed=args.seed,
                          min_freq=args.min_freq, min_prob=args.min_prob, tagger=args.tagger,
                          judgements=getattr(args, "judgements", None))
        if adhoc:
            _adhoc_generate(args, cfg)
        elif args.command == "run":
            for m in run_all(cfg):
                print(m)
        else:
            print(run_stage(args.command, cfg))
    except ConfigError as exc:
        print(f"reviewgen: config error: {exc}", file=sys.stderr)
        return 2
    except (StageError, MRParseError, GenerationError, MissingSlotError, FileNotFoundError, ValueError) as exc:
        print(f"reviewgen: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
