"""Regenerate the bundled synthetic mini-corpus (src/reviewgen/data/minicorpus.jsonl).

Reviews are assembled from per-class sentence banks with rotating entity
fillers.  Output is a pure function of SEED.
"""

import argparse
import json
import random
from pathlib import Path

SEED = 20170

FILLERS = {
    "R": ["restaurant", "cafe", "bar", "diner", "bistro", "pub", "pizzeria", "steakhouse"],
    "C": ["Thai", "Mexican", "Italian", "Japanese", "Chinese", "Indian", "French", "Greek", "Korean", "Vietnamese"],
    "F": ["udon", "burrito", "pizza", "ramen", "lasagna", "burger", "pad thai", "sushi", "tacos", "dumplings",
          "fried rice", "steak", "salmon", "pho", "curry"],
    "S": ["service", "customer service"],
    "T": ["waiter", "waitress", "server", "bartender", "hostess", "manager", "staff"],
}

BANKS = {
    "positive": {
        "R": ["This {R} is absolutely amazing!",
              "Hands down the best {R} in town.",
              "We found this {R} last year and it is truly wonderful.",
              "I just love this {R} so much."],
        "C": ["They make incredibly authentic {C} dishes here.",
              "This is seriously the finest {C} cooking around.",
              "We always come here for the {C} and never regret it."],
        "F": ["The {F} was so delicious.",
              "Their {F} is always very fresh.",
              "The {F} tasted absolutely heavenly.",
              "I had the most amazing {F} of my life.",
              "The {F} is not cheap, but well worth it."],
        "S": ["The {S} was incredibly fast.",
              "The {S} here is always excellent.",
              "We got very attentive {S} all night."],
        "T": ["Our {T} was extremely friendly.",
              "The {T} is always so welcoming.",
              "The {T} was very knowledgeable about the menu."],
        "X": ["I will definitely be back!",
              "Absolutely my favorite spot.",
              "We left very happy!"],
    },
    "negative": {
        "R": ["This {R} is absolutely filthy.",
              "Worst {R} I have ever been to.",
              "I will never come back to this {R}.",
              "Sadly the {R} was completely empty on a Friday."],
        "C": ["This was truly awful {C} cooking.",
              "They serve really bland {C} dishes.",
              "Do not waste your money on the {C} here."],
        "F": ["The {F} was completely inedible.",
              "My {F} smelled very bad and tasted worse.",
              "The {F} looked really gross.",
              "I got food poisoning from the {F}.",
              "The {F} was so salty."],
        "S": ["The {S} was painfully slow.",
              "The {S} here is absolutely horrible.",
              "We got extremely poor {S} tonight."],
        "T": ["Our {T} was incredibly rude.",
              "The {T} was so rude to us.",
              "The {T} seemed totally clueless."],
        "X": ["I was so angry that I left.",
              "We were furious and annoyed.",
              "I hate this place and I am angry about it.",
              "Honestly, I was so upset."],
    },
    "neutral": {
        "R": ["The {R} is okay for a quick bite.",
              "This {R} is pretty average.",
              "The {R} was fine.",
              "The {R} has a nice patio."],
        "C": ["The {C} dishes were decent.",
              "They serve typical {C} cooking.",
              "The {C} was fine but nothing special."],
        "F": ["The {F} was good.",
              "The {F} was decent but a little cold.",
              "My {F} was okay.",
              "The {F} tasted fine.",
              "The {F} was delicious but small."],
        "S": ["The {S} was fine.",
              "The {S} was a bit slow.",
              "The {S} was good."],
        "T": ["Our {T} was nice.",
              "The {T} was friendly enough.",
              "The {T} seemed busy."],
        "X": ["It is an okay place.",
              "Parking was easy.",
              "We might come back."],
    },
}
BANKS["four"] = {k: BANKS["positive"][k][:2] + BANKS["neutral"][k][:1] for k in BANKS["positive"]}

PLAN = [(1, "negative", 26), (2, "negative", 24), (3, "neutral", 50), (4, "four", 25), (5, "positive", 75)]


class Rotor:
    """Cycle through a bank so every entry is used evenly."""

    def __init__(self, items, rng):
        self.items, self.rng, self.queue = list(items), rng, []

    def next(self):
        if not self.queue:
            self.queue = self.items[:]
            self.rng.shuffle(self.queue)
        return self.queue.pop()


def build(seed=SEED):
    rng = random.Random(seed)
    fill = {k: Rotor(v, rng) for k, v in FILLERS.items()}
    rotors = {cls: {k: Rotor(v, rng) for k, v in bank.items()} for cls, bank in BANKS.items()}
    records = []
    n = 0
    for stars, cls, count in PLAN:
        groups = Rotor(["R", "C", "F", "S", "T", "X"], rng)
        for _ in range(count):
            picked = []
            while len(picked) < 3:
                g = groups.next()
                if g not in picked:
                    picked.append(g)
            sentences = [rotors[cls][g].next().format(**{k: f.next() for k, f in fill.items()}) for g in picked]
            n += 1
            text = " ".join(s[0].upper() + s[1:] for s in sentences)
            records.append({"review_id": f"r{n:04d}", "business_id": f"b{rng.randrange(40):03d}", "stars": stars,
                            "text": text})
    rng.shuffle(records)
    return records


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parent.parent / "src" / "reviewgen" / "data" / "minicorpus.jsonl")
    ap.add_argument("--seed", type=int, default=SEED)
    args = ap.parse_args()
    with open(args.out, "w", encoding="utf-8") as fh:
        for r in build(args.seed):
            fh.write(json.dumps(r) + "\n")


if __name__ == "__main__":
    main()
