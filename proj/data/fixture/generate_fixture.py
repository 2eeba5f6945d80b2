#!/usr/bin/env python3
"""Regenerates the synthetic review fixture shipped with the repository.

Outputs (next to this script):
  reviews.jsonl   ~200 Amazon-style reviews over 12 musical-instrument items
  labeled.jsonl   hand-labeled-style seed sentences for the comparative classifier
  lexicon.tsv     sentiment lexicon (word<TAB>score)

The output is fully determined by SEED.
"""
import json
import pathlib
import random

SEED = 20240611
HERE = pathlib.Path(__file__).resolve().parent

ITEMS = [
    ("B00PIANO01", "piano", ["sound", "keys", "pedal"], "hiss"),
    ("B00GUITAR2", "guitar", ["strings", "neck", "tone"], "buzz"),
    ("B00PHONES3", "headphones", ["bass", "cable", "sound"], "hiss"),
    ("B00TRUMP04", "trumpet", ["valves", "tone", "case"], "dents"),
    ("B00MIC0005", "microphone", ["clarity", "stand", "cable"], "hum"),
    ("B00VIOLN06", "violin", ["bow", "tone", "case"], "rosin"),
    ("B00AMPLI07", "amp", ["volume", "knobs", "tone"], "hum"),
    ("B00UKULE08", "ukulele", ["tuners", "size", "strings"], "buzz"),
    ("B00DRUMP09", "pad", ["rebound", "sticks", "surface"], "noise"),
    ("B00KEYBD10", "keyboard", ["keys", "speakers", "price"], "hiss"),
    ("B00CAPO011", "capo", ["spring", "grip", "price"], "rattle"),
    ("B00STAND12", "stand", ["height", "base", "price"], "wobble"),
]

CODES = ["FX-3200", "NWZ-A855", "XR-50", "PSR-E363", "DT-770", "SM58", "MX-88",
         "KC-110", "TD-1", "ATH-M50"]
BRANDS = ["yamaha", "casio", "sony", "fender", "roland", "korg"]
POS = ["great", "good", "nice", "smooth", "warm", "solid", "excellent", "clear", "rich"]
NEG = ["harsh", "annoying", "weak", "thin", "cheap"]

USERS = [f"A{n:03d}USER" for n in range(1, 41)]


def positive_sentence(rng, item, aspect):
    templates = [
        "I like the {a} of this {i}.",
        "The {a} is {p}.",
        "Love the {a} on this {i}!",
        "The {a} feels {p} and {p2}.",
        "Really {p} {a} for the money.",
        "The {a} is {p}, I love it.",
    ]
    t = rng.choice(templates)
    p, p2 = rng.sample(POS, 2)
    return t.format(a=aspect, i=item, p=p, p2=p2)


def negative_sentence(rng, item, flaw):
    templates = [
        "There is some {f} and it is {n}.",
        "The {f} is {n}.",
        "I hate the {f} on this {i}.",
    ]
    return rng.choice(templates).format(f=flaw, i=item, n=rng.choice(NEG))


def comparative_sentence(rng, item, aspect):
    code = rng.choice(CODES)
    brand = rng.choice(BRANDS)
    templates = [
        "The {a} is much better than my old {b} {c}.",
        "This {i} has better {a} than the {c}.",
        "The {a} is {p}er than on my {b}.",
        "I prefer this {i} over my {c} because the {a} is {p}.",
        "The {a} beats the {b} {c} by far.",
        "Compared to my {b}, the {a} is so much {p2}.",
        "The {a} is better than any other {i} I have tried.",
        "This one has a {p2} {a} and is better than the {c}.",
    ]
    t = rng.choice(templates)
    adjective = rng.choice(["warm", "smooth", "rich", "clear"])
    if t.startswith("The {a} is {p}er"):
        adjective = rng.choice(["warm", "smooth", "rich", "clear"])
    return t.format(a=aspect, i=item, c=code, b=brand, p=adjective,
                    p2=rng.choice(["nicer", "clearer", "smoother", "warmer"]))


def decoy_sentence(rng, item):
    code = rng.choice(CODES)
    templates = [
        "It works with my {c} without any trouble.",
        "I plugged it into a {c} and it was fine.",
        "I will buy a better case for it later.",
        "It came with a {c} adapter.",
        "I use it instead of my phone speaker at home.",
    ]
    return rng.choice(templates).format(c=code, i=item)


def filler_sentence(rng, item):
    templates = [
        "Shipping was fast.",
        "It arrived on time and well packed.",
        "My son plays it every day.",
        "I bought this {i} as a gift.",
        "Setup took a few minutes.",
        "The box was a bit damaged.",
    ]
    return rng.choice(templates).format(i=item)


def make_review(rng, item_name, aspects, flaw):
    sentences = []
    favorite = rng.choice(aspects)
    sentences.append(positive_sentence(rng, item_name, favorite))
    if rng.random() < 0.8:
        sentences.append(comparative_sentence(rng, item_name, rng.choice(aspects)))
    if rng.random() < 0.5:
        sentences.append(positive_sentence(rng, item_name, rng.choice(aspects)))
    if rng.random() < 0.35:
        sentences.append(negative_sentence(rng, item_name, flaw))
    if rng.random() < 0.3:
        sentences.append(decoy_sentence(rng, item_name))
    if rng.random() < 0.5:
        sentences.append(filler_sentence(rng, item_name))
    rng.shuffle(sentences)
    return " ".join(sentences)


def write_reviews(rng):
    lines = []
    n = 0
    for asin, name, aspects, flaw in ITEMS:
        for _ in range(17):
            n += 1
            lines.append(json.dumps({
                "reviewerID": rng.choice(USERS),
                "asin": asin,
                "overall": float(rng.choice([3, 4, 4, 5, 5, 5])),
                "reviewText": make_review(rng, name, aspects, flaw),
            }))
    rng.shuffle(lines)
    (HERE / "reviews.jsonl").write_text("\n".join(lines) + "\n")
    return n


def write_labeled(rng):
    rows = []
    for _ in range(160):
        _, name, aspects, _ = rng.choice(ITEMS)
        rows.append({"text": comparative_sentence(rng, name, rng.choice(aspects)),
                     "label": "comparative"})
    for _ in range(160):
        _, name, aspects, flaw = rng.choice(ITEMS)
        kind = rng.random()
        if kind < 0.45:
            text = decoy_sentence(rng, name)
        elif kind < 0.75:
            text = positive_sentence(rng, name, rng.choice(aspects))
        elif kind < 0.9:
            text = negative_sentence(rng, name, flaw)
        else:
            text = filler_sentence(rng, name)
        rows.append({"text": text, "label": "non_comparative"})
    rng.shuffle(rows)
    (HERE / "labeled.jsonl").write_text("".join(json.dumps(r) + "\n" for r in rows))


def write_lexicon():
    entries = {w: 1.0 for w in ["good", "great", "like", "love", "best", "excellent",
                                "amazing", "perfect", "recommend"]}
    entries.update({w: 0.5 for w in ["nice", "smooth", "warm", "solid", "clear", "rich",
                                     "fine", "easy", "sturdy", "comfortable"]})
    entries.update({w: -1.0 for w in ["bad", "poor", "hate", "worst", "terrible"]})
    entries.update({w: -0.5 for w in ["harsh", "annoying", "weak", "thin", "cheap",
                                      "damaged"]})
    text = "# word<TAB>score in [-1, 1]\n" + "".join(
        f"{w}\t{s:+.1f}\n" for w, s in sorted(entries.items()))
    (HERE / "lexicon.tsv").write_text(text)


def main():
    rng = random.Random(SEED)
    write_reviews(rng)
    write_labeled(rng)
    write_lexicon()


if __name__ == "__main__":
    main()
