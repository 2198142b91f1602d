#!/usr/bin/env python3
"""Generates the bundled toy corpus: 4 emotions x 50 messages with disjoint
signal vocabularies, shared noise words and a controlled amount of
cross-emotion confusion. Deterministic; regenerates data/toy_corpus.jsonl
byte-identically."""

import json
import random

SIGNAL = {
    "joy": ["happy", "cheer", "delight", "smile", "bliss", "sunny"],
    "anger": ["rage", "fury", "mad", "irate", "hostile", "bitter"],
    "fear": ["dread", "panic", "terror", "afraid", "phobia", "alarm"],
    "sadness": ["gloom", "sorrow", "weep", "mourn", "tear", "dismal"],
}
NOISE = ["thing", "stuff", "day", "time", "people", "world", "friend", "word"]

MESSAGES_PER_EMOTION = 50
CONFUSION_RATE = 0.30
NOISY_RATE = 0.20


def main():
    rng = random.Random(20240817)
    emotions = sorted(SIGNAL)
    lines = []
    counter = 0
    for emotion in emotions:
        words = SIGNAL[emotion]
        others = [w for e in emotions if e != emotion for w in SIGNAL[e]]
        for _ in range(MESSAGES_PER_EMOTION):
            counter += 1
            if rng.random() < NOISY_RATE:
                toks = rng.sample(words, 1) + rng.sample(NOISE, 3)
            else:
                toks = rng.sample(words, rng.randint(2, 4))
                toks += rng.sample(NOISE, rng.randint(1, 2))
            if rng.random() < CONFUSION_RATE:
                toks.append(rng.choice(others))
            rng.shuffle(toks)
            lines.append(json.dumps({
                "text": " ".join(toks),
                "label": emotion,
                "id": f"toy-{counter:04d}",
            }, sort_keys=True))
    with open("data/toy_corpus.jsonl", "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} instances")


if __name__ == "__main__":
    main()
