"""Regenerate selection_cases.json (toy corpora of at most 12 prompts).

Category names are short tokens so the cases read by eye: s* spatial
content, t* temporal content, a* spatial attribute, d* temporal attribute.
"""

import json
import random
from pathlib import Path

POOLS = {"SC": ["s1", "s2", "s3"], "TC": ["t1", "t2"], "SA": ["a1", "a2"], "TA": ["d1", "d2"]}


def make_case(rng, idx):
    n = rng.randint(3, 12)
    shape = rng.choice(["P1", "mixed", "mixed", "P4", "multi-heavy"])
    prompts = []
    for j in range(n):
        labels = {}
        for axis, pool in POOLS.items():
            if axis in ("SA", "TA"):
                present = shape != "P1" and (shape == "P4" or rng.random() < 0.5)
                if not present:
                    labels[axis] = []
                    continue
            k = 2 if (shape == "multi-heavy" and rng.random() < 0.6) else rng.choice([1, 1, 1, 2])
            labels[axis] = sorted(rng.sample(pool, min(k, len(pool))))
        if rng.random() < 0.08:
            labels["SC"] = []  # residual prompt
        prompts.append({"id": f"c{idx:02d}p{j:02d}", "labels": labels})
    rng.shuffle(prompts)
    return {"name": f"case{idx:02d}_{shape}", "prompts": prompts}


def main():
    rng = random.Random(20240611)
    cases = [make_case(rng, i) for i in range(50)]
    out = Path(__file__).with_name("selection_cases.json")
    out.write_text(json.dumps(cases, indent=1) + "\n")


if __name__ == "__main__":
    main()
