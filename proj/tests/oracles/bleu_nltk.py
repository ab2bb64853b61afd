"""Freezes nltk's corpus BLEU on 20 random toy corpora into
tests/data/bleu_nltk.json for the acceptance checks.

Hypotheses keep at least 4 tokens: nltk counts a sentence with no n-grams of
some order as one n-gram in the denominator, standard corpus BLEU does not.

Run: python3 tests/oracles/bleu_nltk.py
"""
import json
import pathlib
import random

from nltk.translate.bleu_score import corpus_bleu

VOCAB = ["the", "a", "cat", "dog", "sat", "ran", "on", "mat", "home", "fast"]


def toy_corpora(n=20, seed=7):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        refs, hyps = [], []
        for _ in range(rng.randint(2, 6)):
            ref = [rng.choice(VOCAB) for _ in range(rng.randint(4, 12))]
            hyp = list(ref)
            for i in range(len(hyp)):
                if rng.random() < 0.2:
                    hyp[i] = rng.choice(VOCAB)
            if rng.random() < 0.3:
                hyp = hyp[: max(4, len(hyp) - rng.randint(1, 3))]
            refs.append(ref)
            hyps.append(hyp)
        out.append((hyps, refs))
    return out


def main():
    cases = []
    for hyps, refs in toy_corpora():
        bleu = 100.0 * corpus_bleu([[r] for r in refs], hyps)
        cases.append({"hypotheses": [" ".join(h) for h in hyps],
                      "references": [" ".join(r) for r in refs],
                      "bleu": round(bleu, 6)})
    path = pathlib.Path(__file__).resolve().parent.parent / "data" / "bleu_nltk.json"
    path.write_text(json.dumps(cases, indent=1) + "\n")
    print(f"wrote {len(cases)} corpora to {path}")


if __name__ == "__main__":
    main()
