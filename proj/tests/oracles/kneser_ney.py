"""Reference interpolated Kneser-Ney written directly from the recursive
definition, used to generate the frozen expectations in tests/unit/test_lm.cpp.

Run: python3 tests/oracles/kneser_ney.py
"""
from collections import Counter, defaultdict
from fractions import Fraction
import itertools

BOS, EOS, UNK = "<s>", "</s>", "<unk>"


def train(sentences, order):
    raw = [Counter() for _ in range(order + 1)]
    for s in sentences:
        padded = [BOS] + s + [EOS]
        for n in range(1, order + 1):
            for i in range(len(padded) - n + 1):
                raw[n][tuple(padded[i:i + n])] += 1

    adj = [None] * (order + 1)
    adj[order] = Counter(raw[order])
    for n in range(order - 1, 0, -1):
        left = defaultdict(set)
        for g in raw[n + 1]:
            left[g[1:]].add(g[0])
        adj[n] = Counter()
        for g, c in raw[n].items():
            if g[0] == BOS:
                if n > 1:
                    adj[n][g] = c
            elif left[g]:
                adj[n][g] = len(left[g])

    disc = {}
    for n in range(1, order + 1):
        n1 = sum(1 for c in adj[n].values() if c == 1)
        n2 = sum(1 for c in adj[n].values() if c == 2)
        disc[n] = Fraction(n1, n1 + 2 * n2) if n1 and n2 else Fraction(3, 4)

    vocab = {UNK, EOS} | {w for s in sentences for w in s}
    return adj, disc, vocab


def prob(model, history, w):
    adj, disc, vocab = model
    order = max(i for i in range(len(adj)) if adj[i] is not None)
    history = tuple(history[-(order - 1):]) if order > 1 else ()

    def p(n, h):
        if n == 1:
            total = sum(adj[1].values())
            types = len(adj[1])
            d = disc[1]
            return max(Fraction(adj[1].get((w,), 0)) - d, 0) / total + d * types / total / len(vocab)
        ctx = {g: c for g, c in adj[n].items() if g[:-1] == h}
        lower = p(n - 1, h[1:])
        if not ctx:
            return lower
        total = sum(ctx.values())
        d = disc[n]
        c = ctx.get(h + (w,), 0)
        return max(Fraction(c) - d, 0) / total + d * len(ctx) / total * lower

    return p(len(history) + 1, history)


def main():
    hand = [["a", "b"], ["b", "a", "b"]]
    m = train(hand, 2)
    print("hand bigram discounts", {k: float(v) for k, v in m[1].items()})
    for h, w in [((), "a"), ((), "b"), ((), EOS), ((), UNK), (("<s>",), "a"), (("a",), "b"), (("a",), "a"),
                 (("b",), EOS), (("b",), "a"), (("b",), UNK)]:
        print("p2", h, w, f"{float(prob(m, h, w)):.9f}")

    tri = [["a", "b", "c"], ["b", "c", "a", "b"], ["c", "a", "b", "c"], ["a", "a", "b"]]
    m3 = train(tri, 3)
    print("tri discounts", {k: float(v) for k, v in m3[1].items()})
    words = ["a", "b", "c", EOS, UNK]
    for h in [("<s>",), ("<s>", "a"), ("a", "b"), ("b", "c"), ("c", "a"), ("a", "a"), ("b", "a"), ("c", "c")]:
        row = [float(prob(m3, h, w)) for w in words]
        print("p3", h, " ".join(f"{x:.9f}" for x in row), "sum", f"{sum(row):.12f}")


if __name__ == "__main__":
    main()
