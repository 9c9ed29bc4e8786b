"""Shared test utilities: independent oracles and random fixtures.

The oracles here deliberately re-derive expected values by a different
route than the library (plain prefix-DP distances, dense matrix math,
scalar loops, finite differences) so tests never compare the code with
itself.
"""

from __future__ import annotations

import functools
import itertools
import math
import random

import numpy as np

from gecsyntax import tree as T
from gecsyntax.edits import (
    Edit, EditScript, MISS, RED, SUB, align, apply_edits, make_script, miss, red, sub,
)
from gecsyntax.graph import SyntaxGraph

# --- Levenshtein oracles ------------------------------------------------

def levenshtein_scalar(a, b) -> int:
    """Textbook prefix-DP minimum edit distance (unit costs)."""
    n, m = len(a), len(b)
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        for j in range(1, m + 1):
            cur[j] = min(prev[j] + 1,
                         cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] != b[j - 1]))
        prev = cur
    return prev[m]


@functools.lru_cache(maxsize=None)
def all_sequences(alphabet=("a", "b", "c"), max_len=6) -> tuple[tuple[str, ...], ...]:
    seqs = []
    for length in range(max_len + 1):
        seqs.extend(itertools.product(alphabet, repeat=length))
    return tuple(seqs)


def all_pairs_levenshtein(seqs) -> np.ndarray:
    """Distance matrix for every sequence pair, via one vectorized DP."""
    n_seq = len(seqs)
    max_len = max((len(s) for s in seqs), default=0)
    symbols = {tok: i for i, tok in enumerate(sorted({t for s in seqs for t in s}))}
    arr = np.full((n_seq, max_len), -1, dtype=np.int16)
    for i, s in enumerate(seqs):
        arr[i, :len(s)] = [symbols[t] for t in s]
    lens = np.array([len(s) for s in seqs])

    dp = np.zeros((n_seq, n_seq, max_len + 1, max_len + 1), dtype=np.uint8)
    ramp = np.arange(max_len + 1, dtype=np.uint8)
    dp[:, :, :, 0] = ramp[None, None, :]
    dp[:, :, 0, :] = ramp[None, None, :]
    for i in range(1, max_len + 1):
        ai = arr[:, None, i - 1]
        for j in range(1, max_len + 1):
            neq = (ai != arr[None, :, j - 1]).astype(np.uint8)
            dp[:, :, i, j] = np.minimum(
                np.minimum(dp[:, :, i - 1, j], dp[:, :, i, j - 1]) + 1,
                dp[:, :, i - 1, j - 1] + neq,
            )
    rows = np.arange(n_seq)
    return dp[rows[:, None], rows[None, :], lens[:, None], lens[None, :]]


def our_cost_row(src) -> bytes:
    """align() script costs of one source against every enumerated target."""
    return bytes(align(list(src), list(t)).cost for t in all_sequences())


def enumerate_scripts(src, tgt, max_cost) -> list[EditScript]:
    """Every valid edit script of cost <= max_cost mapping src to tgt.

    Brute force over all per-position SUB/RED choices and all MISS
    insertions built from target tokens; used to confirm unique minima on
    tiny examples.
    """
    tgt_vocab = sorted(set(tgt))
    n = len(src)
    position_choices = []
    for i in range(n):
        options = [None, red(i, src[i])]
        options += [sub(i, src[i], w) for w in tgt_vocab if w != src[i]]
        position_choices.append(options)

    def miss_options(point, budget):
        yield None
        for length in range(1, budget + 1):
            for combo in itertools.product(tgt_vocab, repeat=length):
                yield miss(point, combo)

    results = []

    def expand(point, edits, cost):
        if point > n:
            if cost <= max_cost and apply_edits(src, make_script(edits)) == list(tgt):
                results.append(make_script(edits))
            return
        for m in miss_options(point, max_cost - cost):
            extra = 0 if m is None else m.cost
            if cost + extra > max_cost:
                continue
            step = edits + ([m] if m is not None else [])
            if point == n:
                expand(point + 1, step, cost + extra)
                continue
            for choice in position_choices[point]:
                c2 = cost + extra + (0 if choice is None else choice.cost)
                if c2 > max_cost:
                    continue
                expand(point + 1, step + ([choice] if choice is not None else []),
                       c2)

    expand(0, [], 0)
    return results


# --- random fixtures ----------------------------------------------------

PHRASE_LABELS = ("S", "NP", "VP", "PP", "ADJP", "ADVP", "SBAR")
POS_LABELS = ("DT", "NN", "VB", "JJ", "RB", "IN", "PRP")


def random_tokens(rng: random.Random, n: int, vocab) -> list[str]:
    return [rng.choice(vocab) for _ in range(n)]


def random_tree(tokens, rng: random.Random, unary_prob=0.15) -> T.NonTerminal:
    """A random phrase-structure tree with preterminals over the tokens."""

    def build(lo, hi):
        if hi - lo == 1:
            node = T.NonTerminal(rng.choice(POS_LABELS), [T.Terminal(tokens[lo])])
            while rng.random() < unary_prob:
                node = T.NonTerminal(rng.choice(PHRASE_LABELS), [node])
            return node
        parts = rng.randint(2, min(4, hi - lo))
        cuts = sorted(rng.sample(range(lo + 1, hi), parts - 1))
        bounds = [lo, *cuts, hi]
        children = [build(bounds[i], bounds[i + 1]) for i in range(parts)]
        node = T.NonTerminal(rng.choice(PHRASE_LABELS), children)
        if rng.random() < unary_prob:
            node = T.NonTerminal(rng.choice(PHRASE_LABELS), [node])
        return node

    root = build(0, len(tokens))
    T.renumber(root)
    return root


def random_script(src, rng: random.Random, vocab,
                  sub_prob=0.15, red_prob=0.15, miss_prob=0.12,
                  force_empty_prob=0.0) -> EditScript:
    """A random valid edit script over the source tokens."""
    if rng.random() < force_empty_prob:
        return EditScript()
    n = len(src)
    edits: list[Edit] = []
    ops = []
    for i in range(n):
        r = rng.random()
        if r < sub_prob:
            ops.append(SUB)
        elif r < sub_prob + red_prob:
            ops.append(RED)
        else:
            ops.append(None)
    if all(op == RED for op in ops):
        ops[rng.randrange(n)] = None
    for i, op in enumerate(ops):
        if op == SUB:
            w = rng.choice(vocab)
            while w == src[i]:
                w = rng.choice(vocab)
            edits.append(sub(i, src[i], w))
        elif op == RED:
            edits.append(red(i, src[i]))
    for point in range(n + 1):
        if rng.random() < miss_prob:
            k = rng.randint(1, 2)
            edits.append(miss(point, [rng.choice(vocab) for _ in range(k)]))
    return make_script(edits)


def random_pair(rng: random.Random, vocab, max_len=12):
    src = random_tokens(rng, rng.randint(1, max_len), vocab)
    script = random_script(src, rng, vocab)
    return src, apply_edits(src, script)


# --- numeric oracles ----------------------------------------------------

def gcn_dense_oracle(graph: SyntaxGraph, H, W, b, self_loops=False) -> np.ndarray:
    """ReLU(A @ H @ W^T + b) with an explicit dense adjacency matrix."""
    n = graph.num_nodes
    A = np.zeros((n, n))
    for v, neigh in enumerate(graph.adjacency):
        for u in neigh:
            A[v, u] = 1.0
    if self_loops:
        A = A + np.eye(n)
    return np.maximum(A @ np.asarray(H) @ np.asarray(W).T + np.asarray(b), 0.0)


def attention_scalar_oracle(Q, M, Wq, Wk, Wv) -> np.ndarray:
    """Scaled dot-product attention recomputed with explicit scalar loops."""
    m, d = Q.shape
    k = M.shape[0]
    q_proj = [[sum(Q[r][a] * Wq[a][c] for a in range(d)) for c in range(d)]
              for r in range(m)]
    k_proj = [[sum(M[s][a] * Wk[a][c] for a in range(d)) for c in range(d)]
              for s in range(k)]
    v_proj = [[sum(M[s][a] * Wv[a][c] for a in range(d)) for c in range(d)]
              for s in range(k)]
    out = np.zeros((m, d))
    for r in range(m):
        scores = [sum(q_proj[r][c] * k_proj[s][c] for c in range(d)) / math.sqrt(d)
                  for s in range(k)]
        peak = max(scores)
        exps = [math.exp(x - peak) for x in scores]
        total = sum(exps)
        weights = [e / total for e in exps]
        for c in range(d):
            out[r][c] = sum(weights[s] * v_proj[s][c] for s in range(k))
    return out


def numeric_grad(f, arr, h=1e-5) -> np.ndarray:
    """Central finite differences of scalar f() w.r.t. every entry of arr."""
    grad = np.zeros_like(arr, dtype=float)
    flat = arr.reshape(-1)
    gflat = grad.reshape(-1)
    for idx in range(flat.size):
        old = flat[idx]
        flat[idx] = old + h
        up = f()
        flat[idx] = old - h
        down = f()
        flat[idx] = old
        gflat[idx] = (up - down) / (2 * h)
    return grad


def max_rel_err(analytic, numeric, floor=1e-6) -> float:
    a = np.asarray(analytic, dtype=float).reshape(-1)
    n = np.asarray(numeric, dtype=float).reshape(-1)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    return float(np.max(np.abs(a - n) / denom)) if a.size else 0.0


# --- ensemble corpus ----------------------------------------------------

SRC_VOCAB = [f"w{i}" for i in range(30)]
EDIT_VOCAB = [f"e{i}" for i in range(12)]
NOISE_VOCAB = [f"z{i}" for i in range(12)]


def _spaced_positions(rng: random.Random, n, count, taken, lo=0, hi=None):
    """Up to `count` positions in [lo, hi) at distance >= 2 from `taken`."""
    hi = n if hi is None else hi
    chosen = []
    candidates = list(range(lo, hi))
    rng.shuffle(candidates)
    for p in candidates:
        if len(chosen) >= count:
            break
        if all(abs(p - q) >= 2 for q in taken + chosen):
            chosen.append(p)
    return chosen


def _planted_edits(rng: random.Random, src, positions, vocab):
    edits = []
    for p in positions:
        kind = rng.random()
        if kind < 0.45:
            w = rng.choice(vocab)
            while w == src[p]:
                w = rng.choice(vocab)
            edits.append(sub(p, src[p], w))
        elif kind < 0.7:
            edits.append(red(p, src[p]))
        else:
            edits.append(miss(p, [rng.choice(vocab)]))
    return edits


def build_ensemble_corpus(seed=0, n_sentences=220, n_gold_systems=3,
                          n_noise_systems=3):
    """Synthetic multi-system GEC corpus.

    Gold systems output exactly the gold correction; noise systems output
    the gold correction plus spurious edits.  All planted edits are kept
    two or more positions apart so the word aligner recovers them exactly.
    Returns (sources, gold_targets, hypotheses) with hypotheses a list of
    per-system sentence lists, gold systems first.
    """
    rng = random.Random(seed)
    sources, golds, hyps = [], [], [[] for _ in range(n_gold_systems + n_noise_systems)]
    for _ in range(n_sentences):
        n = rng.randint(8, 14)
        src = random_tokens(rng, n, SRC_VOCAB)
        gold_pos = _spaced_positions(rng, n, rng.randint(1, 3), [])
        gold_edits = _planted_edits(rng, src, gold_pos, EDIT_VOCAB)
        gold = apply_edits(src, make_script(gold_edits))
        sources.append(src)
        golds.append(gold)
        for g in range(n_gold_systems):
            hyps[g].append(list(gold))
        for offset in range(n_noise_systems):
            noise_pos = _spaced_positions(
                rng, n, rng.randint(1, 2), list(gold_pos))
            noisy = gold_edits + _planted_edits(rng, src, noise_pos, NOISE_VOCAB)
            hyps[n_gold_systems + offset].append(
                apply_edits(src, make_script(noisy)))
    return sources, golds, hyps
