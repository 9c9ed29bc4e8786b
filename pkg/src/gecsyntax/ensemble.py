"""Inter-model combination: pool edits across systems, keep the good ones.

Edits proposed by k correction systems for the same source sentence are
gathered into deduplicated candidates with per-system vote indicators.
A binary logistic-regression selector, trained on candidates labeled
against gold edits, decides which candidates to keep; surviving edits are
conflict-resolved and re-applied to the source.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .edits import MISS, RED, SUB, Edit, EditScript, align, apply_edits

_CATEGORY_ORDER = {SUB: 0, RED: 1, MISS: 2}


@dataclass
class EditCandidate:
    edit: Edit
    votes: tuple[int, ...]  # 0/1 per system

    @property
    def vote_fraction(self) -> float:
        return sum(self.votes) / len(self.votes)

    def features(self) -> np.ndarray:
        onehot = [0.0, 0.0, 0.0]
        onehot[_CATEGORY_ORDER[self.edit.category]] = 1.0
        return np.array([*map(float, self.votes), self.vote_fraction, *onehot])


def feature_names(num_systems: int) -> list[str]:
    return [f"system_{i}" for i in range(num_systems)] + [
        "vote_fraction", "is_sub", "is_red", "is_miss",
    ]


def gather(src_tokens: Sequence[str],
           hypotheses: Sequence[Sequence[str]]) -> list[EditCandidate]:
    """Pool the edits of every system's correction of one source sentence.

    Candidates are the deduplicated union of per-system alignments, with
    identity (category, span, replacement); order is span start, then
    category name, then replacement.
    """
    if not hypotheses:
        raise ValueError("need at least one hypothesis")
    k = len(hypotheses)
    found: dict[tuple, tuple[Edit, list[int]]] = {}
    for sys_idx, hyp in enumerate(hypotheses):
        for edit in align(src_tokens, hyp):
            key = edit.identity()
            if key not in found:
                found[key] = (edit, [0] * k)
            found[key][1][sys_idx] = 1
    candidates = [EditCandidate(edit, tuple(votes)) for edit, votes in found.values()]
    candidates.sort(key=lambda c: (c.edit.i, c.edit.category,
                                   c.edit.tgt_tokens, c.edit.j))
    return candidates


def label_candidates(candidates: Sequence[EditCandidate],
                     gold: EditScript) -> np.ndarray:
    """1 where a candidate exactly matches a gold edit, else 0."""
    gold_keys = {e.identity() for e in gold}
    return np.array([1.0 if c.edit.identity() in gold_keys else 0.0
                     for c in candidates])


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    threshold: float = 0.5
    feature_names: list[str] | None = None
    final_loss: float | None = None

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        z = np.asarray(features, dtype=float) @ self.weights + self.bias
        return _sigmoid(z)

    def score(self, candidate: EditCandidate) -> float:
        return float(self.predict_proba(candidate.features()))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def loss_and_grad(weights: np.ndarray, bias: float, X: np.ndarray,
                  y: np.ndarray, l2: float = 0.0):
    """Mean L2-regularized logistic loss and its analytic gradient.

    The bias is not regularized.  Returns (loss, grad_weights, grad_bias).
    """
    with np.errstate(over="ignore", invalid="ignore"):
        z = X @ weights + bias
        # log(1 + exp(-s*z)) with s = +-1, computed stably
        s = 2.0 * y - 1.0
        loss = float(np.mean(np.logaddexp(0.0, -s * z))
                     + 0.5 * l2 * weights @ weights)
        residual = _sigmoid(z) - y
        grad_w = X.T @ residual / len(y) + l2 * weights
        grad_b = float(residual.mean())
    return loss, grad_w, grad_b


def train(candidates: Sequence[EditCandidate], labels: Sequence[float],
          lr: float = 0.5, epochs: int = 500, l2: float = 0.0,
          threshold: float = 0.5) -> LogRegModel:
    """Full-batch gradient descent from zero-initialized parameters.

    Deterministic: no sampling is involved.  Raises ``ValueError`` if the
    loss goes non-finite (learning rate too large).
    """
    if len(candidates) == 0:
        raise ValueError("no candidates to train on")
    X = np.stack([c.features() for c in candidates])
    y = np.asarray(labels, dtype=float)
    if X.shape[1] == 0:
        raise ValueError("zero-width feature vectors")
    if X.shape[0] != y.shape[0]:
        raise ValueError("labels do not match candidates")
    w = np.zeros(X.shape[1])
    b = 0.0
    loss = None
    for _ in range(epochs):
        loss, gw, gb = loss_and_grad(w, b, X, y, l2)
        if not np.isfinite(loss):
            raise ValueError("training diverged (non-finite loss); lower the lr")
        w -= lr * gw
        b -= lr * gb
    loss, _, _ = loss_and_grad(w, b, X, y, l2)
    return LogRegModel(w, b, threshold, feature_names(len(candidates[0].votes)),
                       final_loss=float(loss))


def _conflicts(a: Edit, b: Edit) -> bool:
    if a.category == MISS and b.category == MISS:
        return a.i == b.i
    if a.category == MISS or b.category == MISS:
        return False
    return a.i < b.j and b.i < a.j


def select_edits(candidates: Sequence[EditCandidate],
                 model: LogRegModel) -> list[EditCandidate]:
    """Keep candidates scoring at or above the threshold, then resolve
    span conflicts greedily by descending score (ties: leftmost span,
    then SUB > RED > MISS)."""
    scored = [(model.score(c), c) for c in candidates]
    kept = [(s, c) for s, c in scored if s >= model.threshold]
    kept.sort(key=lambda item: (-item[0], item[1].edit.i,
                                _CATEGORY_ORDER[item[1].edit.category],
                                item[1].edit.tgt_tokens))
    chosen: list[EditCandidate] = []
    for _, cand in kept:
        if not any(_conflicts(cand.edit, c.edit) for c in chosen):
            chosen.append(cand)
    chosen.sort(key=lambda c: (c.edit.i, _CATEGORY_ORDER[c.edit.category]))
    return chosen


def select_and_apply(src_tokens: Sequence[str],
                     candidates: Sequence[EditCandidate],
                     model: LogRegModel) -> list[str]:
    """Apply the selected, conflict-free edits to the source sentence."""
    chosen = select_edits(candidates, model)
    script = EditScript(tuple(sorted((c.edit for c in chosen),
                                     key=lambda e: (e.i, e.category != MISS))))
    return apply_edits(src_tokens, script)


# --- model (de)serialization -------------------------------------------

def model_to_dict(model: LogRegModel) -> dict:
    return {
        "weights": model.weights.tolist(),
        "bias": model.bias,
        "threshold": model.threshold,
        "feature_names": model.feature_names,
    }


def model_from_dict(data: dict) -> LogRegModel:
    return LogRegModel(
        np.asarray(data["weights"], dtype=float),
        float(data["bias"]),
        float(data.get("threshold", 0.5)),
        data.get("feature_names"),
    )


def save_model(model: LogRegModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)


def load_model(path: str) -> LogRegModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
