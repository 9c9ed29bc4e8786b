"""Numeric self-checks: dense reference encoder and finite differences.

Used by the command-line ``gcn-check`` to demonstrate that the sparse
encoder matches a dense adjacency-matrix formulation and that analytic
gradients agree with central finite differences.
"""

from __future__ import annotations

import numpy as np

from .gcn import (
    KINK_MARGIN, GcnStack, _encode_with_cache, encode_backward, gcn_encode,
    init_stack, initial_node_matrix, min_abs_preactivation,
)
from .graph import SyntaxGraph


def sample_kink_free_instance(graph: SyntaxGraph, labels, d: int,
                              num_layers: int, seed: int,
                              self_loops: bool = False,
                              max_trials: int = 50) -> tuple[GcnStack, np.ndarray]:
    """Seeded stack and terminal inits with pre-activations clear of kinks.

    Re-rolls stack and inits together (layer-1 pre-activations of
    non-terminal nodes do not depend on the terminal inits, so re-sampling
    inits alone cannot clear every kink).  Wide node matrices always have
    some small pre-activation somewhere, so past ``max_trials`` the
    clearest sample wins; :func:`gcn_gradient_check` additionally skips
    any probe that actually crosses a kink.
    """
    best = None
    best_margin = -1.0
    for trial in range(max_trials):
        stack = init_stack(labels, d=d, num_layers=num_layers,
                           seed=seed + trial, self_loops=self_loops)
        rng = np.random.default_rng(seed + 7919 * (trial + 1))
        inits = rng.standard_normal((graph.num_terminals, d))
        margin = min_abs_preactivation(graph, inits, stack)
        if margin >= KINK_MARGIN:
            return stack, inits
        if margin > best_margin:
            best, best_margin = (stack, inits), margin
    return best


def dense_encode_reference(graph: SyntaxGraph, terminal_inits: np.ndarray,
                           stack: GcnStack) -> np.ndarray:
    """Encoder recomputed with an explicit 0/1 adjacency matrix."""
    A = graph.dense_adjacency()
    if stack.self_loops:
        A = A + np.eye(graph.num_nodes)
    H = initial_node_matrix(graph, terminal_inits, stack)
    for params in stack.layers:
        H = np.maximum(A @ H @ params.W.T + params.b, 0.0)
    return H


def rel_err(a: float, b: float, floor: float = 1e-6) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)


def gcn_gradient_check(graph: SyntaxGraph, terminal_inits: np.ndarray,
                       stack: GcnStack, rng: np.random.Generator,
                       samples_per_tensor: int = 8,
                       h: float = 1e-5) -> float:
    """Max relative error between analytic and numeric gradients.

    Probes a random subset of coordinates of W/b of every layer, of the
    label embeddings, and of the terminal inits, for the loss
    ``sum(gcn_encode(...))``.  A probe whose perturbation flips any ReLU
    activation is skipped: central differences are meaningless across a
    kink.
    """
    grads = encode_backward(graph, terminal_inits, stack)

    def loss() -> float:
        return float(gcn_encode(graph, terminal_inits, stack).sum())

    def masks() -> list[np.ndarray]:
        _, _, pres = _encode_with_cache(graph, terminal_inits, stack)
        return [p > 0 for p in pres]

    base_masks = masks()

    def probe(arr: np.ndarray, flat_index: int) -> float | None:
        flat = arr.reshape(-1)
        old = flat[flat_index]
        flat[flat_index] = old + h
        up, up_masks = loss(), masks()
        flat[flat_index] = old - h
        down, down_masks = loss(), masks()
        flat[flat_index] = old
        for m_up, m_dn, m0 in zip(up_masks, down_masks, base_masks):
            if not (np.array_equal(m_up, m0) and np.array_equal(m_dn, m0)):
                return None
        return (up - down) / (2.0 * h)

    worst = 0.0
    tensors = []
    for l, params in enumerate(stack.layers):
        tensors.append((params.W, grads.dW[l]))
        tensors.append((params.b, grads.db[l]))
    if len(stack.labels):
        tensors.append((stack.E_nt, grads.dE_nt))
    if graph.num_terminals:
        tensors.append((terminal_inits, grads.d_terminal_inits))
    for arr, analytic in tensors:
        size = arr.size
        count = min(samples_per_tensor, size)
        for idx in rng.choice(size, size=count, replace=False):
            numeric = probe(arr, int(idx))
            if numeric is None:
                continue
            worst = max(worst, rel_err(analytic.reshape(-1)[int(idx)], numeric))
    return worst
