"""Reference graph-convolution encoder over syntax graphs.

One layer computes, for every node v,

    out_v = ReLU( sum_{u in N(v)} W @ h_u + b )

summing over one-hop neighbours only: no self term and no degree
normalization (an optional self-loop switch is provided, default off).
Terminal nodes are initialized from caller-supplied token vectors,
non-terminal nodes from a label embedding table.  The syntax-aware token
representations are fused with the basic encoder states by a weighted
sum, ``lam * h_syn + (1 - lam) * h_basic``.

Everything is plain numpy; :func:`encode_backward` supplies analytic
gradients so the encoder can be verified against finite differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .graph import SyntaxGraph


@dataclass
class GcnLayerParams:
    W: np.ndarray  # (d, d)
    b: np.ndarray  # (d,)

    def check(self, d: int) -> None:
        if self.W.shape != (d, d) or self.b.shape != (d,):
            raise ValueError(
                f"layer shapes {self.W.shape}/{self.b.shape} do not match width {d}"
            )
        if not (np.isfinite(self.W).all() and np.isfinite(self.b).all()):
            raise ValueError("non-finite layer parameters")


@dataclass
class GcnStack:
    layers: list[GcnLayerParams]
    labels: list[str]            # row i of E_nt embeds labels[i]
    E_nt: np.ndarray             # (n_labels, d)
    d: int
    self_loops: bool = False
    _label_rows: dict[str, int] = field(default=None, init=False, repr=False,
                                        compare=False)

    def __post_init__(self):
        self._label_rows = {lab: i for i, lab in enumerate(self.labels)}
        for layer in self.layers:
            layer.check(self.d)
        if self.E_nt.shape != (len(self.labels), self.d):
            raise ValueError("embedding table shape does not match labels/width")

    def label_row(self, label: str) -> int:
        try:
            return self._label_rows[label]
        except KeyError:
            raise ValueError(f"no embedding row for label {label!r}") from None


def init_stack(labels, d: int = 64, num_layers: int = 3, seed: int = 0,
               self_loops: bool = False) -> GcnStack:
    """Seeded random parameters; embeddings uniform in [-0.1, 0.1].

    Weights are uniform in +-sqrt(3/d) (unit variance per product column),
    so activation magnitudes stay roughly stable across layers instead of
    decaying toward the ReLU kink.
    """
    rng = np.random.default_rng(seed)
    scale = float(np.sqrt(3.0 / d))
    layers = [
        GcnLayerParams(rng.uniform(-scale, scale, (d, d)),
                       rng.uniform(-scale, scale, d))
        for _ in range(num_layers)
    ]
    E_nt = rng.uniform(-0.1, 0.1, (len(labels), d))
    return GcnStack(layers, list(labels), E_nt, d, self_loops)


def gcn_layer(graph: SyntaxGraph, H: np.ndarray, params: GcnLayerParams,
              self_loops: bool = False) -> np.ndarray:
    """One graph-convolution layer over the node matrix H (nodes x d)."""
    d = params.W.shape[0]
    if H.ndim != 2 or H.shape != (graph.num_nodes, d):
        raise ValueError(
            f"node matrix shape {H.shape} does not match "
            f"({graph.num_nodes}, {d})"
        )
    return _layer_forward(graph, H, params, self_loops)[0]


def _layer_forward(graph, H, params, self_loops):
    us, vs = graph.directed_edges()
    msgs = H @ params.W.T
    pre = np.zeros_like(msgs)
    np.add.at(pre, vs, msgs[us])
    if self_loops:
        pre += msgs
    pre += params.b
    return np.maximum(pre, 0.0), pre


def initial_node_matrix(graph: SyntaxGraph, terminal_inits: np.ndarray,
                        stack: GcnStack) -> np.ndarray:
    if terminal_inits.shape != (graph.num_terminals, stack.d):
        raise ValueError(
            f"terminal inits shape {terminal_inits.shape} does not match "
            f"({graph.num_terminals}, {stack.d})"
        )
    rows = [stack.label_row(lab) for lab in graph.nt_labels]
    return np.vstack([
        np.asarray(terminal_inits, dtype=float),
        stack.E_nt[rows] if rows else np.zeros((0, stack.d)),
    ])


def gcn_encode(graph: SyntaxGraph, terminal_inits: np.ndarray,
               stack: GcnStack) -> np.ndarray:
    """Run the full stack; returns the final node matrix (nodes x d)."""
    H = initial_node_matrix(graph, terminal_inits, stack)
    for params in stack.layers:
        H, _ = _layer_forward(graph, H, params, stack.self_loops)
    return H


def _encode_with_cache(graph, terminal_inits, stack):
    H = initial_node_matrix(graph, terminal_inits, stack)
    inputs, pres = [], []
    for params in stack.layers:
        inputs.append(H)
        H, pre = _layer_forward(graph, H, params, stack.self_loops)
        pres.append(pre)
    return H, inputs, pres


# Finite-difference checks re-sample their inputs while any pre-activation
# is closer to a ReLU kink than this.  The margin must comfortably exceed
# the finite-difference step times the pre-activation's sensitivity to one
# parameter entry, or the perturbed pass lands on the other side of the
# kink and the numeric gradient is garbage.
KINK_MARGIN = 1e-3


def min_abs_preactivation(graph, terminal_inits, stack) -> float:
    """Smallest |pre-activation| across all layers (inf for empty stacks)."""
    _, _, pres = _encode_with_cache(graph, terminal_inits, stack)
    if not pres:
        return float("inf")
    return min(float(np.min(np.abs(p))) for p in pres)


@dataclass
class GcnGradients:
    dW: list[np.ndarray]
    db: list[np.ndarray]
    dE_nt: np.ndarray
    d_terminal_inits: np.ndarray


def encode_backward(graph: SyntaxGraph, terminal_inits: np.ndarray,
                    stack: GcnStack, d_out: np.ndarray | None = None) -> GcnGradients:
    """Analytic gradients of sum(d_out * output) w.r.t. all parameters.

    With the default ``d_out`` of ones this is the gradient of the plain
    sum of the encoder output.
    """
    out, inputs, pres = _encode_with_cache(graph, terminal_inits, stack)
    grad = np.ones_like(out) if d_out is None else np.asarray(d_out, dtype=float)
    if grad.shape != out.shape:
        raise ValueError("d_out shape does not match encoder output")
    us, vs = graph.directed_edges()
    dW = [None] * len(stack.layers)
    db = [None] * len(stack.layers)
    for l in range(len(stack.layers) - 1, -1, -1):
        H_in = inputs[l]
        d_pre = grad * (pres[l] > 0)
        db[l] = d_pre.sum(axis=0)
        # pre = A' @ (H W^T) + b with A' symmetric, so the message gradient
        # is A' @ d_pre routed back along the edges.
        d_msgs = np.zeros_like(d_pre)
        np.add.at(d_msgs, us, d_pre[vs])
        if stack.self_loops:
            d_msgs += d_pre
        dW[l] = d_msgs.T @ H_in
        grad = d_msgs @ stack.layers[l].W
    nt = graph.num_terminals
    dE = np.zeros_like(stack.E_nt)
    for k, lab in enumerate(graph.nt_labels):
        dE[stack.label_row(lab)] += grad[nt + k]
    return GcnGradients(dW, db, dE, grad[:nt].copy())


def terminal_rows(graph: SyntaxGraph, H: np.ndarray) -> np.ndarray:
    """Token-order slice of a node matrix (terminals come first)."""
    return H[:graph.num_terminals]


def fuse(h_syn: np.ndarray, h_basic: np.ndarray, lam: float) -> np.ndarray:
    """Weighted sum of syntax-aware and basic representations."""
    h_syn = np.asarray(h_syn, dtype=float)
    h_basic = np.asarray(h_basic, dtype=float)
    if h_syn.shape != h_basic.shape:
        raise ValueError(f"shape mismatch {h_syn.shape} vs {h_basic.shape}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"fusion factor {lam} outside [0, 1]")
    return lam * h_syn + (1.0 - lam) * h_basic


@dataclass
class FusionConfig:
    lam: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"fusion factor {self.lam} outside [0, 1]")


# --- parameter (de)serialization ---------------------------------------

def stack_to_dict(stack: GcnStack) -> dict:
    return {
        "d": stack.d,
        "n": len(stack.labels),
        "labels": list(stack.labels),
        "layers": [{"W": p.W.tolist(), "b": p.b.tolist()} for p in stack.layers],
        "E_nt": stack.E_nt.tolist(),
        "self_loops": stack.self_loops,
    }


def stack_from_dict(data: dict) -> GcnStack:
    layers = [
        GcnLayerParams(np.asarray(p["W"], dtype=float), np.asarray(p["b"], dtype=float))
        for p in data["layers"]
    ]
    return GcnStack(
        layers,
        list(data["labels"]),
        np.asarray(data["E_nt"], dtype=float).reshape(len(data["labels"]), data["d"]),
        int(data["d"]),
        bool(data.get("self_loops", False)),
    )


def save_stack(stack: GcnStack, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(stack_to_dict(stack), fh)


def load_stack(path: str) -> GcnStack:
    with open(path, encoding="utf-8") as fh:
        return stack_from_dict(json.load(fh))
