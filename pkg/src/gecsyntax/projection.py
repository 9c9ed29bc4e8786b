"""Project a target-side constituency tree onto the source sentence.

Given a corrected sentence's tree and the edit script that separates the
ungrammatical source from it, :func:`project` rewrites the erroneous part
and keeps the correct part unchanged, producing a tree whose yield is the
source sentence with pseudo non-terminals marking each error:

* SUB — the target word's terminal is replaced by the source word and a
  ``SUB`` node is inserted as the word's new head.
* RED — a ``(RED word)`` subtree is placed in the phrase of the word's
  right-side neighbour, immediately left of the branch leading to it
  (right of the left neighbour's branch when the redundant word ends the
  sentence).  Chained redundant words land as siblings in one phrase.
* MISS — the missing target words are deleted (pruning any ancestors
  this empties) and a single ``MISS`` node is inserted above the
  right-side adjacent source word (left-side at the end of the sentence),
  one node no matter how many words are missing at that point.

A word can carry several pseudo nodes at once; SUB sits innermost, MISS
outermost.  ``placement="below"`` puts pseudo nodes directly above the
terminal (below its POS tag); ``placement="above"`` puts them above the
preterminal instead.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from . import tree as T
from .edits import MISS, RED, SUB, EditScript, align, apply_edits, _script_key

logger = logging.getLogger("gecsyntax")

PLACEMENTS = ("below", "above")


@dataclass
class ProjectionResult:
    source_tree: T.NonTerminal
    inserted: list[tuple[str, int]]  # (pseudo label, source token position)


def _index_of(parent: T.NonTerminal, node: T.Node) -> int:
    for idx, child in enumerate(parent.children):
        if child is node:
            return idx
    raise RuntimeError("node is not a child of its recorded parent")


class _Workspace:
    """Mutable copy of the target tree with parent links for surgery."""

    def __init__(self, root: T.NonTerminal):
        self.root = T.copy_tree(root)
        self.root.parent = None
        self._link(self.root)

    def _link(self, node: T.Node) -> None:
        if isinstance(node, T.NonTerminal):
            for child in node.children:
                child.parent = node
                self._link(child)

    def replace(self, old: T.Node, new: T.Node) -> None:
        parent = old.parent
        if parent is None:
            self.root = new
            new.parent = None
        else:
            parent.children[_index_of(parent, old)] = new
            new.parent = parent

    def wrap(self, node: T.Node, label: str) -> T.NonTerminal:
        wrapper = T.NonTerminal(label, [node])
        self.replace(node, wrapper)
        node.parent = wrapper
        return wrapper

    def insert_sibling(self, anchor: T.Node, new: T.Node, before: bool) -> None:
        parent = anchor.parent
        idx = _index_of(parent, anchor)
        parent.children.insert(idx if before else idx + 1, new)
        new.parent = parent
        self._link(new)

    def delete_terminal(self, term: T.Terminal) -> None:
        node: T.Node = term
        parent = node.parent
        parent.children.pop(_index_of(parent, node))
        while parent is not None and not parent.children:
            node, parent = parent, parent.parent
            if parent is None:
                raise ValueError("deleting missing words emptied the whole tree")
            parent.children.pop(_index_of(parent, node))

    def pseudo_unit(self, node: T.Node) -> T.Node:
        while node.parent is not None and node.parent.label in T.PSEUDO_LABELS:
            node = node.parent
        return node

    def slot(self, term: T.Terminal, placement: str) -> T.Node:
        """Where a pseudo node goes: the terminal, or its preterminal."""
        if placement == "above":
            parent = term.parent
            if parent is not None and len(parent.children) == 1 \
                    and parent.label not in T.PSEUDO_LABELS:
                return parent
        return term

    def phrase_branch(self, term: T.Terminal) -> T.Node:
        """Walk up through unary nodes; returns the branch whose parent is
        the word's lowest multi-child ancestor (or the root)."""
        node: T.Node = term
        while node.parent.parent is not None and len(node.parent.children) == 1:
            node = node.parent
        return node

    def strip_links(self) -> T.NonTerminal:
        def walk(node: T.Node) -> None:
            del node.parent
            if isinstance(node, T.NonTerminal):
                for child in node.children:
                    walk(child)

        walk(self.root)
        return self.root


def project(
    target_tree: T.NonTerminal,
    script: EditScript,
    src_tokens: Sequence[str],
    placement: str = "below",
) -> ProjectionResult:
    """Rewrite ``target_tree`` into a tree over ``src_tokens``.

    Requires ``yield(target_tree) == apply_edits(src_tokens, script)``.
    An empty script returns a structurally identical tree.
    """
    if placement not in PLACEMENTS:
        raise ValueError(f"placement must be one of {PLACEMENTS}")
    src_tokens = list(src_tokens)
    if not src_tokens and len(script):
        raise ValueError("empty source sentence with a non-empty edit script")
    expected = apply_edits(src_tokens, script)
    got = T.yield_tokens(target_tree)
    if got != expected:
        raise ValueError(
            "target tree yield does not match apply(src, script): "
            f"{got!r} vs {expected!r}"
        )

    ws = _Workspace(target_tree)
    tgt_terms = list(T.terminals(ws.root))

    # Map source positions to their terminals in the working tree and find
    # the target positions each MISS edit will delete.
    edits = sorted(script, key=_script_key)
    src_node: dict[int, T.Terminal] = {}
    miss_positions: dict[int, list[int]] = {}
    sp = tp = 0
    for e in edits:
        while sp < e.i:
            src_node[sp] = tgt_terms[tp]
            sp += 1
            tp += 1
        if e.category == SUB:
            src_node[sp] = tgt_terms[tp]
            sp += 1
            tp += 1
        elif e.category == RED:
            sp += 1
        else:  # MISS
            miss_positions[e.i] = list(range(tp, tp + len(e.tgt_tokens)))
            tp += len(e.tgt_tokens)
    while sp < len(src_tokens):
        src_node[sp] = tgt_terms[tp]
        sp += 1
        tp += 1

    def nearest_left_pos(pos: int) -> int:
        for q in range(pos, -1, -1):
            if q in src_node:
                return q
        raise ValueError("no source word available to anchor the edit")

    inserted: list[tuple[str, int]] = []
    n = len(src_tokens)
    # Right to left so sibling insertions for chained redundant words stack
    # correctly; at one position SUB/RED land before MISS so MISS wraps them.
    for e in sorted(edits, key=lambda e: (-e.i, 0 if e.category != MISS else 1)):
        if e.category == SUB:
            term = src_node[e.i]
            term.token = src_tokens[e.i]
            ws.wrap(ws.pseudo_unit(ws.slot(term, placement)), SUB)
            inserted.append((SUB, e.i))
        elif e.category == RED:
            word = T.Terminal(src_tokens[e.i])
            subtree = T.NonTerminal(RED, [word])
            if e.i == n - 1:
                branch = ws.phrase_branch(src_node[nearest_left_pos(e.i - 1)])
                ws.insert_sibling(branch, subtree, before=False)
            else:
                branch = ws.phrase_branch(src_node[e.i + 1])
                ws.insert_sibling(branch, subtree, before=True)
            src_node[e.i] = word
            inserted.append((RED, e.i))
        else:  # MISS
            for tpos in miss_positions[e.i]:
                ws.delete_terminal(tgt_terms[tpos])
            apos = e.i if e.i < n else nearest_left_pos(n - 1)
            ws.wrap(ws.pseudo_unit(ws.slot(src_node[apos], placement)), MISS)
            inserted.append((MISS, apos))

    result = ws.strip_links()
    T.renumber(result)
    if T.yield_tokens(result) != src_tokens:
        raise RuntimeError("projection produced a tree with the wrong yield")
    inserted.sort(key=lambda item: (item[1], item[0]))
    return ProjectionResult(result, inserted)


def strip_pseudo(root: T.NonTerminal) -> T.NonTerminal:
    """Remove all inserted pseudo nodes.

    A RED node is deleted together with the terminal(s) it dominates;
    SUB/MISS nodes are spliced out with their children promoted.  Nodes
    emptied by a deletion are pruned.
    """

    def walk(node: T.Node) -> list[T.Node]:
        if isinstance(node, T.Terminal):
            return [T.Terminal(node.token)]
        if node.label == RED:
            return []
        kept: list[T.Node] = []
        for child in node.children:
            kept.extend(walk(child))
        if node.label in (SUB, MISS):
            return kept
        if not kept:
            return []
        return [T.NonTerminal(node.label, kept)]

    stripped = walk(root)
    if len(stripped) != 1 or not isinstance(stripped[0], T.NonTerminal):
        raise ValueError("stripping pseudo nodes did not leave a single rooted tree")
    result = stripped[0]
    T.renumber(result)
    return result


@dataclass
class ProjectionSummary:
    pairs: int = 0
    skipped: int = 0
    pseudo_counts: dict[str, int] = field(default_factory=lambda: {SUB: 0, RED: 0, MISS: 0})
    skipped_lines: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pairs": self.pairs,
            "skipped": self.skipped,
            "pseudo_counts": dict(self.pseudo_counts),
        }


def build_training_trees(
    pairs: Sequence[tuple[Sequence[str], Sequence[str]]],
    target_trees: Sequence[T.NonTerminal],
    placement: str = "below",
) -> tuple[list[T.NonTerminal | None], ProjectionSummary]:
    """Project every (source, target) pair through its target-side tree.

    Pair and tree streams must have equal length (fatal otherwise).
    Malformed pairs (tree yield mismatch, projection failure) are skipped
    and logged with their 1-based line number; output order matches input
    order, with ``None`` at skipped slots.
    """
    if len(pairs) != len(target_trees):
        raise ValueError(
            f"{len(pairs)} sentence pairs but {len(target_trees)} trees"
        )
    summary = ProjectionSummary(pairs=len(pairs))
    out: list[T.NonTerminal | None] = []
    for lineno, ((src, tgt), tree) in enumerate(zip(pairs, target_trees), start=1):
        try:
            if T.yield_tokens(tree) != list(tgt):
                raise ValueError("tree yield does not match the target sentence")
            result = project(tree, align(src, tgt), src, placement=placement)
        except (ValueError, RuntimeError) as exc:
            logger.warning("line %d: skipped: %s", lineno, exc)
            summary.skipped += 1
            summary.skipped_lines.append(lineno)
            out.append(None)
            continue
        for label, _ in result.inserted:
            summary.pseudo_counts[label] += 1
        out.append(result.source_tree)
    return out, summary
