"""Constituency trees in bracketed treebank notation.

A tree is represented by its root :class:`NonTerminal`.  Terminal nodes
are the words of the sentence (with their 0-based position); non-terminal
nodes carry a constituent label and an ordered, non-empty child list.
The reserved labels ``SUB``, ``RED`` and ``MISS`` mark substituted,
redundant and missing-adjacent words in error-extended trees; ordinary
parser output must not contain them (see :func:`validate`).

Trees are treated as immutable after construction: every operation in
this package returns fresh nodes and never mutates its input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import FormatError

PSEUDO_LABELS = frozenset({"SUB", "RED", "MISS"})

_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")

# Treebank escapes keep the one-tree-per-line format unambiguous when a
# word itself contains a bracket.
_ESCAPES = {"(": "-LRB-", ")": "-RRB-"}
_UNESCAPES = {"-LRB-": "(", "-RRB-": ")"}


@dataclass
class Terminal:
    """A word of the sentence. ``position`` is its 0-based index in the yield."""

    token: str
    position: int = -1


@dataclass
class NonTerminal:
    """A labeled constituent with an ordered, non-empty list of children."""

    label: str
    children: list["Node"] = field(default_factory=list)


Node = Union[Terminal, NonTerminal]


def escape_token(token: str) -> str:
    for raw, esc in _ESCAPES.items():
        token = token.replace(raw, esc)
    return token


def unescape_token(token: str) -> str:
    for esc, raw in _UNESCAPES.items():
        token = token.replace(esc, raw)
    return token


def parse_bracketed(text: str, lineno: int | None = None) -> NonTerminal:
    """Parse one bracketed tree, e.g. ``"(S (NP (DT the) (NN cat)))"``.

    The input must be a single balanced-parenthesis expression.  Terminal
    positions are assigned left to right.  Raises :class:`FormatError` on
    empty input, unbalanced parentheses, an empty constituent ``()``, a
    non-terminal with zero children, or trailing material.
    """
    tokens = _TOKEN_RE.findall(text)
    if not tokens:
        raise FormatError("empty input, expected a bracketed tree", lineno)

    pos = 0

    def parse_node() -> NonTerminal:
        nonlocal pos
        if tokens[pos] != "(":
            raise FormatError(f"expected '(', got {tokens[pos]!r}", lineno)
        pos += 1
        if pos >= len(tokens):
            raise FormatError("unbalanced parentheses", lineno)
        label = tokens[pos]
        if label == ")":
            raise FormatError("empty constituent '()'", lineno)
        if label == "(":
            raise FormatError("missing constituent label", lineno)
        pos += 1
        children: list[Node] = []
        while pos < len(tokens) and tokens[pos] != ")":
            if tokens[pos] == "(":
                children.append(parse_node())
            else:
                children.append(Terminal(unescape_token(tokens[pos])))
                pos += 1
        if pos >= len(tokens):
            raise FormatError("unbalanced parentheses", lineno)
        pos += 1  # consume ')'
        if not children:
            raise FormatError(f"non-terminal {label!r} has no children", lineno)
        return NonTerminal(label, children)

    root = parse_node()
    if pos != len(tokens):
        raise FormatError("trailing material after the tree", lineno)
    renumber(root)
    return root


def serialize(root: Node) -> str:
    """Render a tree in canonical bracketed form (single spaces)."""
    if isinstance(root, Terminal):
        return escape_token(root.token)
    inner = " ".join(serialize(child) for child in root.children)
    return f"({root.label} {inner})"


def terminals(root: Node) -> Iterator[Terminal]:
    """All terminals in left-to-right order."""
    if isinstance(root, Terminal):
        yield root
    else:
        for child in root.children:
            yield from terminals(child)


def yield_tokens(root: Node) -> list[str]:
    """The sentence spanned by the tree: its terminal tokens, left to right."""
    return [t.token for t in terminals(root)]


def renumber(root: Node) -> Node:
    """Assign terminal positions 0..n-1 in left-to-right order, in place."""
    for i, t in enumerate(terminals(root)):
        t.position = i
    return root


def copy_tree(root: Node) -> Node:
    if isinstance(root, Terminal):
        return Terminal(root.token, root.position)
    return NonTerminal(root.label, [copy_tree(c) for c in root.children])


@dataclass
class Violation:
    """One invariant violation, located by the child-index path from the root."""

    path: tuple[int, ...]
    message: str

    def __str__(self) -> str:
        where = ".".join(map(str, self.path)) if self.path else "root"
        return f"at {where}: {self.message}"


def validate(root: Node, allow_pseudo: bool = True) -> list[Violation]:
    """Check tree invariants; returns one :class:`Violation` per finding.

    With ``allow_pseudo=False`` any SUB/RED/MISS label is reported, which
    is how trees read from base-parser output are vetted.
    """
    findings: list[Violation] = []
    seen_on_path: set[int] = set()
    next_position = 0

    def walk(node: Node, path: tuple[int, ...]) -> None:
        nonlocal next_position
        if id(node) in seen_on_path:
            findings.append(Violation(path, "node is its own ancestor"))
            return
        if isinstance(node, Terminal):
            if node.position != next_position:
                findings.append(
                    Violation(
                        path,
                        f"terminal {node.token!r} has position {node.position}, "
                        f"expected {next_position}",
                    )
                )
            next_position += 1
            return
        if not node.label or re.search(r"[\s()]", node.label):
            findings.append(Violation(path, f"malformed label {node.label!r}"))
        if not allow_pseudo and node.label in PSEUDO_LABELS:
            findings.append(Violation(path, f"pseudo label {node.label!r} not allowed"))
        if not node.children:
            findings.append(Violation(path, f"non-terminal {node.label!r} has no children"))
        seen_on_path.add(id(node))
        for i, child in enumerate(node.children):
            walk(child, path + (i,))
        seen_on_path.discard(id(node))

    walk(root, ())
    return findings


def read_trees(lines: Iterable[str], path: str | None = None) -> Iterator[NonTerminal]:
    """Parse a one-tree-per-line stream.  Blank lines are errors."""
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            raise FormatError("blank line in tree file", lineno, path)
        tree = parse_bracketed(stripped, lineno)
        yield tree


def load_tree_file(path: str) -> list[NonTerminal]:
    with open(path, encoding="utf-8") as fh:
        return list(read_trees(fh, path))


def write_trees(trees: Iterable[Node], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tree in trees:
            fh.write(serialize(tree) + "\n")
