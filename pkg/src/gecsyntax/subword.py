"""Convert word-level trees to subword-level trees.

Each terminal word is replaced, in place, by its subword pieces as
sibling terminals under the word's immediate parent, so every subword
inherits the original word's head non-terminal (including pseudo nodes).
The module never runs a tokenizer itself: segmentations are supplied by
the caller, with a configurable continuation-marker convention used only
to verify that the pieces reassemble the word.
"""

from __future__ import annotations

from typing import Callable, Sequence

from . import tree as T
from .errors import FormatError

SubwordSegmentation = Sequence[Sequence[str]]  # one piece list per word


def join_pieces(pieces: Sequence[str], marker: str = "@@", style: str = "prefix") -> str:
    """Reassemble a word from its pieces by stripping continuation markers.

    ``style="prefix"`` strips a leading marker from every non-first piece
    (``["play", "@@ing"] -> "playing"``); ``style="suffix"`` strips a
    trailing marker from every non-final piece (``["play@@", "ing"]``).
    """
    if style == "prefix":
        out = [pieces[0]]
        out += [p[len(marker):] if p.startswith(marker) else p for p in pieces[1:]]
    elif style == "suffix":
        out = [p[:-len(marker)] if p.endswith(marker) else p for p in pieces[:-1]]
        out.append(pieces[-1])
    else:
        raise ValueError(f"unknown marker style {style!r}")
    return "".join(out)


def to_subword_tree(
    root: T.NonTerminal,
    segmentation: SubwordSegmentation,
    marker: str = "@@",
    style: str = "prefix",
    join: Callable[[Sequence[str]], str] | None = None,
) -> T.NonTerminal:
    """Replace each terminal with its subword pieces as sibling terminals.

    The segmentation must cover the tree's yield exactly: one non-empty
    piece list per word, reassembling (via ``join``, by default the
    marker convention) to that word.  Non-terminal structure is unchanged.
    """
    words = T.yield_tokens(root)
    if len(segmentation) != len(words):
        raise ValueError(
            f"segmentation covers {len(segmentation)} words, tree has {len(words)}"
        )
    reassemble = join if join is not None else (
        lambda pieces: join_pieces(pieces, marker, style)
    )
    for word, pieces in zip(words, segmentation):
        if not pieces:
            raise ValueError(f"empty subword list for word {word!r}")
        rebuilt = reassemble(pieces)
        if rebuilt != word:
            raise ValueError(
                f"subword pieces {list(pieces)!r} reassemble to {rebuilt!r}, "
                f"expected {word!r}"
            )

    pos = 0

    def walk(node: T.Node) -> list[T.Node]:
        nonlocal pos
        if isinstance(node, T.Terminal):
            pieces = segmentation[pos]
            pos += 1
            return [T.Terminal(p) for p in pieces]
        children: list[T.Node] = []
        for child in node.children:
            children.extend(walk(child))
        return [T.NonTerminal(node.label, children)]

    result = walk(root)[0]
    T.renumber(result)
    return result


def parse_segmentation_line(line: str, lineno: int | None = None,
                            path: str | None = None) -> list[list[str]]:
    """One sentence per line: words separated by TAB, pieces by spaces."""
    stripped = line.rstrip("\n")
    if not stripped.strip():
        raise FormatError("blank line in segmentation file", lineno, path)
    groups = []
    for field in stripped.split("\t"):
        pieces = field.split()
        if not pieces:
            raise FormatError("empty word field in segmentation", lineno, path)
        groups.append(pieces)
    return groups


def load_segmentation_file(path: str) -> list[list[list[str]]]:
    with open(path, encoding="utf-8") as fh:
        return [parse_segmentation_line(line, lineno, path)
                for lineno, line in enumerate(fh, start=1)]
