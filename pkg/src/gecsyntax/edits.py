"""Word-level edit extraction between source and corrected sentences.

Three structural categories describe how an ungrammatical source differs
from its correction:

* ``SUB`` — one source word must be substituted by one target word,
* ``RED`` — one source word is redundant and must be deleted,
* ``MISS`` — one or more target words are missing before a source
  position (all words missing at the same point form a single edit).

:func:`align` extracts a minimal-cost script deterministically;
:func:`apply_edits` reconstructs the target from a source and a script,
which doubles as the round-trip oracle for the aligner.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import FormatError

SUB = "SUB"
RED = "RED"
MISS = "MISS"
CATEGORIES = (SUB, RED, MISS)


@dataclass(frozen=True, slots=True)
class Edit:
    """One edit over the source token sequence.

    ``(i, j)`` is a half-open source span: ``j == i + 1`` for SUB and RED,
    ``j == i`` (a pure insertion point) for MISS.
    """

    category: str
    i: int
    j: int
    src_tokens: tuple[str, ...]
    tgt_tokens: tuple[str, ...]

    @property
    def cost(self) -> int:
        """Unit cost: 1 per substituted/deleted word, 1 per inserted word."""
        return len(self.tgt_tokens) if self.category == MISS else 1

    def identity(self) -> tuple:
        """Equality key used for pooling edits across systems."""
        return (self.category, self.i, self.j, self.tgt_tokens)


def sub(i: int, src_token: str, tgt_token: str) -> Edit:
    return Edit(SUB, i, i + 1, (src_token,), (tgt_token,))


def red(i: int, src_token: str) -> Edit:
    return Edit(RED, i, i + 1, (src_token,), ())


def miss(i: int, tgt_tokens: Sequence[str]) -> Edit:
    return Edit(MISS, i, i, (), tuple(tgt_tokens))


@dataclass(frozen=True, slots=True)
class EditScript:
    """Edits ordered by span start; at equal start a MISS precedes SUB/RED."""

    edits: tuple[Edit, ...] = ()

    def __iter__(self) -> Iterator[Edit]:
        return iter(self.edits)

    def __len__(self) -> int:
        return len(self.edits)

    @property
    def cost(self) -> int:
        return sum(e.cost for e in self.edits)

    def category_counts(self) -> dict[str, int]:
        counts = {SUB: 0, RED: 0, MISS: 0}
        for e in self.edits:
            counts[e.category] += 1
        return counts


def _script_key(edit: Edit) -> tuple:
    return (edit.i, 0 if edit.category == MISS else 1, edit.j)


def make_script(edits: Iterable[Edit]) -> EditScript:
    """Build a script from edits in any order, enforcing the invariants."""
    ordered = tuple(sorted(edits, key=_script_key))
    problems = check_script(ordered)
    if problems:
        raise ValueError("invalid edit script: " + "; ".join(problems))
    return EditScript(ordered)


def check_script(edits: Sequence[Edit]) -> list[str]:
    problems = []
    miss_points = set()
    last_end = -1
    for e in edits:
        if e.category == SUB and not (e.j == e.i + 1 and len(e.tgt_tokens) == 1):
            problems.append(f"bad SUB shape at {e.i}")
        elif e.category == RED and not (e.j == e.i + 1 and not e.tgt_tokens):
            problems.append(f"bad RED shape at {e.i}")
        elif e.category == MISS and not (e.j == e.i and e.tgt_tokens):
            problems.append(f"bad MISS shape at {e.i}")
        elif e.category not in CATEGORIES:
            problems.append(f"unknown category {e.category!r}")
        if e.category == MISS:
            if e.i in miss_points:
                problems.append(f"two MISS edits at point {e.i}")
            miss_points.add(e.i)
        else:
            if e.i < last_end:
                problems.append(f"overlapping span at {e.i}")
            last_end = e.j
    return problems


def align(src_tokens: Sequence[str], tgt_tokens: Sequence[str]) -> EditScript:
    """Extract a minimal-cost, deterministic edit script from src to tgt.

    Costs are unit costs (match 0, substitute/insert/delete 1).  Ties are
    broken by op preference match > substitute > delete > insert, resolved
    left to right, so e.g. in ``["the","the","cat"] -> ["the","cat"]`` the
    second ``"the"`` is the redundant one.  Maximal runs of non-matching
    positions are decomposed per word: the first min(m, n) source/target
    pairs become SUBs, leftover source words become REDs, leftover target
    words form one trailing MISS.

    ``apply_edits(src_tokens, align(src_tokens, tgt_tokens))`` always
    reconstructs ``tgt_tokens``.
    """
    s = list(src_tokens)
    t = list(tgt_tokens)
    if s == t:
        return EditScript()

    # Matching equal leading tokens is always on a minimal-cost path and is
    # exactly what the left-to-right preference would pick, so trim them.
    offset = 0
    n, m = len(s), len(t)
    while offset < n and offset < m and s[offset] == t[offset]:
        offset += 1
    s = s[offset:]
    t = t[offset:]
    n -= offset
    m -= offset

    # Suffix costs: dist[i][j] = minimal cost of aligning s[i:] with t[j:].
    dist = [None] * (n + 1)
    dist[n] = list(range(m, -1, -1))
    for i in range(n - 1, -1, -1):
        below = dist[i + 1]
        row = [0] * (m + 1)
        row[m] = n - i
        si = s[i]
        for j in range(m - 1, -1, -1):
            best = below[j + 1] + (si != t[j])
            alt = below[j] + 1
            if alt < best:
                best = alt
            alt = row[j + 1] + 1
            if alt < best:
                best = alt
            row[j] = best
        dist[i] = row

    # Walk forward, taking the most-preferred op that stays on a minimal
    # path; flush each maximal non-match run as per-word edits.
    edits: list[Edit] = []
    pend_src: list[str] = []
    pend_tgt: list[str] = []
    run_start = 0

    def flush() -> None:
        ms = len(pend_src)
        mt = len(pend_tgt)
        k = min(ms, mt)
        for p in range(k):
            edits.append(Edit(SUB, run_start + p, run_start + p + 1,
                              (pend_src[p],), (pend_tgt[p],)))
        for p in range(k, ms):
            edits.append(Edit(RED, run_start + p, run_start + p + 1,
                              (pend_src[p],), ()))
        if mt > ms:
            point = run_start + ms
            edits.append(Edit(MISS, point, point, (), tuple(pend_tgt[ms:])))
        pend_src.clear()
        pend_tgt.clear()

    i = j = 0
    while i < n or j < m:
        cur = dist[i][j]
        if i < n and j < m and s[i] == t[j] and dist[i + 1][j + 1] == cur:
            if pend_src or pend_tgt:
                flush()
            i += 1
            j += 1
            run_start = offset + i
        elif i < n and j < m and dist[i + 1][j + 1] + 1 == cur:
            if not pend_src and not pend_tgt:
                run_start = offset + i
            pend_src.append(s[i])
            pend_tgt.append(t[j])
            i += 1
            j += 1
        elif i < n and dist[i + 1][j] + 1 == cur:
            if not pend_src and not pend_tgt:
                run_start = offset + i
            pend_src.append(s[i])
            i += 1
        else:
            if not pend_src and not pend_tgt:
                run_start = offset + i
            pend_tgt.append(t[j])
            j += 1
    if pend_src or pend_tgt:
        flush()
    return EditScript(tuple(edits))


def apply_edits(src_tokens: Sequence[str], script: EditScript) -> list[str]:
    """Reconstruct the target sentence from a source and an edit script.

    Raises ``ValueError`` on out-of-range spans or overlapping SUB/RED
    spans; a pure function otherwise.
    """
    n = len(src_tokens)
    at_point: dict[int, tuple[str, ...]] = {}
    at_span: dict[int, Edit] = {}
    for e in script:
        if e.i < 0 or e.j > n or e.i > e.j:
            raise ValueError(f"edit span [{e.i},{e.j}) out of range for {n} tokens")
        if e.category == MISS:
            if e.i in at_point:
                raise ValueError(f"two MISS edits at point {e.i}")
            at_point[e.i] = e.tgt_tokens
        else:
            if e.i in at_span:
                raise ValueError(f"overlapping edits at position {e.i}")
            at_span[e.i] = e

    out: list[str] = []
    for i in range(n + 1):
        if i in at_point:
            out.extend(at_point[i])
        if i < n:
            e = at_span.get(i)
            if e is None:
                out.append(src_tokens[i])
            elif e.category == SUB:
                out.extend(e.tgt_tokens)
    return out


# --- serialization -----------------------------------------------------

def script_to_dict(script: EditScript) -> dict:
    return {
        "edits": [
            {"cat": e.category, "i": e.i, "j": e.j,
             "src": list(e.src_tokens), "tgt": list(e.tgt_tokens)}
            for e in script
        ]
    }


def script_from_dict(data: dict) -> EditScript:
    edits = []
    for entry in data["edits"]:
        edits.append(Edit(entry["cat"], entry["i"], entry["j"],
                          tuple(entry["src"]), tuple(entry["tgt"])))
    return make_script(edits)


def script_to_json(script: EditScript) -> str:
    return json.dumps(script_to_dict(script), ensure_ascii=False)


def script_from_json(text: str) -> EditScript:
    return script_from_dict(json.loads(text))


def write_m2(blocks: Iterable[tuple[Sequence[str], EditScript]], fh) -> None:
    """Write ``S``/``A`` blocks: one source line plus one line per edit."""
    first = True
    for src_tokens, script in blocks:
        if not first:
            fh.write("\n")
        first = False
        fh.write("S " + " ".join(src_tokens) + "\n")
        for e in script:
            fh.write(f"A {e.i} {e.j}|||{e.category}|||{' '.join(e.tgt_tokens)}\n")


def read_m2(lines: Iterable[str], path: str | None = None) -> list[tuple[list[str], EditScript]]:
    """Parse ``S``/``A`` blocks; blocks are separated by blank lines."""
    blocks: list[tuple[list[str], EditScript]] = []
    src: list[str] | None = None
    edits: list[Edit] = []

    def close() -> None:
        nonlocal src, edits
        if src is not None:
            blocks.append((src, make_script(edits)))
        src = None
        edits = []

    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            close()
            continue
        if line.startswith("S ") or line == "S":
            close()
            src = line[2:].split()
            continue
        if line.startswith("A "):
            if src is None:
                raise FormatError("'A' line before its 'S' line", lineno, path)
            body = line[2:]
            parts = body.split("|||")
            if len(parts) != 3:
                raise FormatError("expected 'A i j|||CAT|||replacement'", lineno, path)
            span, cat, replacement = parts
            try:
                i_s, j_s = span.split()
                i, j = int(i_s), int(j_s)
            except ValueError:
                raise FormatError(f"bad span {span!r}", lineno, path) from None
            if cat not in CATEGORIES:
                raise FormatError(f"unknown category {cat!r}", lineno, path)
            if not (0 <= i <= j <= len(src)):
                raise FormatError(f"span [{i},{j}) out of range", lineno, path)
            tgt = tuple(replacement.split())
            edits.append(Edit(cat, i, j, tuple(src[i:j]), tgt))
            continue
        raise FormatError(f"unrecognized line {line!r}", lineno, path)
    close()
    return blocks


def load_m2_file(path: str) -> list[tuple[list[str], EditScript]]:
    with open(path, encoding="utf-8") as fh:
        return read_m2(fh, path)
