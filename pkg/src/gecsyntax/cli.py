"""Batch command-line surface for the toolkit.

Subcommands cover edit extraction (``align``), tree projection
(``project``), the pseudo-node ablation (``strip``), subword conversion
(``subword``), numeric self-checks (``gcn-check``, ``fuse-demo``), the
edit-ensemble selector (``ensemble-train``, ``ensemble-apply``) and
edit-level scoring (``score``).

Exit codes: 0 on success, 2 on input-format errors (reported with line
numbers), 1 when a numeric self-check fails.  Set ``CSYN_LOG`` to a level
name (debug, info, warning, ...) for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys

import numpy as np

from . import ensemble, gcn, graph, projection, scoring, subword
from . import edits as ed
from . import tree as T
from .checks import (
    dense_encode_reference, gcn_gradient_check, sample_kink_free_instance,
)
from .errors import FormatError

logger = logging.getLogger("gecsyntax")


def _read_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _read_token_lines(path: str) -> list[list[str]]:
    return [line.split() for line in _read_lines(path)]


def read_parallel_tsv(path: str) -> list[tuple[list[str], list[str]]]:
    pairs = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError(
                f"expected 'source<TAB>target', got {len(fields)} field(s)",
                lineno, path)
        pairs.append((fields[0].split(), fields[1].split()))
    return pairs


def _out_stream(args):
    if getattr(args, "output", None):
        return open(args.output, "w", encoding="utf-8")
    return contextlib.nullcontext(sys.stdout)


def cmd_align(args) -> int:
    pairs = read_parallel_tsv(args.parallel)
    with _out_stream(args) as out:
        if args.format == "m2":
            ed.write_m2(((src, ed.align(src, tgt)) for src, tgt in pairs), out)
        else:
            for src, tgt in pairs:
                out.write(ed.script_to_json(ed.align(src, tgt)) + "\n")
    return 0


def cmd_project(args) -> int:
    pairs = read_parallel_tsv(args.parallel)
    trees = T.load_tree_file(args.trees)
    if len(trees) != len(pairs):
        raise FormatError(
            f"{len(pairs)} sentence pairs but {len(trees)} trees",
            path=args.trees)
    results, summary = projection.build_training_trees(
        pairs, trees, placement=args.pseudo_placement)
    with _out_stream(args) as out:
        for tree in results:
            if tree is not None:
                out.write(T.serialize(tree) + "\n")
    summary_json = json.dumps(summary.to_dict(), sort_keys=True)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(summary_json + "\n")
    else:
        print(summary_json, file=sys.stderr)
    return 0


def cmd_strip(args) -> int:
    trees = T.load_tree_file(args.trees)
    with _out_stream(args) as out:
        for tree in trees:
            out.write(T.serialize(projection.strip_pseudo(tree)) + "\n")
    return 0


def cmd_subword(args) -> int:
    trees = T.load_tree_file(args.trees)
    segs = subword.load_segmentation_file(args.segmentation)
    if len(segs) != len(trees):
        raise FormatError(
            f"{len(trees)} trees but {len(segs)} segmentation lines",
            path=args.segmentation)
    with _out_stream(args) as out:
        for lineno, (tree, seg) in enumerate(zip(trees, segs), start=1):
            try:
                converted = subword.to_subword_tree(
                    tree, seg, marker=args.marker, style=args.marker_style)
            except ValueError as exc:
                raise FormatError(str(exc), lineno, args.segmentation) from None
            out.write(T.serialize(converted) + "\n")
    return 0


def cmd_gcn_check(args) -> int:
    trees = T.load_tree_file(args.trees)
    graphs = [graph.build_graph(t) for t in trees]
    labels = sorted({lab for g in graphs for lab in g.nt_labels})
    ok = True
    for idx, g in enumerate(graphs, start=1):
        stack, inits = sample_kink_free_instance(
            g, labels, args.d, args.layers, seed=args.seed + 1000 * idx,
            self_loops=args.self_loops)
        encoded = gcn.gcn_encode(g, inits, stack)
        oracle_diff = float(np.max(np.abs(
            encoded - dense_encode_reference(g, inits, stack))))
        grad_err = gcn_gradient_check(g, inits, stack,
                                      np.random.default_rng(args.seed + idx))
        line_ok = oracle_diff <= 1e-6 and grad_err <= 1e-4
        ok = ok and line_ok
        print(f"tree {idx}: nodes={g.num_nodes} edges={g.num_edges} "
              f"oracle_diff={oracle_diff:.3e} grad_rel_err={grad_err:.3e} "
              f"{'ok' if line_ok else 'FAIL'}")
    print("all checks passed" if ok else "CHECKS FAILED")
    return 0 if ok else 1


def cmd_fuse_demo(args) -> int:
    rng = np.random.default_rng(args.seed)
    h_syn = rng.standard_normal((4, args.d))
    h_basic = rng.standard_normal((4, args.d))
    fused = gcn.fuse(h_syn, h_basic, args.lam)
    slow = np.empty_like(fused)
    for i in range(fused.shape[0]):
        for j in range(fused.shape[1]):
            slow[i, j] = args.lam * h_syn[i, j] + (1.0 - args.lam) * h_basic[i, j]
    print(json.dumps({
        "lambda": args.lam,
        "seed": args.seed,
        "d": args.d,
        "h_syn": h_syn.tolist(),
        "h_basic": h_basic.tolist(),
        "h_final": fused.tolist(),
        "max_abs_diff_vs_scalar_loop": float(np.max(np.abs(fused - slow))),
    }, sort_keys=True))
    return 0


def _load_ensemble_inputs(args):
    src = _read_token_lines(args.source)
    hyps = [_read_token_lines(p) for p in args.hypotheses]
    for p, hyp in zip(args.hypotheses, hyps):
        if len(hyp) != len(src):
            raise FormatError(
                f"{len(hyp)} lines but source has {len(src)}", path=p)
    return src, hyps


def cmd_ensemble_train(args) -> int:
    src, hyps = _load_ensemble_inputs(args)
    gold_blocks = ed.load_m2_file(args.gold)
    if len(gold_blocks) != len(src):
        raise FormatError(
            f"{len(gold_blocks)} gold blocks but source has {len(src)} lines",
            path=args.gold)
    candidates: list[ensemble.EditCandidate] = []
    labels: list[float] = []
    for lineno, (tokens, (gold_src, gold_script)) in enumerate(
            zip(src, gold_blocks), start=1):
        if gold_src != tokens:
            raise FormatError("gold source does not match source file",
                              lineno, args.gold)
        sent_cands = ensemble.gather(tokens, [h[lineno - 1] for h in hyps])
        candidates.extend(sent_cands)
        labels.extend(ensemble.label_candidates(sent_cands, gold_script))
    if not candidates:
        raise FormatError("no edits proposed by any system; nothing to train on")
    model = ensemble.train(candidates, labels, lr=args.lr, epochs=args.epochs,
                           l2=args.l2, threshold=args.threshold)
    payload = json.dumps(ensemble.model_to_dict(model), sort_keys=True)
    with _out_stream(args) as out:
        out.write(payload + "\n")
    probs = model.predict_proba(np.stack([c.features() for c in candidates]))
    acc = float(np.mean((probs >= model.threshold) == np.asarray(labels, bool)))
    logger.info("trained on %d candidates, final loss %.6f, accuracy %.4f",
                len(candidates), model.final_loss, acc)
    return 0


def cmd_ensemble_apply(args) -> int:
    src, hyps = _load_ensemble_inputs(args)
    model = ensemble.load_model(args.model)
    if args.threshold is not None:
        model.threshold = args.threshold
    with _out_stream(args) as out:
        for i, tokens in enumerate(src):
            cands = ensemble.gather(tokens, [h[i] for h in hyps])
            out.write(" ".join(ensemble.select_and_apply(tokens, cands, model)) + "\n")
    return 0


def cmd_score(args) -> int:
    hyp_blocks = ed.load_m2_file(args.hypothesis)
    gold_blocks = ed.load_m2_file(args.gold)
    if len(hyp_blocks) != len(gold_blocks):
        raise FormatError(
            f"{len(hyp_blocks)} hypothesis blocks vs {len(gold_blocks)} gold blocks",
            path=args.hypothesis)
    for idx, ((hs, _), (gs, _)) in enumerate(zip(hyp_blocks, gold_blocks), start=1):
        if hs != gs:
            raise FormatError(
                f"block {idx}: hypothesis and gold source sentences differ",
                path=args.hypothesis)
    result = scoring.corpus_score(
        (h, g) for (_, h), (_, g) in zip(hyp_blocks, gold_blocks))
    with _out_stream(args) as out:
        out.write(result.to_json() + "\n")
    print(result.summary(), file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gecsyntax",
        description="Error-aware constituency trees and edit ensembles for GEC.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="extract per-line edit scripts as JSON")
    p.add_argument("parallel", help="TSV file: source<TAB>target per line")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("json", "m2"), default="json",
                   help="JSON lines (default) or S/A edit blocks")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("project", help="project target trees onto source sentences")
    p.add_argument("parallel")
    p.add_argument("trees", help="one bracketed target tree per line")
    p.add_argument("-o", "--output")
    p.add_argument("--summary", help="write the JSON summary here instead of stderr")
    p.add_argument("--pseudo-placement", choices=projection.PLACEMENTS,
                   default="below")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("strip", help="remove pseudo nodes from trees")
    p.add_argument("trees")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_strip)

    p = sub.add_parser("subword", help="convert word-level trees to subword level")
    p.add_argument("trees")
    p.add_argument("segmentation", help="TAB-separated words, space-separated pieces")
    p.add_argument("-o", "--output")
    p.add_argument("--marker", default="@@")
    p.add_argument("--marker-style", choices=("prefix", "suffix"), default="prefix")
    p.set_defaults(func=cmd_subword)

    p = sub.add_parser("gcn-check", help="verify the encoder against a dense "
                                         "oracle and finite differences")
    p.add_argument("trees")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=64)
    p.add_argument("--layers", type=int, default=3)
    p.add_argument("--self-loops", action="store_true")
    p.set_defaults(func=cmd_gcn_check)

    p = sub.add_parser("fuse-demo", help="demonstrate representation fusion")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=4)
    p.set_defaults(func=cmd_fuse_demo)

    p = sub.add_parser("ensemble-train", help="train the edit selector")
    p.add_argument("source")
    p.add_argument("hypotheses", nargs="+")
    p.add_argument("gold", help="gold edits in S/A block format")
    p.add_argument("-o", "--output")
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_ensemble_train)

    p = sub.add_parser("ensemble-apply", help="apply a trained edit selector")
    p.add_argument("source")
    p.add_argument("hypotheses", nargs="+")
    p.add_argument("model")
    p.add_argument("-o", "--output")
    p.add_argument("--threshold", type=float, default=None,
                   help="override the model's stored threshold")
    p.set_defaults(func=cmd_ensemble_apply)

    p = sub.add_parser("score", help="edit-level P/R/F0.5 of hypothesis vs gold")
    p.add_argument("hypothesis", help="hypothesis edits in S/A block format")
    p.add_argument("gold")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_score)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("CSYN_LOG", "warning").upper()
    logging.basicConfig(stream=sys.stderr,
                        level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: missing input file: {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
