"""Command-line entry point: ``specmerge <command> [flags]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import corpus as C
from .clustering import spectral_cluster
from .errors import SpecMergeError
from .evalx import SyntheticSpec, generate_synthetic_corpus, run_stability_experiment, train_model
from .incremental import ClusterModel, build_model, distances_to_model, incremental_cluster, split_batches
from .io import (
    atomic_write,
    clustering_to_csv,
    fmt,
    matrix_to_csv,
    read_clustering_csv,
    spectral_function_to_csv,
    spectrum_to_csv,
)
from .laplacian import laplacian, spectrum
from .plot import spectral_functions_svg
from .spectra import MatchMethod, build_spectral_function

log = logging.getLogger("specmerge")

METHODS = ["clrl", "clssal", "clmxl", "nll"]


def _load(path, args) -> list[C.Document]:
    cfg = C.TokenizerConfig(args.min_token_len, _stopwords(args.stopwords))
    docs = C.ingest(C.read_jsonl(path), cfg, args.min_tokens)
    if not docs:
        raise SpecMergeError(f"{path}: no documents survive ingestion")
    kept, _ = C.vectorize(docs, args.weighting)
    return kept


def _stopwords(path) -> frozenset[str]:
    if not path:
        return frozenset()
    return frozenset(Path(path).read_text(encoding="utf-8").split())


def _relabel(docs, clusters_path):
    """Replace document labels by cluster ids read from a clustering CSV."""
    if not clusters_path:
        return docs
    table = read_clustering_csv(clusters_path)
    missing = [d.id for d in docs if d.id not in table]
    if missing:
        raise SpecMergeError(f"{len(missing)} document(s) missing from {clusters_path}, e.g. {missing[0]!r}")
    return [replace(d, label=table[d.id]) for d in docs]


# -- commands -----------------------------------------------------------------


def cmd_ingest(args):
    docs = _load(args.input, args)
    atomic_write(args.out, C.documents_to_jsonl(docs))
    if args.similarity_out:
        atomic_write(args.similarity_out, matrix_to_csv(C.similarity_of(docs, args.weighting).values))
    print(f"kept {len(docs)} documents")


def cmd_split(args):
    docs = C.read_jsonl(args.input)
    batches = split_batches(docs, args.batches, args.seed, args.k)
    for i, b in enumerate(batches):
        atomic_write(Path(args.out_dir) / f"{args.prefix}_{i}.jsonl", C.documents_to_jsonl(b))
    print("sizes " + " ".join(str(len(b)) for b in batches))


def cmd_cluster_batch(args):
    docs = _load(args.input, args)
    cl = spectral_cluster(C.similarity_of(docs, args.weighting), args.k, args.seed, threads=args.threads)
    atomic_write(args.out, clustering_to_csv([d.id for d in docs], cl.assignment))
    print(f"inertia={fmt(cl.inertia)}")


def cmd_spectrum(args):
    docs = _load(args.input, args)
    E = spectrum(laplacian(C.similarity_of(docs, args.weighting), args.laplacian))
    atomic_write(args.out, spectrum_to_csv(E))
    if args.function_out:
        method = MatchMethod.parse(args.method)
        atomic_write(args.function_out, spectral_function_to_csv(build_spectral_function(E, method)))


def cmd_train(args):
    docs = _relabel(_load(args.input, args), args.clusters)
    model = train_model(docs, MatchMethod.parse(args.method), args.weighting)
    atomic_write(args.out, model.to_json())
    print(f"trained {model.k} references: {', '.join(model.names)}")


def cmd_match(args):
    model = ClusterModel.from_json(Path(args.model).read_text(encoding="utf-8"))
    docs = _relabel(_load(args.input, args), args.clusters)
    groups: dict[str, list[C.Document]] = {}
    for d in docs:
        groups.setdefault(d.label if d.label is not None and not args.whole else "all", []).append(d)
    lines = ["group,n,assigned_id,assigned_name," + ",".join(f"dist_{n}" for n in model.names)]
    for name in sorted(groups):
        g = groups[name]
        if len(g) < 2:
            log.warning("group %r has %d document(s); skipped", name, len(g))
            continue
        dist = distances_to_model(C.similarity_of(g, args.weighting), model)
        c = int(np.argmin(dist))
        lines.append(f"{name},{len(g)},{c},{model.names[c]}," + ",".join(fmt(x) for x in dist))
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_pipeline(args):
    docs = _load(args.input, args)
    merged = incremental_cluster(
        docs,
        args.k,
        args.batches,
        MatchMethod.parse(args.method),
        args.seed,
        bijective=args.bijective,
        weighting=args.weighting,
        threads=args.threads,
    )
    atomic_write(args.out, merged.to_csv())
    if merged.model is not None:
        model_out = args.model_out or str(Path(args.out).with_suffix(".model.json"))
        atomic_write(model_out, merged.model.to_json())
    sizes = np.bincount(list(merged.assignment.values()), minlength=args.k)
    print(f"seed={args.seed} cluster sizes " + " ".join(str(s) for s in sizes))


def cmd_evaluate(args):
    train = _relabel(_load(args.train, args), args.clusters)
    pool = []
    for p in args.test:
        pool += _load(p, args)
    pool = _relabel(pool, args.clusters)
    res = run_stability_experiment(
        train,
        pool,
        MatchMethod.parse(args.method),
        args.trials,
        args.fraction,
        args.seed,
        weighting=args.weighting,
        threads=args.threads,
    )
    atomic_write(args.out, res.confusion.to_csv())
    if args.report:
        atomic_write(args.report, res.to_json())
    print(f"error_pct={res.error:.2f} macro_f1={res.f1:.2f}")


def cmd_generate(args):
    base = SyntheticSpec()
    groups = tuple(replace(g, docs=args.docs_per_group) for g in base.groups)
    docs = generate_synthetic_corpus(SyntheticSpec(groups=groups, overlap=args.overlap, seed=args.seed))
    atomic_write(args.out, C.documents_to_jsonl(docs))
    print(f"generated {len(docs)} documents")


def cmd_plot(args):
    curves = []
    for path in args.model:
        model = ClusterModel.from_json(Path(path).read_text(encoding="utf-8"))
        for cid, (name, F) in enumerate(zip(model.names, model.references)):
            curves.append((cid, name, F))
    atomic_write(args.out, spectral_functions_svg(curves, args.title))


# -- parser -------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, tokenizer: bool = True) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads; outputs do not depend on it")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    if tokenizer:
        p.add_argument("--weighting", choices=["tf", "tf-idf"], default="tf", help="term weighting (default tf)")
        p.add_argument("--min-token-len", type=int, default=2, help="shortest kept token (default 2)")
        p.add_argument("--min-tokens", type=int, default=10, help="drop documents with fewer tokens (default 10)")
        p.add_argument("--stopwords", help="file of whitespace-separated stopwords")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specmerge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="tokenize, filter and export a corpus")
    p.add_argument("--input", required=True, help="JSON Lines corpus (id, text, optional label)")
    p.add_argument("--out", required=True, help="filtered JSON Lines output")
    p.add_argument("--similarity-out", help="optional CSV of the cosine similarity matrix")
    _common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="random near-equal batches")
    p.add_argument("--input", required=True)
    p.add_argument("--batches", type=int, required=True, help="number of batches (m+1)")
    p.add_argument("--k", type=int, default=1, help="clusters per batch, for the size check")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--prefix", default="batch", help="output files are <prefix>_<i>.jsonl")
    _common(p, tokenizer=False)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("cluster-batch", help="spectral clustering of one batch")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True, help="CSV doc_id,cluster")
    _common(p)
    p.set_defaults(func=cmd_cluster_batch)

    p = sub.add_parser("spectrum", help="Laplacian eigenvalues of a document set")
    p.add_argument("--input", required=True)
    p.add_argument("--laplacian", choices=["combinatorial", "normalized"], default="combinatorial")
    p.add_argument("--out", required=True, help="CSV index,eigenvalue")
    p.add_argument("--method", choices=METHODS, default="clssal", help="method for --function-out")
    p.add_argument("--function-out", help="also write the spectral function CSV")
    _common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("train", help="reference spectra per label (or per cluster)")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--clusters", help="CSV doc_id,cluster; groups by cluster instead of label")
    p.add_argument("--out", required=True, help="model JSON")
    _common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("match", help="assign document groups to a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--clusters", help="CSV doc_id,cluster; groups by cluster instead of label")
    p.add_argument("--whole", action="store_true", help="match the whole input as one group")
    p.add_argument("--out", help="CSV output (default stdout)")
    _common(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("pipeline", help="batch clustering merged by spectrum matching")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--batches", type=int, required=True, help="number of batches (m+1)")
    p.add_argument("--method", choices=METHODS, default="clssal")
    p.add_argument("--bijective", action="store_true", help="one-to-one matching of each batch's clusters")
    p.add_argument("--out", required=True, help="CSV doc_id,global_cluster,batch,local_cluster")
    p.add_argument("--model-out", help="model JSON (default: <out>.model.json)")
    _common(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("evaluate", help="stability experiment over random subsamples")
    p.add_argument("--train", required=True, help="training portion (labelled JSON Lines)")
    p.add_argument("--test", required=True, nargs="+", help="test portion(s), pooled")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--fraction", type=float, default=0.5, help="per-class subsample fraction (default 0.5)")
    p.add_argument("--clusters", help="CSV doc_id,cluster covering train and test; replaces labels")
    p.add_argument("--out", required=True, help="confusion matrix CSV")
    p.add_argument("--report", help="JSON report")
    _common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("generate", help="synthetic labelled corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--docs-per-group", type=int, default=500)
    p.add_argument("--overlap", type=float, default=0.0, help="shared-vocabulary token fraction in [0, 1]")
    _common(p, tokenizer=False)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("plot", help="SVG of the reference spectral functions of model(s)")
    p.add_argument("--model", required=True, nargs="+", help="one or more model JSON files")
    p.add_argument("--out", required=True)
    p.add_argument("--title", default="")
    _common(p, tokenizer=False)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except (SpecMergeError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
