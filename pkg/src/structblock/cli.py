"""Command line interface: ``structblock <command> ...``.

Exit codes: 0 success, 2 usage error, 3 data/I-O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .blocks import block_record
from .config import apply_overrides, field_names, read_kv, write_kv
from .corpus import (
    DIALECTS,
    build_vocab,
    dataset_stats,
    ingest_split,
    load_corpus,
    load_embeddings,
    read_conllu,
    read_manifest,
    read_raw,
    save_corpus,
)
from .errors import DataError, GradCheckError, StructBlockError
from .metrics import SCORE_MODES, emit_confusion, write_metrics
from .model import ModelConfig, load_checkpoint, save_checkpoint
from .train import TrainConfig, ablation, evaluate, format_ablation, train

logger = logging.getLogger("structblock")

DATA_ENV = "STRUCTBLOCK_DATA"
RAW_NAMES = {
    "train": ("train.txt", "TRAIN_FILE.TXT"),
    "test": ("test.txt", "TEST_FILE_FULL.TXT", "TEST_FILE.TXT"),
}
# fields set from the data, never from the command line
_DERIVED = {"vocab_size", "num_classes", "d_pos", "d_dep"}


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _resolve(path, data_dir):
    p = Path(path)
    if p.exists() or p.is_absolute() or data_dir is None:
        return p
    alt = Path(data_dir) / p
    return alt if alt.exists() else p


def _need(path):
    if not Path(path).exists():
        raise DataError(f"no such file or directory: {path}")
    return path


def write_manifest(path, args, inputs, config=None, seed=None, artifacts=()):
    """Record everything needed to replay a command."""
    manifest = {
        "tool_version": __version__,
        "command": args.command,
        "argv": args.argv,
        "cwd": os.getcwd(),
        "inputs": {str(Path(p).resolve()): file_digest(p) for p in inputs if Path(p).is_file()},
        "config": config,
        "seed": seed,
        "artifacts": [str(a) for a in artifacts],
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return manifest


def _run_dir(out_dir, seed, name=None):
    name = name or f"{time.strftime('%Y%m%d-%H%M%S')}-seed{seed}"
    d = Path(out_dir) / name
    d.mkdir(parents=True, exist_ok=True)
    return d


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _add_config_flags(p):
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--seed", type=int)
    for cls in (ModelConfig, TrainConfig):
        for f in dataclasses.fields(cls):
            if f.name in _DERIVED or f.name == "seed":
                continue
            p.add_argument("--" + f.name.replace("_", "-"), dest="cfg_" + f.name, metavar="V")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--with-children", dest="children", action="store_const", const=True)
    g.add_argument("--without-children", dest="children", action="store_const", const=False)
    p.add_argument("--embeddings", help="GloVe-format text file")


def resolve_configs(args, vocab=None, embedding_dim=None):
    values = read_kv(args.config) if args.config else {}
    unknown = set(values) - field_names(ModelConfig) - field_names(TrainConfig)
    if unknown:
        raise DataError(f"unknown configuration keys: {sorted(unknown)}")
    for key, v in vars(args).items():
        if key.startswith("cfg_") and v is not None:
            values[key[4:]] = v
    if args.seed is not None:
        values["seed"] = args.seed
    if getattr(args, "children", None) is not None:
        values["include_children"] = args.children
    if embedding_dim is not None:
        if "d_w" in values and int(values["d_w"]) != embedding_dim:
            raise DataError(f"d_w={values['d_w']} but embeddings have dimension {embedding_dim}")
        values["d_w"] = embedding_dim
    for k in _DERIVED:
        values.pop(k, None)
    if vocab is not None:
        values["vocab_size"] = len(vocab.words)
        values["num_classes"] = max(len(vocab.labels), 1)
    return apply_overrides(ModelConfig(), values), apply_overrides(TrainConfig(), values)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _find_split_file(directory, split, names):
    d = Path(directory)
    if d.is_file():
        return d if split == "train" else None
    for n in names:
        if (d / n).exists():
            return d / n
    return None


def cmd_ingest(args):
    raw_dir = _need(_resolve(args.raw, args.data_dir))
    conllu_dir = _need(_resolve(args.conllu, args.data_dir))
    splits = {}
    inputs = []
    for split in ("train", "test"):
        raw = _find_split_file(raw_dir, split, RAW_NAMES[split])
        if raw is None:
            continue
        conllu = _find_split_file(conllu_dir, split, (f"{split}.conllu",))
        if conllu is None:
            raise DataError(f"no {split}.conllu under {conllu_dir}")
        manifest = getattr(args, f"{split}_manifest") or _find_split_file(
            conllu_dir, split, (f"{split}.manifest.jsonl",)
        )
        splits[split] = (raw, conllu, manifest)
        inputs += [p for p in (raw, conllu, manifest) if p]
    if "train" not in splits:
        raise DataError(f"no training file found under {raw_dir}")
    write_manifest(str(args.out) + ".manifest.json", args, inputs, artifacts=[args.out])
    instances, reports = {}, []
    for split, (raw, conllu, manifest) in splits.items():
        raws = read_raw(raw, args.dialect)
        with open(conllu, encoding="utf-8") as fh:
            parses = read_conllu(fh, args.tag_column, args.strip_deprel_subtypes)
        mapping = None
        if manifest:
            with open(manifest, encoding="utf-8") as fh:
                mapping = read_manifest(fh)
        instances[split], rep = ingest_split(raws, parses, split, mapping, strict=args.strict)
        reports.append(rep)
    vocab = build_vocab(instances["train"], instances.get("test", []))
    save_corpus(args.out, args.dialect, vocab, instances["train"], instances.get("test", []), reports)
    summary = {r.split: {"total": r.total, "kept": r.kept, "skipped": len(r.skipped)} for r in reports}
    print(json.dumps({"out": str(args.out), "splits": summary,
                      "vocab": {k: len(v) for k, v in vocab.to_json().items()}}, sort_keys=True))
    return 0


def cmd_stats(args):
    path = _need(_resolve(args.path, args.data_dir))
    if Path(path).is_dir():
        if not args.dialect:
            raise DataError("--dialect is required when reading raw files")
        splits = {}
        for split in ("train", "test"):
            f = _find_split_file(path, split, RAW_NAMES[split])
            if f is not None:
                splits[split] = read_raw(f, args.dialect)
        dialect = args.dialect
    else:
        corpus = load_corpus(path)
        splits = {"train": corpus.train, "test": corpus.test}
        dialect = corpus.dialect
    stats = dataset_stats(splits)
    stats["dialect"] = dialect
    text = json.dumps(stats, indent=2, sort_keys=True)
    if args.out:
        write_manifest(str(args.out) + ".manifest.json", args, [path], artifacts=[args.out])
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_blocks(args):
    path = _need(_resolve(args.corpus, args.data_dir))
    corpus = load_corpus(path)
    include = args.children if args.children is not None else True
    write_manifest(str(args.out) + ".manifest.json", args, [path], artifacts=[args.out])
    insts = {"train": corpus.train, "test": corpus.test, "all": corpus.train + corpus.test}[args.split]
    with open(args.out, "w", encoding="utf-8") as fh:
        for inst in insts:
            fh.write(json.dumps(block_record(inst, include), ensure_ascii=False) + "\n")
    return 0


def _train_eval_split(corpus, args, seed):
    if args.eval_on == "test":
        return corpus.train, corpus.test
    rng = np.random.default_rng(seed)
    n = len(corpus.train)
    n_dev = int(round(args.dev_fraction * n))
    perm = rng.permutation(n)
    dev = set(perm[:n_dev].tolist())
    train_set = [x for i, x in enumerate(corpus.train) if i not in dev]
    dev_set = [x for i, x in enumerate(corpus.train) if i in dev]
    return train_set, dev_set


def _load_for_training(args):
    path = _need(_resolve(args.corpus, args.data_dir))
    corpus = load_corpus(path)
    emb = None
    inputs = [path]
    if args.embeddings:
        epath = _need(_resolve(args.embeddings, args.data_dir))
        emb = load_embeddings(epath, corpus.vocab)
        inputs.append(epath)
        logger.info("embedding coverage %.3f", emb.coverage)
    mcfg, tcfg = resolve_configs(args, corpus.vocab, emb.dim if emb else None)
    return corpus, emb, mcfg, tcfg, inputs


def cmd_train(args):
    corpus, emb, mcfg, tcfg, inputs = _load_for_training(args)
    run = _run_dir(args.out_dir, mcfg.seed, args.run_name)
    artifacts = [run / n for n in ("model.ckpt", "history.csv", "timing.csv", "config.txt", "metrics.json")]
    resolved = {"model": mcfg.to_dict(), "train": dataclasses.asdict(tcfg),
                "eval_on": args.eval_on, "dev_fraction": args.dev_fraction}
    write_manifest(run / "manifest.json", args, inputs, resolved, mcfg.seed, artifacts)
    (run / "config.txt").write_text(write_kv(mcfg) + write_kv(tcfg), encoding="utf-8")
    train_set, eval_set = _train_eval_split(corpus, args, mcfg.seed)

    ck, hist = train(mcfg, tcfg, train_set, eval_set, corpus.vocab, emb)
    save_checkpoint(ck.params, run / "model.ckpt", ck.vocab_digests, ck.metadata)
    (run / "history.csv").write_text(hist.to_csv(), encoding="utf-8")
    (run / "timing.csv").write_text(hist.timing_csv(), encoding="utf-8")
    if corpus.test:
        metrics, _ = evaluate(ck, corpus.test, corpus.vocab, tcfg.score_mode)
        metrics.epoch_seconds = hist.mean_epoch_seconds
        write_metrics(metrics, run / "metrics.json")
    print(str(run))
    return 0


def cmd_eval(args):
    path = _need(_resolve(args.corpus, args.data_dir))
    ck_paths = [_need(_resolve(p, args.data_dir)) for p in args.checkpoints]
    corpus = load_corpus(path)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts = [out / n for n in ("metrics.json", "confusion.csv", "confusion_classes.csv")]
    write_manifest(out / "manifest.json", args, [path, *ck_paths], artifacts=artifacts)
    checkpoints = [load_checkpoint(p) for p in ck_paths]
    insts = corpus.test if args.split == "test" else corpus.train
    metrics, _ = evaluate(checkpoints, insts, corpus.vocab, args.score_mode)
    write_metrics(metrics, out / "metrics.json")
    emit_confusion(metrics, out / "confusion.csv", corpus.dialect)
    emit_confusion(metrics, out / "confusion_classes.csv", corpus.dialect, collapse=True)
    print(json.dumps({"macro_f1": metrics.macro_f1, "accuracy": metrics.accuracy,
                      "mode": metrics.mode, "checkpoints": len(checkpoints)}))
    return 0


def cmd_ablation(args):
    corpus, emb, mcfg, tcfg, inputs = _load_for_training(args)
    run = _run_dir(args.out_dir, mcfg.seed, args.run_name)
    resolved = {"model": mcfg.to_dict(), "train": dataclasses.asdict(tcfg)}
    write_manifest(run / "manifest.json", args, inputs, resolved, mcfg.seed,
                   [run / "ablation.txt", run / "ablation.json"])
    train_set, eval_set = _train_eval_split(corpus, args, mcfg.seed)
    test_set = corpus.test or eval_set
    results = ablation(mcfg, tcfg, train_set, test_set if args.eval_on == "test" else eval_set,
                       corpus.vocab, emb)
    report = format_ablation(results, corpus.dialect)
    (run / "ablation.txt").write_text(report, encoding="utf-8")
    (run / "ablation.json").write_text(json.dumps(
        {k: {"macro_f1": m.macro_f1, "epoch_seconds": m.epoch_seconds, "epochs": len(h.epochs)}
         for k, (m, h) in results.items()}, indent=2, sort_keys=True), encoding="utf-8")
    print(report, end="")
    return 0


def cmd_gradcheck(args):
    from .gradsuite import MINI_CONFIG, TOLERANCE, run_gradient_suite

    config = MINI_CONFIG
    if args.config:
        config = apply_overrides(config, read_kv(args.config))
    results, seconds = run_gradient_suite(config, seed=args.seed or 0)
    worst = 0.0
    for name, err in results:
        status = "ok" if err < TOLERANCE else "FAIL"
        worst = max(worst, err)
        print(f"{name:<28} {err:.3e} {status}")
    print(f"max relative error {worst:.3e} over {len(results)} checks in {seconds:.1f}s")
    if worst >= TOLERANCE:
        raise GradCheckError(f"gradient check failed: {worst:.3e} >= {TOLERANCE}")
    return 0


def cmd_replay(args):
    manifest = json.loads(Path(_need(args.manifest)).read_text(encoding="utf-8"))
    for p, digest in manifest["inputs"].items():
        if not Path(p).exists() or file_digest(p) != digest:
            raise DataError(f"input {p} changed since the manifest was written")
    argv = list(manifest["argv"])
    replayed = build_parser().parse_args(argv)
    replayed.argv = argv
    if args.out_dir:
        if not hasattr(replayed, "out_dir"):
            raise DataError(f"command {replayed.command!r} has no output directory to redirect")
        replayed.out_dir = args.out_dir
    cwd = os.getcwd()
    os.chdir(manifest["cwd"])
    try:
        return replayed.func(replayed)
    finally:
        os.chdir(cwd)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="structblock", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--threads", type=int, help="cap on BLAS worker threads")
    p.add_argument("--data-dir", default=os.environ.get(DATA_ENV),
                   help=f"base for relative input paths (default ${DATA_ENV})")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    s = sub.add_parser("ingest", parents=[common], help="align raw relation files with CoNLL-U parses")
    s.add_argument("raw", help="raw file directory (train.txt/test.txt) or a single file")
    s.add_argument("conllu", help="directory with train.conllu/test.conllu (+ manifests)")
    s.add_argument("out", help="output corpus JSON")
    s.add_argument("--dialect", choices=DIALECTS, required=True)
    s.add_argument("--tag-column", choices=("upos", "xpos"), default="upos")
    s.add_argument("--strip-deprel-subtypes", action="store_true")
    s.add_argument("--train-manifest")
    s.add_argument("--test-manifest")
    s.add_argument("--strict", action="store_true", help="fail on invalid trees instead of skipping")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("stats", parents=[common], help="dataset statistics as JSON")
    s.add_argument("path", help="corpus JSON, or raw file directory with --dialect")
    s.add_argument("--dialect", choices=DIALECTS)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("blocks", parents=[common], help="write structural blocks as JSON lines")
    s.add_argument("corpus")
    s.add_argument("out")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--with-children", dest="children", action="store_const", const=True)
    g.add_argument("--without-children", dest="children", action="store_const", const=False)
    s.add_argument("--split", choices=("train", "test", "all"), default="all")
    s.set_defaults(func=cmd_blocks, children=None)

    for name, func, helptext in (("train", cmd_train, "train a model"),
                                 ("ablation", cmd_ablation, "with/without-children comparison")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("corpus")
        s.add_argument("out_dir", nargs="?", default="runs")
        s.add_argument("--run-name", help="run directory name (default: timestamp + seed)")
        s.add_argument("--eval-on", choices=("dev", "test"), default="dev",
                       help="early-stopping set: held-out part of train, or the test split")
        s.add_argument("--dev-fraction", type=float, default=0.1)
        _add_config_flags(s)
        s.set_defaults(func=func)

    s = sub.add_parser("eval", parents=[common], help="evaluate a checkpoint or an ensemble")
    s.add_argument("checkpoints", nargs="+")
    s.add_argument("corpus")
    s.add_argument("out_dir")
    s.add_argument("--split", choices=("train", "test"), default="test")
    s.add_argument("--score-mode", choices=SCORE_MODES, default="official")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("gradcheck", parents=[common], help="finite-difference gradient suite")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_gradcheck)

    s = sub.add_parser("replay", parents=[common], help="re-run a command from its manifest")
    s.add_argument("manifest")
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_replay)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=args.threads):
                return args.func(args)
        return args.func(args)
    except StructBlockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
