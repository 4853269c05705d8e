"""Command-line surface for the pipeline.

Commands: extract-features, build-bags, gen-synth, train, evaluate, predict,
grad-check. Every command takes --config pointing at a plain-text config file;
flags override config keys. All randomness derives from the single configured
seed, and artifact files are reproducible byte for byte from (inputs, config,
seed). Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .checkpoint import load_checkpoint, save_checkpoint
from .config import RunConfig, load_run_config
from .dataset import build_bags, load_metadata, save_bags_csv
from .dsp import (
    FeatureConfig,
    downmix_and_validate,
    extract_feature_sets,
    feature_set_columns,
    feature_set_length,
    read_feature_csv,
    read_wav,
    write_feature_csv,
    write_mel_cache,
)
from .dsp.cache import format_value
from .dsp.summarize import set_slices
from .errors import (
    MattError,
    RuntimeFailure,
    SampleRateMismatch,
    ValidationError,
)
from .evaluation import evaluate
from .model import EncoderConfig, MattModel
from .numeric import finite_difference_check
from .synthetic import generate_synthetic
from .training import nll_loss, train, train_segment_baseline

log = logging.getLogger("matt")

LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class CliParser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on usage errors, per the CLI contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> CliParser:
    parser = CliParser(prog="matt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"matt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the run config file")
        p.add_argument("--seed", type=int, help="override the configured seed")
        return p

    p = add("extract-features", "extract and cache audio features for every track")
    p.add_argument("--feature-set", help="feature set to assemble (default from config)")
    p.add_argument("--workers", type=int, default=os.cpu_count(),
                   help="parallel extraction workers (default: logical cores)")

    p = add("build-bags", "group segments into album-artist bags and write bags.csv")
    p.add_argument("--label-policy", choices=("strict", "majority"),
                   help="bag label policy (default from config)")

    add("gen-synth", "generate the synthetic long-tail dataset and feature store")

    p = add("train", "train a genre classifier on bags")
    p.add_argument("--aggregator", choices=("matt", "mean"),
                   help="bag aggregation (default from config)")
    p.add_argument("--segment-level", action="store_true",
                   help="train the per-segment baseline (every segment its own bag)")
    p.add_argument("--epochs", type=int, help="override epoch count")
    p.add_argument("--feature-set", help="feature set to train on (default from config)")

    p = add("evaluate", "evaluate a checkpoint and write report files")
    p.add_argument("--mode", choices=("bag", "segment"), help="evaluation unit")
    p.add_argument("--checkpoint", help="checkpoint path (default from train)")
    p.add_argument("--feature-set", help="feature set (default from config)")
    p.add_argument("--aggregator", choices=("matt", "mean"))

    p = add("predict", "write per-track predictions from a checkpoint")
    p.add_argument("--checkpoint", help="checkpoint path (default from train)")
    p.add_argument("--tracks", help="comma-separated track ids (default: all cached)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--feature-set", help="feature set (default from config)")
    p.add_argument("--aggregator", choices=("matt", "mean"))

    p = add("grad-check", "finite-difference check the model gradients")
    p.add_argument("--feature-set", help="feature set fixing the input width")
    p.add_argument("--tolerance", type=float, default=1e-4)
    return parser


def _load_config(args) -> RunConfig:
    cfg = load_run_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.synth = type(cfg.synth)(**{**cfg.synth.__dict__, "seed": args.seed})
    for attr, key in (
        ("feature_set", "feature_set"),
        ("aggregator", "aggregator"),
        ("label_policy", "label_policy"),
        ("epochs", "epochs"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "mode", None):
        cfg.eval_mode = args.mode
    return cfg.validate()


# -- extract-features -- #

def _extract_one(task) -> str:
    """Worker: read one WAV, write its feature part and mel cache atomically."""
    from .dsp.stft import StftConfig

    track_id, wav_path, part_path, mel_path, sample_rate, n_fft, hop = task
    channels, rate = read_wav(wav_path)
    if rate != sample_rate:
        raise SampleRateMismatch(f"{wav_path}: {rate} Hz, configured {sample_rate} Hz")
    signal = downmix_and_validate(channels, rate)
    feat_cfg = FeatureConfig(sample_rate=sample_rate, stft=StftConfig(n_fft=n_fft, hop=hop))
    result = extract_feature_sets(signal, feat_cfg)
    vector = result.set_vector("1to9").astype(np.float32)
    tmp = f"{part_path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(track_id + "," + ",".join(format_value(float(v)) for v in vector) + "\n")
    os.replace(tmp, part_path)
    write_mel_cache(mel_path, result.mel.values)
    return track_id


def cmd_extract_features(args) -> int:
    cfg = _load_config(args)
    if cfg.feature_set == "synth":
        raise ValidationError("feature_set 'synth' comes from gen-synth, not extraction")
    table = load_metadata(cfg.metadata)
    parts_dir = cfg.feature_dir / "parts"
    mel_dir = cfg.feature_dir / "mel"
    parts_dir.mkdir(parents=True, exist_ok=True)
    mel_dir.mkdir(parents=True, exist_ok=True)

    tasks = []
    for rec in table.records:
        part = parts_dir / f"{rec.track_id}.part"
        mel = mel_dir / f"{rec.track_id}.mel"
        if part.exists() and mel.exists():
            continue  # resume: already extracted
        wav = cfg.audio_dir / f"{rec.track_id}.wav"
        if not wav.exists():
            raise ValidationError(f"missing audio file {wav}")
        tasks.append((rec.track_id, str(wav), str(part), str(mel),
                      cfg.sample_rate, cfg.n_fft, cfg.hop))

    if tasks:
        workers = max(1, args.workers or 1)
        if workers == 1 or len(tasks) == 1:
            for task in tasks:
                _extract_one(task)
        else:
            import multiprocessing

            with multiprocessing.Pool(workers) as pool:
                for _ in pool.imap_unordered(_extract_one, tasks):
                    pass
    log.info("extracted %d new tracks", len(tasks))

    # assemble the requested set from the per-track parts
    vectors = {}
    for rec in table.records:
        part = parts_dir / f"{rec.track_id}.part"
        line = part.read_text(encoding="utf-8").strip()
        track_id, _, rest = line.partition(",")
        vectors[track_id] = np.array([float(x) for x in rest.split(",")], dtype=np.float32)
    slices = set_slices(cfg.feature_set)
    rows = {
        tid: np.concatenate([vec[a:b] for a, b in slices]) for tid, vec in vectors.items()
    }
    out = cfg.feature_csv()
    write_feature_csv(out, feature_set_columns(cfg.feature_set), rows)
    print(f"wrote {out} ({len(rows)} tracks) and {len(vectors)} mel caches")
    return 0


# -- other commands -- #

def cmd_build_bags(args) -> int:
    cfg = _load_config(args)
    table = load_metadata(cfg.metadata)
    bags = build_bags(table, label_policy=cfg.label_policy)
    cfg.report_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.report_dir / "bags.csv"
    save_bags_csv(out, bags)
    sizes = [len(b) for b in bags.bags]
    print(
        f"wrote {out}: {len(bags.bags)} bags over {sum(sizes)} segments "
        f"(max bag {max(sizes)}, genres {len(bags.vocabulary)})"
    )
    return 0


def cmd_gen_synth(args) -> int:
    cfg = _load_config(args)
    data = generate_synthetic(cfg.synth)
    cfg.metadata.parent.mkdir(parents=True, exist_ok=True)
    cfg.feature_dir.mkdir(parents=True, exist_ok=True)

    lines = ["track_id,album_id,artist_id,genre,split"]
    for rec in data.table.records:
        genre = data.table.vocabulary.names[rec.genre_id]
        lines.append(f"{rec.track_id},{rec.album_id},{rec.artist_id},{genre},{rec.split}")
    cfg.metadata.write_text("\n".join(lines) + "\n", encoding="utf-8")

    columns = [f"synth_dim_{i}" for i in range(cfg.synth.feature_dim)]
    write_feature_csv(cfg.feature_dir / "synth.csv", columns, data.features)
    manifest = dict(sorted(cfg.synth.__dict__.items()))
    manifest["bag_size_range"] = list(cfg.synth.bag_size_range)
    (cfg.feature_dir / "synth.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(
        f"wrote {cfg.metadata} ({len(data.table.records)} segments, "
        f"{len(data.bags.bags)} bags) and {cfg.feature_dir / 'synth.csv'}"
    )
    return 0


def _load_features(cfg: RunConfig):
    path = cfg.feature_csv()
    if not path.exists():
        raise ValidationError(f"feature cache {path} not found; run extract-features")
    return read_feature_csv(path)


def _checkpoint_path(cfg: RunConfig, args, default_name: str) -> Path:
    if getattr(args, "checkpoint", None):
        return Path(args.checkpoint)
    return cfg.checkpoint_dir / default_name


def cmd_train(args) -> int:
    cfg = _load_config(args)
    table = load_metadata(cfg.metadata)
    features = _load_features(cfg)
    train_cfg = cfg.train_config()
    if args.segment_level:
        model, train_log = train_segment_baseline(table, features, train_cfg)
        name = "baseline.ckpt"
    else:
        bags = build_bags(table, label_policy=cfg.label_policy)
        model, train_log = train(bags, features, train_cfg)
        name = "matt.ckpt"
    cfg.checkpoint_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.checkpoint_dir / name
    save_checkpoint(out, model.params)
    train_log.write_csv(cfg.checkpoint_dir / f"{out.stem}_trainlog.csv")
    last = train_log.epochs[-1] if train_log.epochs else (0, float("nan"), 0.0, 0.0)
    print(f"wrote {out} after {len(train_log.epochs)} epochs "
          f"(loss {last[1]:.4f}, val acc {last[2]:.4f})")
    return 0


def _restore_model(cfg: RunConfig, args, table, features, default_name="matt.ckpt"):
    path = _checkpoint_path(cfg, args, default_name)
    if not Path(path).exists():
        raise ValidationError(f"checkpoint {path} not found; run train")
    raw = load_checkpoint(path)
    input_dim = len(next(iter(features.values())))
    encoder = EncoderConfig(
        input_dim=input_dim, hidden_dims=cfg.hidden_dims, output_dim=cfg.embedding_dim
    )
    model = MattModel(
        encoder,
        n_genres=len(table.vocabulary),
        aggregator=cfg.aggregator,
        seed=cfg.seed,
    )
    model.load_params(raw)
    return model


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    table = load_metadata(cfg.metadata)
    features = _load_features(cfg)
    model = _restore_model(cfg, args, table, features)
    bags = build_bags(table, label_policy=cfg.label_policy)
    report = evaluate(
        model, bags, features, mode=cfg.eval_mode, subsets=cfg.subsets, ks=cfg.ks
    )
    cfg.report_dir.mkdir(parents=True, exist_ok=True)
    report.write_text(cfg.report_dir / "report.txt")
    report.write_topk_csv(cfg.report_dir / "topk.csv")
    report.write_pr_csv(cfg.report_dir / "pr.csv")
    print(
        f"{cfg.eval_mode} accuracy {report.overall_accuracy:.4f}, "
        f"AP {report.average_precision:.4f}, reports in {cfg.report_dir}"
    )
    return 0


def cmd_predict(args) -> int:
    cfg = _load_config(args)
    table = load_metadata(cfg.metadata)
    features = _load_features(cfg)
    model = _restore_model(cfg, args, table, features)
    names = table.vocabulary.names
    if args.tracks:
        track_ids = args.tracks.split(",")
        missing = [t for t in track_ids if t not in features]
        if missing:
            raise ValidationError(f"no cached features for {missing}")
    else:
        track_ids = sorted(features)
    lines = []
    for track_id in track_ids:
        pred = model.predict_segment(features[track_id])
        p = pred.probabilities
        order = np.lexsort((np.arange(len(p)), -p))[:5]
        top5 = ";".join(f"{names[g]}:{format_value(float(p[g]))}" for g in order)
        attention = ";".join(format_value(float(a)) for a in pred.attention_weights)
        lines.append(
            f"{track_id},{names[int(order[0])]},{format_value(float(p[order[0]]))},"
            f"{top5},{attention}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out} ({len(lines)} predictions)")
    else:
        sys.stdout.write(text)
    return 0


def cmd_grad_check(args) -> int:
    cfg = _load_config(args)
    if cfg.feature_set == "synth":
        input_dim = cfg.synth.feature_dim
    else:
        input_dim = feature_set_length(cfg.feature_set)
    encoder = EncoderConfig(
        input_dim=input_dim, hidden_dims=cfg.hidden_dims, output_dim=cfg.embedding_dim
    )
    model = MattModel(encoder, n_genres=16, aggregator=cfg.aggregator, seed=cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    all_ok = True
    for m in (1, 2, 7):
        X = rng.standard_normal((m, input_dim))
        gold = int(rng.integers(0, 16))

        def loss_fn():
            return nll_loss(model.forward_bag(X), gold)[0]

        model.params.zero_grads()
        pred, cache = model.forward_bag(X, keep_cache=True)
        _, d_scores = nll_loss(pred, gold)
        model.backward_bag(cache, d_scores)
        report = finite_difference_check(
            loss_fn, model.params, tolerance=args.tolerance, max_elements=200, seed=cfg.seed
        )
        worst = max(r.max_rel_error for r in report.values())
        ok = all(r.passed for r in report.values())
        all_ok = all_ok and ok
        print(f"bag size {m}: max rel error {worst:.3e} "
              f"[{'pass' if ok else 'FAIL'} at {args.tolerance:g}]")
    if not all_ok:
        raise RuntimeFailure("gradient check failed")
    return 0


COMMANDS = {
    "extract-features": cmd_extract_features,
    "build-bags": cmd_build_bags,
    "gen-synth": cmd_gen_synth,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "grad-check": cmd_grad_check,
}


def main(argv=None) -> int:
    level = LOG_LEVELS.get(os.environ.get("MATT_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"matt: {exc}", file=sys.stderr)
        return 1
    except RuntimeFailure as exc:
        print(f"matt: {exc}", file=sys.stderr)
        return 2
    except MattError as exc:
        print(f"matt: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # unexpected: runtime error
        log.exception("unhandled error")
        print(f"matt: internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
