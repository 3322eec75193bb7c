"""Command-line front end: metrics, mos, train, benchmark.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 SVR convergence failure.
Progress goes to stderr as one JSON object per line; results only go to files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .audio import NATIVE_AUDIO_METRICS, evaluate_clip
from .evaluation import average_reports, compute_mos, run_benchmark, split_by_content, write_mos_csv
from .evaluation.benchmark import BenchmarkError
from .fusion import (
    METHODS,
    SvrConfig,
    SvrConvergenceError,
    SvrError,
    WeightedProductModel,
    train_feature_svr,
    train_score_svr,
)
from .media_io import ManifestEntry, MediaError, load_manifest, read_ratings, read_wav, read_yuv_sequence
from .registry import AUDIO_MODELS, VIDEO_MODELS
from .sphere import DEFAULT_SPHERE_POINTS, sphere_samples
from .store import ScoreRecord, ScoreStore, ScoreStoreError, atomic_write_text, write_score_csv
from .video import NATIVE_VIDEO_METRICS
from .video.psnr import s_psnr

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_CONVERGENCE = 0, 2, 3, 4
FAILURES_FILE = "_failures.csv"

log = logging.getLogger("oavqa")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    manifest: Path | None = None
    out: Path = Path("out")
    video_models: tuple[str, ...] = tuple(VIDEO_MODELS)
    audio_models: tuple[str, ...] = tuple(AUDIO_MODELS)
    methods: tuple[str, ...] = METHODS
    svr: SvrConfig = field(default_factory=SvrConfig)
    seed: int = 0
    jobs: int = 1
    sphere_points: int = DEFAULT_SPHERE_POINTS
    external_scores: Path | None = None
    scores: Path | None = None
    width: int | None = None
    height: int | None = None
    repeats: int = 1
    single_mode_only: bool = False

    def __post_init__(self):
        for m in self.video_models:
            if m not in VIDEO_MODELS:
                raise ConfigError(f"unknown video model {m!r}; known: {', '.join(VIDEO_MODELS)}")
        for m in self.audio_models:
            if m not in AUDIO_MODELS:
                raise ConfigError(f"unknown audio model {m!r}; known: {', '.join(AUDIO_MODELS)}")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown fusion method {m!r}")
        if self.jobs < 1 or self.repeats < 1:
            raise ConfigError("--jobs and --repeats must be positive")
        if self.sphere_points < 12:
            raise ConfigError("--sphere-points must be at least 12")

    def score_dirs(self) -> list[Path]:
        return [d for d in (self.scores or self.out, self.external_scores) if d is not None]


def progress(event: str, **kw) -> None:
    print(json.dumps({"event": event, "time": round(time.time(), 3), **kw}), file=sys.stderr, flush=True)


def _model_list(text: str | None, known: Sequence[str]) -> tuple[str, ...]:
    if text is None or text.strip().lower() == "all":
        return tuple(known)
    if text.strip().lower() == "none":
        return ()
    return tuple(m.strip().lower() for m in text.split(",") if m.strip())


def _frame_size(entry: ManifestEntry, cfg: RunConfig) -> tuple[int, int]:
    w = entry.width or cfg.width
    h = entry.height or cfg.height
    if not w or not h:
        raise ConfigError(f"entry {entry.id}: frame size unknown; add width/height columns or pass --width/--height")
    return w, h


# ---------------------------------------------------------------- metrics


def _compute_entry(entry: ManifestEntry, size: tuple[int, int], video: Sequence[str], audio: Sequence[str],
                   sphere_points: int) -> list[ScoreRecord]:
    """Worker body: all requested native metrics for one manifest entry."""
    recs = []
    if video:
        w, h = size
        ref = read_yuv_sequence(entry.reference_video_path, w, h)
        dist = read_yuv_sequence(entry.distorted_video_path, w, h)
        for m in video:
            if m == "s-psnr":
                res = s_psnr(ref, dist, sphere_samples(sphere_points))
            else:
                res = NATIVE_VIDEO_METRICS[m](ref, dist)
            recs.append(ScoreRecord(entry.id, m, res.score, tuple(float(f) for f in res.features)))
    if audio:
        ra, da = read_wav(entry.reference_audio_path), read_wav(entry.distorted_audio_path)
        for m in audio:
            res = evaluate_clip(NATIVE_AUDIO_METRICS[m], ra, da)
            recs.append(ScoreRecord(entry.id, m, res.score, tuple(float(f) for f in res.features)))
    return recs


def cmd_metrics(cfg: RunConfig) -> int:
    manifest = load_manifest(cfg.manifest)
    cfg.out.mkdir(parents=True, exist_ok=True)
    store = ScoreStore.load(cfg.out)
    external = ScoreStore.load(cfg.external_scores) if cfg.external_scores else ScoreStore()

    for m in [*cfg.video_models, *cfg.audio_models]:
        if m in NATIVE_VIDEO_METRICS or m in NATIVE_AUDIO_METRICS:
            continue
        # external model: copy supplied rows into the output store
        for e in manifest:
            if external.has(m, e.id) and not store.has(m, e.id):
                store.add(external.get(m, e.id))

    failures: list[tuple[str, str, str]] = []
    todo = []
    for e in manifest:
        v = [m for m in cfg.video_models if m in NATIVE_VIDEO_METRICS and not store.has(m, e.id)]
        a = [m for m in cfg.audio_models if m in NATIVE_AUDIO_METRICS and not store.has(m, e.id)]
        for m in [*cfg.video_models, *cfg.audio_models]:
            if m not in NATIVE_VIDEO_METRICS and m not in NATIVE_AUDIO_METRICS and not store.has(m, e.id):
                failures.append((e.id, m, "no external score supplied"))
        if v or a:
            todo.append((e, _frame_size(e, cfg) if v else (0, 0), v, a))
    progress("metrics_start", entries=len(manifest), pending=len(todo), jobs=cfg.jobs)

    def record(entry, started, result=None, error=None):
        if error is not None:
            failures.append((entry.id, "*", str(error)))
            progress("entry_failed", id=entry.id, error=str(error))
            return
        for rec in result:
            store.add(rec)
        for model in {r.model for r in result}:
            write_score_csv(cfg.out / f"{model}.csv", store.data[model].values())
        progress("entry_done", id=entry.id, models=[r.model for r in result], seconds=round(time.time() - started, 3))

    if cfg.jobs == 1:
        for e, size, v, a in todo:
            t0 = time.time()
            try:
                record(e, t0, _compute_entry(e, size, v, a, cfg.sphere_points))
            except (MediaError, OSError, ValueError) as exc:
                record(e, t0, error=exc)
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            t0 = time.time()
            futures = [(e, pool.submit(_compute_entry, e, size, v, a, cfg.sphere_points)) for e, size, v, a in todo]
            for e, fut in futures:
                try:
                    record(e, t0, fut.result())
                except (MediaError, OSError, ValueError) as exc:
                    record(e, t0, error=exc)

    store.save(cfg.out)
    if failures:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "model", "error"])
        writer.writerows(failures)
        atomic_write_text(cfg.out / FAILURES_FILE, buf.getvalue())
    elif (cfg.out / FAILURES_FILE).exists():
        (cfg.out / FAILURES_FILE).unlink()
    progress("metrics_done", failed=len(failures))
    return EXIT_DATA if failures else EXIT_OK


# ---------------------------------------------------------------- mos


def cmd_mos(ratings_path: Path, out: Path) -> int:
    table = compute_mos(read_ratings(ratings_path))
    out.parent.mkdir(parents=True, exist_ok=True)
    write_mos_csv(out, table)
    progress("mos_done", sequences=len(table.sequence_ids))
    return EXIT_OK


# ---------------------------------------------------------------- train


def _rated_ids(entries) -> tuple[list[str], list[float]]:
    rated = [e for e in entries if e.mos is not None]
    return [e.id for e in rated], [e.mos for e in rated]


def cmd_train(cfg: RunConfig) -> int:
    manifest = load_manifest(cfg.manifest)
    store = ScoreStore.load(*cfg.score_dirs())
    plan = split_by_content(manifest, cfg.seed)
    train_entries, _ = plan.partition(manifest)
    ids, mos = _rated_ids(train_entries)
    cfg.out.mkdir(parents=True, exist_ok=True)
    summary = {
        "seed": cfg.seed,
        "train_contents": list(plan.train_contents),
        "test_contents": list(plan.test_contents),
        "svr": {"gamma": cfg.svr.gamma, "C": cfg.svr.C, "epsilon": cfg.svr.epsilon, "tol": cfg.svr.tol},
        "models": [],
    }
    for v in cfg.video_models:
        for a in cfg.audio_models:
            for method in cfg.methods:
                name = f"{method}__{v}__{a}.json"
                if method == "wp":
                    model = WeightedProductModel.fit(v, a, store.scores(v, ids), store.scores(a, ids), mos)
                    info = {"w": model.w}
                elif method == "svr-score":
                    model = train_score_svr(v, a, store.scores(v, ids), store.scores(a, ids), mos, cfg.svr)
                    info = dict(model.diagnostics, inputs=list(model.schema))
                else:
                    model = train_feature_svr(v, a, store.features(v, ids), store.features(a, ids), mos, cfg.svr)
                    info = dict(model.diagnostics, inputs=list(model.schema))
                atomic_write_text(cfg.out / name, model.to_json())
                summary["models"].append({"file": name, "method": method, "video": v, "audio": a, **info})
                progress("model_trained", file=name)
    atomic_write_text(cfg.out / "training_summary.json", json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- benchmark


def cmd_benchmark(cfg: RunConfig) -> int:
    manifest = load_manifest(cfg.manifest)
    store = ScoreStore.load(*cfg.score_dirs())
    methods = () if cfg.single_mode_only else cfg.methods
    plans = [split_by_content(manifest, cfg.seed + r) for r in range(cfg.repeats)]
    args = (cfg.video_models, cfg.audio_models, methods, cfg.svr)
    if cfg.jobs == 1 or len(plans) == 1:
        reports = [run_benchmark(manifest, store, plan, *args) for plan in plans]
    else:
        # one split per worker; results keep seed order
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(run_benchmark, manifest, store, plan, *args) for plan in plans]
            reports = [f.result() for f in futures]
    for plan, rep in zip(plans, reports):
        progress("benchmark_split_done", seed=plan.seed, cells=len(rep.cells))
    report = reports[0] if len(reports) == 1 else average_reports(reports)
    cfg.out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(cfg.out / "report.csv", report.to_csv())
    atomic_write_text(cfg.out / "report.txt", report.to_text())
    return EXIT_OK


# ---------------------------------------------------------------- parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oavqa", description="Audio-visual quality metrics, fusion and benchmarking.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default):
        sp.add_argument("--manifest", type=Path, required=True)
        sp.add_argument("--out", type=Path, default=Path(out_default))
        sp.add_argument("--video-models", help="comma list, 'all' or 'none'")
        sp.add_argument("--audio-models", help="comma list, 'all' or 'none'")
        sp.add_argument("--external-scores", type=Path, metavar="DIR")
        sp.add_argument("-v", "--verbose", action="store_true")

    def fusion(sp):
        sp.add_argument("--scores", type=Path, metavar="DIR", help="score-store directory (default: --out)")
        sp.add_argument("--method", action="append", choices=METHODS, help="repeatable; default all")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--gamma", type=float, default=SvrConfig.gamma)
        sp.add_argument("--c", type=float, default=SvrConfig.C)
        sp.add_argument("--epsilon", type=float, default=SvrConfig.epsilon)

    m = sub.add_parser("metrics", help="compute single-mode scores into a score store")
    common(m, "scores")
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--sphere-points", type=int, default=DEFAULT_SPHERE_POINTS)
    m.add_argument("--width", type=int)
    m.add_argument("--height", type=int)

    o = sub.add_parser("mos", help="convert raw ratings to MOS")
    o.add_argument("--ratings", type=Path, required=True)
    o.add_argument("--out", type=Path, default=Path("mos.csv"))
    o.add_argument("-v", "--verbose", action="store_true")

    t = sub.add_parser("train", help="fit fusion models on the training contents")
    common(t, "models")
    fusion(t)

    b = sub.add_parser("benchmark", help="fit and score every model combination")
    common(b, "report")
    fusion(b)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--repeats", type=int, default=1, help="average over this many consecutive seeds")
    b.add_argument("--single-mode-only", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    kw = dict(
        manifest=args.manifest,
        out=args.out,
        video_models=_model_list(args.video_models, VIDEO_MODELS),
        audio_models=_model_list(args.audio_models, AUDIO_MODELS),
        external_scores=args.external_scores,
    )
    for name in ("jobs", "sphere_points", "width", "height", "seed", "scores", "repeats", "single_mode_only"):
        if hasattr(args, name):
            kw[name] = getattr(args, name)
    if hasattr(args, "method"):
        kw["methods"] = tuple(dict.fromkeys(args.method)) if args.method else METHODS
        try:
            kw["svr"] = SvrConfig(gamma=args.gamma, C=args.c, epsilon=args.epsilon)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return RunConfig(**kw)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "mos":
            return cmd_mos(args.ratings, args.out)
        cfg = config_from_args(args)
        if cfg.manifest is not None and not cfg.manifest.is_file():
            raise ConfigError(f"manifest not found: {cfg.manifest}")
        return {"metrics": cmd_metrics, "train": cmd_train, "benchmark": cmd_benchmark}[args.command](cfg)
    except ConfigError as exc:
        progress("error", kind="config", message=str(exc))
        return EXIT_CONFIG
    except SvrConvergenceError as exc:
        progress("error", kind="convergence", message=str(exc))
        return EXIT_CONVERGENCE
    except (MediaError, ScoreStoreError, BenchmarkError, SvrError, OSError, ValueError) as exc:
        progress("error", kind="data", message=str(exc))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
