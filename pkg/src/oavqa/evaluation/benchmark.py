"""Fit every (video, audio, fusion method) combination on the training contents and score it on the test contents."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ..fusion import (
    METHODS,
    SvrConfig,
    SvrError,
    WeightedProductModel,
    train_feature_svr,
    train_score_svr,
)
from ..media_io import DatasetManifest, ManifestEntry
from ..registry import AUDIO_MODELS, VIDEO_MODELS, model_info
from ..stats import CorrelationError, plcc, srcc
from ..store import ScoreStore, ScoreStoreError
from .split import SplitPlan

log = logging.getLogger(__name__)

METHOD_TITLES = {"wp": "Weighted Product", "svr-score": "SVR (Quality Score)", "svr-feat": "SVR (Quality Feature)"}


class BenchmarkError(ValueError):
    pass


@dataclass
class BenchmarkCell:
    video_model: str
    audio_model: str
    method: str
    srcc: float
    plcc: float
    weight: float | None = None


@dataclass
class SingleModeRow:
    model: str
    modality: str
    srcc: float
    plcc: float


@dataclass
class BenchmarkReport:
    cells: list[BenchmarkCell] = field(default_factory=list)
    single_mode: list[SingleModeRow] = field(default_factory=list)
    train_contents: tuple[str, ...] = ()
    test_contents: tuple[str, ...] = ()
    seed: int | None = None

    def cells_for(self, method: str) -> list[BenchmarkCell]:
        return [c for c in self.cells if c.method == method]

    def cell(self, video: str, audio: str, method: str) -> BenchmarkCell:
        for c in self.cells:
            if (c.video_model, c.audio_model, c.method) == (video, audio, method):
                return c
        raise KeyError((video, audio, method))

    def mean_weight(self) -> float:
        ws = [c.weight for c in self.cells_for("wp") if c.weight is not None]
        return float(np.mean(ws)) if ws else math.nan

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "video_model", "audio_model", "method", "srcc", "plcc", "weight"])
        for r in self.single_mode:
            v, a = (r.model, "") if r.modality == "video" else ("", r.model)
            w.writerow(["single", v, a, "", _fmt(r.srcc), _fmt(r.plcc), ""])
        for c in self.cells:
            w.writerow(["fusion", c.video_model, c.audio_model, c.method, _fmt(c.srcc), _fmt(c.plcc),
                        "" if c.weight is None else _fmt(c.weight)])
        return buf.getvalue()

    def to_text(self) -> str:
        """Aligned tables: one block per method, rows are criterion x video model, columns audio models."""
        out = []
        if self.single_mode:
            out.append("Single-mode models (test split)")
            out.append(f"{'Model':<10} {'Modality':<8} {'SRCC':>8} {'PLCC':>8}")
            for r in self.single_mode:
                out.append(f"{r.model:<10} {r.modality:<8} {_fmt(r.srcc):>8} {_fmt(r.plcc):>8}")
            out.append("")
        for method in METHODS:
            cells = self.cells_for(method)
            if not cells:
                continue
            videos = list(dict.fromkeys(c.video_model for c in cells))
            audios = list(dict.fromkeys(c.audio_model for c in cells))
            lookup = {(c.video_model, c.audio_model): c for c in cells}
            out.append(METHOD_TITLES[method])
            out.append(f"{'Criteria':<8} {'Video':<10} " + " ".join(f"{a:>8}" for a in audios))
            for crit in ("srcc", "plcc"):
                for v in videos:
                    vals = [getattr(lookup[(v, a)], crit) if (v, a) in lookup else math.nan for a in audios]
                    out.append(f"{crit.upper():<8} {v:<10} " + " ".join(f"{_fmt(x):>8}" for x in vals))
            if method == "wp":
                out.append(f"mean optimal video weight: {_fmt(self.mean_weight())}")
            out.append("")
        return "\n".join(out)

    def to_dict(self) -> dict:
        return asdict(self)


def _fmt(x: float) -> str:
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.4f}"


def _safe_corr(fn, pred, target) -> float:
    try:
        return fn(pred, target)
    except CorrelationError:
        return math.nan


def oriented_scores(model: str, scores: np.ndarray) -> np.ndarray:
    """Scores flipped so that larger always means better quality."""
    if model == "llr":
        return -np.abs(scores)
    return scores if model_info(model).higher_is_better else -scores


def _rated(entries: Sequence[ManifestEntry]) -> list[ManifestEntry]:
    rated = [e for e in entries if e.mos is not None]
    if len(rated) < len(entries):
        log.warning("excluding %d entries without MOS", len(entries) - len(rated))
    return rated


def _require(store: ScoreStore, models: Sequence[str], entries: Sequence[ManifestEntry]) -> None:
    missing = [(m, e.id) for m in models for e in entries if not store.has(m, e.id)]
    if missing:
        head = ", ".join(f"{m}/{i}" for m, i in missing[:5])
        raise BenchmarkError(f"{len(missing)} missing scores, e.g. {head}")


def run_benchmark(
    manifest: DatasetManifest,
    store: ScoreStore,
    split: SplitPlan,
    video_models: Sequence[str] = tuple(VIDEO_MODELS),
    audio_models: Sequence[str] = tuple(AUDIO_MODELS),
    methods: Sequence[str] = METHODS,
    svr_config: SvrConfig | None = None,
    single_mode: bool = True,
) -> BenchmarkReport:
    for m in methods:
        if m not in METHODS:
            raise BenchmarkError(f"unknown fusion method {m!r}")
    train, test = split.partition(manifest)
    train, test = _rated(train), _rated(test)
    if len(train) < 3 or len(test) < 3:
        raise BenchmarkError(f"too few rated entries: {len(train)} train / {len(test)} test")
    _require(store, [*video_models, *audio_models], [*train, *test])
    tr_ids = [e.id for e in train]
    te_ids = [e.id for e in test]
    y_tr = np.array([e.mos for e in train])
    y_te = np.array([e.mos for e in test])

    report = BenchmarkReport(train_contents=split.train_contents, test_contents=split.test_contents, seed=split.seed)
    if single_mode:
        for m in [*video_models, *audio_models]:
            s = store.scores(m, te_ids)
            if not np.all(np.isfinite(s)):
                r = SingleModeRow(m, model_info(m).modality, math.nan, math.nan)
            else:
                o = oriented_scores(m, s)
                r = SingleModeRow(m, model_info(m).modality, _safe_corr(srcc, o, y_te), _safe_corr(plcc, o, y_te))
            report.single_mode.append(r)

    for v in video_models:
        for a in audio_models:
            for method in methods:
                report.cells.append(_fit_cell(store, v, a, method, tr_ids, te_ids, y_tr, y_te, svr_config))
    return report


def _fit_cell(store, v, a, method, tr_ids, te_ids, y_tr, y_te, svr_config) -> BenchmarkCell:
    weight = None
    try:
        if method == "wp":
            model = WeightedProductModel.fit(v, a, store.scores(v, tr_ids), store.scores(a, tr_ids), y_tr)
            pred = model.predict(store.scores(v, te_ids), store.scores(a, te_ids))
            weight = model.w
        elif method == "svr-score":
            model = train_score_svr(v, a, store.scores(v, tr_ids), store.scores(a, tr_ids), y_tr, svr_config)
            pred = model.predict(np.column_stack([store.scores(v, te_ids), store.scores(a, te_ids)]))
        else:
            model = train_feature_svr(v, a, store.features(v, tr_ids), store.features(a, tr_ids), y_tr, svr_config)
            pred = model.predict(np.hstack([store.features(v, te_ids), store.features(a, te_ids)]))
    except (SvrError, CorrelationError, ValueError) as exc:
        if isinstance(exc, ScoreStoreError):
            raise
        log.warning("%s + %s (%s) could not be fitted: %s", v, a, method, exc)
        return BenchmarkCell(v, a, method, math.nan, math.nan, weight)
    return BenchmarkCell(v, a, method, _safe_corr(srcc, pred, y_te), _safe_corr(plcc, pred, y_te), weight)


def average_reports(reports: Sequence[BenchmarkReport]) -> BenchmarkReport:
    """Cellwise mean of reports from repeated splits (same model grid)."""
    if not reports:
        raise BenchmarkError("no reports to average")
    first = reports[0]
    out = BenchmarkReport(seed=first.seed)
    for k, c in enumerate(first.cells):
        group = [r.cells[k] for r in reports]
        ws = [g.weight for g in group if g.weight is not None]
        out.cells.append(BenchmarkCell(
            c.video_model, c.audio_model, c.method,
            float(np.nanmean([g.srcc for g in group])), float(np.nanmean([g.plcc for g in group])),
            float(np.mean(ws)) if ws else None,
        ))
    for k, r0 in enumerate(first.single_mode):
        group = [r.single_mode[k] for r in reports]
        out.single_mode.append(SingleModeRow(
            r0.model, r0.modality,
            float(np.nanmean([g.srcc for g in group])), float(np.nanmean([g.plcc for g in group])),
        ))
    return out
