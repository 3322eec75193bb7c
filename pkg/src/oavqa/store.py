"""Score store: one ``id,model,score,f1..fK`` CSV per model in a directory."""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .registry import ALL_MODELS


class ScoreStoreError(ValueError):
    pass


class ArityError(ScoreStoreError):
    pass


@dataclass(frozen=True)
class ScoreRecord:
    id: str
    model: str
    score: float
    features: tuple[float, ...]


def _parse_float(s: str | None) -> float:
    if s is None or not s.strip():
        return math.nan
    return float(s)


def read_score_csv(path, model_name: str | None = None) -> dict[str, ScoreRecord]:
    """Read one per-model CSV.

    A missing ``score`` column or empty score cell yields NaN; such rows remain
    usable for feature-based fusion. If ``model_name`` is a registered model the
    feature count is checked against its decomposition.
    """
    path = Path(path)
    out: dict[str, ScoreRecord] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        if "id" not in cols:
            raise ScoreStoreError(f"{path}: missing id column")
        fcols = sorted((c for c in cols if c.startswith("f") and c[1:].isdigit()), key=lambda c: int(c[1:]))
        for row in reader:
            model = (row.get("model") or model_name or path.stem).strip().lower()
            if model_name is not None and model != model_name.lower():
                continue
            feats = tuple(float(row[c]) for c in fcols if row[c] not in (None, ""))
            info = ALL_MODELS.get(model)
            if info is not None and len(feats) != info.arity:
                raise ArityError(
                    f"{path}: {model} row {row['id']!r} has {len(feats)} features, expected {info.arity}"
                )
            rid = row["id"].strip()
            if rid in out:
                raise ScoreStoreError(f"{path}: duplicate id {rid!r}")
            out[rid] = ScoreRecord(rid, model, _parse_float(row.get("score")), feats)
    return out


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_score_csv(records: Iterable[ScoreRecord]) -> str:
    records = list(records)
    k = max((len(r.features) for r in records), default=0)
    lines = [",".join(["id", "model", "score"] + [f"f{i + 1}" for i in range(k)])]
    for r in records:
        score = "" if math.isnan(r.score) else repr(float(r.score))
        lines.append(",".join([r.id, r.model, score] + [repr(float(f)) for f in r.features]))
    return "\n".join(lines) + "\n"


def write_score_csv(path, records: Iterable[ScoreRecord]) -> None:
    atomic_write_text(path, format_score_csv(records))


class ScoreStore:
    """In-memory view of a score-store directory: model -> id -> record."""

    def __init__(self, data: dict[str, dict[str, ScoreRecord]] | None = None):
        self.data: dict[str, dict[str, ScoreRecord]] = data or {}

    @classmethod
    def load(cls, *directories) -> "ScoreStore":
        data: dict[str, dict[str, ScoreRecord]] = {}
        for d in directories:
            if d is None:
                continue
            for p in sorted(Path(d).glob("*.csv")):
                if p.stem.startswith("_"):
                    continue
                recs = read_score_csv(p)
                for rec in recs.values():
                    data.setdefault(rec.model, {})[rec.id] = rec
        return cls(data)

    def models(self) -> list[str]:
        return sorted(self.data)

    def add(self, rec: ScoreRecord) -> None:
        self.data.setdefault(rec.model, {})[rec.id] = rec

    def get(self, model: str, entry_id: str) -> ScoreRecord:
        try:
            return self.data[model][entry_id]
        except KeyError:
            raise ScoreStoreError(f"no {model} score for entry {entry_id!r}") from None

    def has(self, model: str, entry_id: str) -> bool:
        return entry_id in self.data.get(model, {})

    def scores(self, model: str, ids) -> np.ndarray:
        return np.array([self.get(model, i).score for i in ids], dtype=np.float64)

    def features(self, model: str, ids) -> np.ndarray:
        return np.array([self.get(model, i).features for i in ids], dtype=np.float64)

    def save(self, directory) -> None:
        for model, recs in self.data.items():
            write_score_csv(Path(directory) / f"{model}.csv", recs.values())
