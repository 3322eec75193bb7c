"""Raw ratings to MOS via per-subject Z-scores rescaled to [0, 100]."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ..media_io import RatingsMatrix


class MosError(ValueError):
    pass


@dataclass(frozen=True)
class MosTable:
    sequence_ids: tuple[str, ...]
    mos: np.ndarray
    z_scaled: np.ndarray  # subjects x sequences, retained for audit

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.sequence_ids, self.mos.tolist()))


def compute_mos(ratings: RatingsMatrix) -> MosTable:
    """Z-score each subject (sample std), map z to 100 (z + 3) / 6, average over subjects.

    Values outside [0, 100] (|z| > 3) are kept as is.
    """
    r = ratings.raw
    n = r.shape[1]
    if n < 2:
        raise MosError("need at least two sequences to standardise a subject")
    # n * (r - mean) keeps integer ratings exact, so affine rating changes
    # by powers of two cancel bit for bit
    dev = n * r - r.sum(axis=1, keepdims=True)
    scale = np.sqrt((dev * dev).sum(axis=1, keepdims=True) / (n - 1))
    flat = np.flatnonzero(scale[:, 0] == 0)
    if flat.size:
        names = ", ".join(ratings.subject_ids[i] for i in flat)
        raise MosError(f"subject(s) with zero rating variance: {names}")
    z = dev / scale
    z_scaled = 100.0 * (z + 3.0) / 6.0
    return MosTable(ratings.sequence_ids, z_scaled.mean(axis=0), z_scaled)


def write_mos_csv(path, table: MosTable) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["sequence_id", "mos"])
        for sid, m in zip(table.sequence_ids, table.mos):
            w.writerow([sid, repr(float(m))])
