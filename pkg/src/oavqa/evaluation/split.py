from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..media_io import DatasetManifest

TRAIN_FRACTION = 0.8


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class SplitPlan:
    train_contents: tuple[str, ...]
    test_contents: tuple[str, ...]
    seed: int

    def __post_init__(self):
        if set(self.train_contents) & set(self.test_contents):
            raise SplitError("train and test contents overlap")

    def partition(self, manifest: DatasetManifest) -> tuple[list, list]:
        train, test = set(self.train_contents), set(self.test_contents)
        tr = [e for e in manifest if e.content_id in train]
        te = [e for e in manifest if e.content_id in test]
        return tr, te


def split_by_content(manifest: DatasetManifest, seed: int = 0, train_fraction: float = TRAIN_FRACTION) -> SplitPlan:
    """Shuffle contents with a seeded RNG and put ~80% of them in the training set.

    Every distortion of a content goes wherever its content goes.
    """
    contents = sorted(manifest.content_ids)
    n = len(contents)
    if n < 2:
        raise SplitError(f"need at least 2 contents for a train/test split, got {n}")
    n_train = min(max(int(round(train_fraction * n)), 1), n - 1)
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [contents[i] for i in order]
    return SplitPlan(tuple(sorted(shuffled[:n_train])), tuple(sorted(shuffled[n_train:])), seed)
