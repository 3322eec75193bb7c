"""Repeat the synthetic end-to-end run over many data seeds.

For each dataset seed it records whether feature-SVR > score-SVR > best
single-mode test SRCC holds, both on a single split and averaged over
several splits.
"""

import argparse
import tempfile
from pathlib import Path

from oavqa import cli
from oavqa.evaluation import average_reports, run_benchmark, split_by_content
from oavqa.media_io import load_manifest
from oavqa.store import ScoreStore
from oavqa.synthetic import SyntheticConfig, generate_dataset


def ordering_holds(report, video: str, audio: str) -> bool:
    feat = report.cell(video, audio, "svr-feat").srcc
    score = report.cell(video, audio, "svr-score").srcc
    single = max(r.srcc for r in report.single_mode)
    return feat > score > single


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data-seeds", type=int, default=8)
    ap.add_argument("--splits", type=int, default=5)
    ap.add_argument("--video", default="ssim")
    ap.add_argument("--audio", default="snr")
    args = ap.parse_args()
    single_hits = averaged_hits = 0
    for seed in range(args.data_seeds):
        with tempfile.TemporaryDirectory() as tmp:
            manifest_path, _ = generate_dataset(Path(tmp) / "data", SyntheticConfig(seed=seed))
            out = Path(tmp) / "scores"
            cli.main(["metrics", "--manifest", str(manifest_path), "--out", str(out),
                      "--video-models", args.video, "--audio-models", args.audio])
            manifest, store = load_manifest(manifest_path), ScoreStore.load(out)
            reports = [run_benchmark(manifest, store, split_by_content(manifest, s), [args.video], [args.audio])
                       for s in range(args.splits)]
        per_split = sum(ordering_holds(r, args.video, args.audio) for r in reports)
        avg = ordering_holds(average_reports(reports), args.video, args.audio)
        single_hits += per_split
        averaged_hits += avg
        print(f"data seed {seed}: ordering on {per_split}/{args.splits} single splits, averaged {'yes' if avg else 'no'}")
    total = args.data_seeds * args.splits
    print(f"single splits: {single_hits}/{total}; averaged: {averaged_hits}/{args.data_seeds}")


if __name__ == "__main__":
    main()
