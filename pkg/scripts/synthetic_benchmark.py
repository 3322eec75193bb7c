"""Generate a synthetic dataset and run metrics -> train -> benchmark on it through the CLI."""

import argparse
import sys
import time
from pathlib import Path

from oavqa import cli
from oavqa.synthetic import SyntheticConfig, generate_dataset


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--root", type=Path, default=Path("runs/synthetic"))
    ap.add_argument("--contents", type=int, default=10)
    ap.add_argument("--distortions", type=int, default=5)
    ap.add_argument("--data-seed", type=int, default=0)
    ap.add_argument("--video-models", default="ssim,ws-psnr,gmsd")
    ap.add_argument("--audio-models", default="snr,segsnr,stoi")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    cfg = SyntheticConfig(n_contents=args.contents, n_distortions=args.distortions, seed=args.data_seed)
    manifest, _ = generate_dataset(args.root / "data", cfg)
    sel = ["--video-models", args.video_models, "--audio-models", args.audio_models]
    scores, models, report = args.root / "scores", args.root / "models", args.root / "report"
    steps = [
        ["metrics", "--manifest", str(manifest), "--out", str(scores), "--jobs", str(args.jobs), *sel],
        ["train", "--manifest", str(manifest), "--scores", str(scores), "--out", str(models), *sel],
        ["benchmark", "--manifest", str(manifest), "--scores", str(scores), "--out", str(report),
         "--repeats", str(args.repeats), "--jobs", str(args.jobs), *sel],
    ]
    for argv in steps:
        t0 = time.perf_counter()
        code = cli.main(argv)
        print(f"{argv[0]}: exit {code} in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
        if code:
            return code
    print((report / "report.txt").read_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
