"""Run every shipped preset into OUT/<preset>/ and report timings."""

import argparse
import time
from pathlib import Path

from cdlab.cli.config import from_dict, preset_names
from cdlab.cli.runner import run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/presets")
    ap.add_argument("names", nargs="*", help="subset of presets (default: all)")
    args = ap.parse_args()
    for name in args.names or preset_names():
        t = time.perf_counter()
        res = run(from_dict({"preset": name}), Path(args.out) / name)
        print(f"{name:15s} {time.perf_counter() - t:6.2f}s  {len(res.files)} files")


if __name__ == "__main__":
    main()
