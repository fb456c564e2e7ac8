"""Render figures from spec files: ``figscripts spec1.yaml [spec2.yaml ...]``."""

from __future__ import annotations

import argparse
import os
import sys

from figscripts.plots import render
from figscripts.specs import SpecError, load_spec


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Regenerate figures from solver outputs.")
    ap.add_argument("specs", nargs="+", help="figure spec YAML files")
    ap.add_argument("-o", "--out-dir", default=".", help="directory for emitted images")
    args = ap.parse_args(argv)
    os.makedirs(args.out_dir, exist_ok=True)
    status = 0
    for path in args.specs:
        try:
            spec = load_spec(path)
            out = render(spec, base_dir=os.path.dirname(os.path.abspath(path)), out_dir=args.out_dir)
            print(f"{path} -> {out}")
        except (SpecError, OSError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
