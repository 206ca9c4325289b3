#!/usr/bin/env python3
"""Run every shipped preset through the CLI.

    python3 scripts/reproduce.py [--out out] [--quick] [--threads N]

--quick swaps the bound-state grids for n = 80 and the scan lists for
three epsilons, which brings the run from tens of minutes to about one.
"""

import argparse
import sys
import tempfile
from pathlib import Path

import yaml

from darkbarrier import cli

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"

JOBS = [
    ("fig2.cfg", ["profile", "potential", "features"], None),
    ("fig3.cfg", ["profile", "potential", "features"], None),
    ("sec5.cfg", ["experiment"], None),
    ("fig4.cfg", ["boundstate"], {"dipolar": {"l_t": 0.0}}),
    ("fig4.cfg", ["boundstate"], {"dipolar": {"l_t": 0.1}}),
    ("fig4.cfg", ["boundstate"], {"dipolar": {"l_t": 0.2}}),
    ("fig4.cfg", ["scan"], None),
    ("fig5.cfg", ["scan"], None),
]


def _merge(base, extra):
    out = dict(base)
    for key, value in (extra or {}).items():
        out[key] = {**out.get(key, {}), **value} if isinstance(value, dict) else value
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out")
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args(argv)

    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, (name, commands, extra) in enumerate(JOBS):
            data = yaml.safe_load((CONFIGS / name).read_text(encoding="utf-8"))
            data = _merge(data, extra)
            if args.quick:
                data = _merge(data, {"solver": {"n": 80}})
                if "scan" in data:
                    data["scan"]["epsilons"] = ["1/40", "1/20", "1/10"]
            cfg = Path(tmp) / f"{i}.yaml"
            cfg.write_text(yaml.safe_dump(data), encoding="utf-8")
            tag = Path(name).stem + (f"_lt{extra['dipolar']['l_t']:g}" if extra else "")
            for command in commands:
                argv_cmd = [command, "--config", str(cfg), "--out", str(Path(args.out) / tag)]
                if args.threads:
                    argv_cmd += ["--threads", str(args.threads)]
                code = cli.run(argv_cmd)
                print(f"{tag:>12} {command:<10} exit {code}")
                failures += code != 0
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
