"""Command-line entry point: ``streamcut <command> [flags]``.

Writes the command's CSV to ``--out`` (stdout when omitted; for ``gen`` the
flag names the output directory and the manifest goes to stdout).  Exit
status is 0 iff every in-run contract passed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .experiments import COMMANDS, ExperimentConfig, run_experiment
from .streaming import ALGORITHMS


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="streamcut", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--n", type=int)
    parser.add_argument("--alpha", type=_floats, help="one value or a comma-separated grid")
    parser.add_argument("--eps", type=float)
    parser.add_argument("--t", type=_ints, help="one value or a comma-separated grid")
    parser.add_argument("--ell", type=int)
    parser.add_argument("--k", type=int, help="override the phase count")
    parser.add_argument("--c-phase", dest="c_phase", type=float)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--case", choices=("yes", "no", "both"), default="both")
    parser.add_argument("--out", type=str)
    parser.add_argument("--alg", dest="algorithm", choices=sorted(ALGORITHMS), help="stream: algorithm name")
    parser.add_argument("--input", type=str, help="stream: read this stream file instead of sampling")
    parser.add_argument("--size", type=int, help="stream: reservoir size")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    fields = vars(args)
    out = fields["out"]
    try:
        cfg = ExperimentConfig(**fields)
        result = run_experiment(cfg)
    except (ValueError, OSError) as exc:
        print(f"streamcut: error: {exc}", file=sys.stderr)
        return 2
    text = result.to_csv()
    if out and cfg.command != "gen":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    for name, ok in sorted(result.contracts.items()):
        if not ok:
            print(f"contract failed: {name}", file=sys.stderr)
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
