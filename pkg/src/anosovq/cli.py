"""Command line: ``anosovq <mode> --config <path> [--out <path>] [--threads N] [--seed S]``.

Exit codes: 0 ok, 2 config error, 3 verification failed, 4 precondition failed.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import ConfigError, load_config
from .runs import PreconditionError, dumps, run_anosov, run_catmap, run_lyapunov, run_scan, scan_csv

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_PRECONDITION = 0, 2, 3, 4
MODES = ("lyapunov", "scan", "anosov", "catmap")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="anosovq", description="Exponents and Anosov certificates for driven oscillators")
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--threads", type=int, default=None, help="worker threads for scans (env ANOSOVQ_THREADS)")
    p.add_argument("--seed", type=int, default=None, help="seed for random test directions")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _threads(arg) -> int:
    if arg is not None:
        n = arg
    else:
        raw = os.environ.get("ANOSOVQ_THREADS", "1")
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"ANOSOVQ_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("thread count must be >= 1")
    return n


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        threads = _threads(args.threads)
        cfg = load_config(args.config, args.seed)
        if args.mode == "scan":
            rows = run_scan(cfg, threads)
            _emit(scan_csv(rows), args.out)
            bad = sum(r.classification == "unresolved" for r in rows)
            if bad:
                print(f"warning: {bad} unresolved row(s)", file=sys.stderr)
            return EXIT_OK
        if args.mode == "lyapunov":
            _emit(dumps(run_lyapunov(cfg)), args.out)
            return EXIT_OK
        if args.mode == "anosov":
            cert = run_anosov(cfg)
        else:
            cert = run_catmap(cfg)
        _emit(dumps(cert.to_dict()), args.out)
        if cert.verdict != "pass":
            print("verification failed", file=sys.stderr)
            return EXIT_VERIFY
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
