"""Command line entry point ``oddaut``.

Exit status: 0 when finished without a witness, 2 when a search found an
odd automorphism with a verified inverse, 1 on any error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .autmap import parse_map
from .lab import (ConfigError, ExperimentConfig, ReportWriter, cmd_parity,
                  cmd_search, cmd_slice_check, cmd_theorem_check,
                  cmd_verify_inverse, named_map)

EXIT_OK, EXIT_ERROR, EXIT_WITNESS = 0, 1, 2


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    p.add_argument("--field", help="field designation, e.g. GF(2^2)")
    p.add_argument("--mod", help="modulus coefficients a0,a1,...,am")
    p.add_argument("--n", type=int, help="dimension")
    p.add_argument("--out", help="append JSONL records to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oddaut",
        description="Parity of permutations induced by polynomial automorphisms of F_q^n.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parity", help="parity and cycle data of a map")
    _common(p)
    p.add_argument("--map", help='map text "p1; p2; ..." or "nagata"')
    p.add_argument("--inverse", help="optional formal inverse to verify")

    p = sub.add_parser("verify-inverse", help="check F o G = G o F = I formally")
    _common(p)
    p.add_argument("--map")
    p.add_argument("--inverse")

    p = sub.add_parser("theorem-check", help="order of the group of tame images")
    _common(p)

    p = sub.add_parser("search", help="hunt for an odd automorphism")
    _common(p)
    p.add_argument("--family", help="tame-word, nagata-conjugate or candidates")
    p.add_argument("--candidates", help="file of 'map<TAB>inverse' lines")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--length", type=int, dest="word_length")
    p.add_argument("--degree", type=int, dest="degree_bound")

    p = sub.add_parser("slice-check", help="slice parities of a variable-fixing map")
    _common(p)
    p.add_argument("--map")
    p.add_argument("--var", type=int, dest="fixed_var", help="fixed variable (default n)")
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    data = {}
    if args.config:
        data = vars(ExperimentConfig.from_json(args.config))
    data["experiment"] = args.command
    overrides = {"field": args.field, "modulus": args.mod, "n": args.n, "output": args.out}
    for key in ("map", "inverse", "family", "candidates", "seed", "samples",
                "word_length", "degree_bound", "fixed_var"):
        overrides[key] = getattr(args, key, None)
    data.update({k: v for k, v in overrides.items() if v is not None})
    if isinstance(data.get("modulus"), str):
        data["modulus"] = [int(c) for c in data["modulus"].split(",") if c.strip()]
    return ExperimentConfig.from_dict(data)


def _load_map(text: str | None, field, n: int, what: str):
    if not text:
        raise ConfigError(f"--{what} is required")
    try:
        return named_map(text.strip(), field, n)
    except KeyError:
        return parse_map(text, field, n)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        field = cfg.make_field()
        n = cfg.n
        if cfg.map and cfg.map.strip() == "nagata":
            n = cfg.n = 3
        witness = False
        with ReportWriter(cfg.output) as writer:
            if cfg.experiment == "search":
                records = cmd_search(cfg)
            elif cfg.experiment == "theorem-check":
                records = [cmd_theorem_check(field, n)]
            elif cfg.experiment == "parity":
                F = _load_map(cfg.map, field, n, "map")
                G = _load_map(cfg.inverse, field, n, "inverse") if cfg.inverse else None
                if G is None and cfg.map.strip() == "nagata":
                    G = F.inverse
                records = [cmd_parity(F, G)]
            elif cfg.experiment == "verify-inverse":
                F = _load_map(cfg.map, field, n, "map")
                G = (_load_map(cfg.inverse, field, n, "inverse")
                     if cfg.inverse or F.inverse is None else F.inverse)
                records = [cmd_verify_inverse(F, G)]
            else:
                F = _load_map(cfg.map, field, n, "map")
                records = [cmd_slice_check(F, cfg.fixed_var)]
            for rec in records:
                writer.write(rec)
                print(rec.to_json(), flush=True)
                witness = witness or rec.witness
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"oddaut: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_WITNESS if witness else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
