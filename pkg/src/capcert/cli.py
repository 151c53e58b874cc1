"""Command-line entry point: ``capcert run | montecarlo | preset``."""

import argparse
import json
import os
import sys
from importlib import resources

from .experiments import (ConfigError, ExperimentConfig, load_config, run_experiment,
                          run_montecarlo, to_json, write_json, write_rows)

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2


def preset_names():
    files = resources.files("capcert").joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def load_preset(name):
    if name not in preset_names():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    text = resources.files("capcert").joinpath("presets", f"{name}.json").read_text()
    return json.loads(text)


def _target(cfg, out_dir):
    return os.path.join(out_dir, cfg.output_path) if out_dir else cfg.output_path


def _do_run(cfg, args):
    rows, diags = run_experiment(cfg, seed=args.seed, threads=args.threads)
    path = write_rows(rows, _target(cfg, args.out), cfg.output_format)
    for line in diags:
        print(f"infeasible: {line}", file=sys.stderr)
    if rows and len(diags) == len(rows):
        print(f"error: no feasible point in the sweep; wrote {path}", file=sys.stderr)
        return EXIT_INFEASIBLE
    print(path)
    return EXIT_OK


def _do_montecarlo(cfg, args):
    trials, summary = run_montecarlo(cfg, seed=args.seed, threads=args.threads)
    path = write_rows(trials, _target(cfg, args.out), cfg.output_format)
    stem = os.path.splitext(path)[0]
    summary_path = write_json(summary, stem + ".summary.json")
    print(path)
    print(summary_path)
    if trials and all("error" in t for t in trials):
        print("error: every trial was infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="capcert",
                                     description="Certify quantum-capacity lower bounds from test data.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", metavar="DIR", help="directory for output files")
        p.add_argument("--seed", type=int, help="override monte_carlo.seed")
        p.add_argument("--threads", type=int,
                       help="worker threads (default: $CAPCERT_THREADS or 1)")

    p = sub.add_parser("run", help="evaluate every sweep point once")
    p.add_argument("config")
    common(p)
    p = sub.add_parser("montecarlo", help="repeat stochastic sweep points and summarize")
    p.add_argument("config")
    common(p)
    p = sub.add_parser("preset", help="run (or print) a bundled figure configuration")
    p.add_argument("name", nargs="?", help="preset name; omit to list presets")
    p.add_argument("--print", action="store_true", dest="print_only",
                   help="print the preset config instead of running it")
    common(p)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "preset":
            if args.name is None:
                print("\n".join(preset_names()))
                return EXIT_OK
            raw = load_preset(args.name)
            if args.print_only:
                sys.stdout.write(to_json(raw))
                return EXIT_OK
            return _do_run(ExperimentConfig.from_dict(raw), args)
        cfg = load_config(args.config)
        if args.command == "run":
            return _do_run(cfg, args)
        return _do_montecarlo(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
