"""Command line entry point.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config
error, 3 numeric failure (a stage raised).
"""
import argparse
import json
import sys
from pathlib import Path

from .bodies import BodySpecError, body_from_spec, body_to_spec
from .checks import GEOM_CHECKS
from .runner import ConfigError, ExperimentConfig, StageError, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

# which checks each pipeline subcommand asks the runner for
SUBCOMMAND_CHECKS = {
    "sample": [],
    "isotropize": ["isotropize"],
    "moments": ["moments"],
    "direction": ["direction"],
    "tails": ["tails"],
}


def _common(p, seed_required=False):
    p.add_argument("--config", required=True, help="experiment config (JSON)")
    p.add_argument("--seed", type=int, required=seed_required, help="unsigned 64-bit seed; overrides the config")
    p.add_argument("--out", help="output directory; overrides the config")
    p.add_argument("--workers", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="lqcentroid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    body = sub.add_parser("body", help="body specifications")
    body_sub = body.add_subparsers(dest="body_command", required=True)
    validate = body_sub.add_parser("validate", help="parse a body spec and print its canonical form")
    validate.add_argument("spec", help="JSON file with a body spec, or a config with a 'body' field")

    _common(sub.add_parser("sample", help="draw the sample cloud"), seed_required=True)
    for name in ("isotropize", "moments", "direction", "tails"):
        _common(sub.add_parser(name, help=f"run the pipeline through '{name}'"))
    geom = sub.add_parser("geom", help="geometry verifiers")
    _common(geom)
    geom.add_argument("--check", required=True, choices=GEOM_CHECKS)

    verify = sub.add_parser("verify", help="acceptance suites")
    verify.add_argument("suite", choices=("fast", "full"))
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", help="directory for verify_<suite>.json")
    verify.add_argument("--workers", type=int, default=1)
    return parser


def _load_config(args, checks):
    try:
        d = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    if args.seed is not None:
        d["seed"] = args.seed
    if args.out is not None:
        d["out"] = args.out
    d["checks"] = checks
    return ExperimentConfig.from_dict(d)


def _cmd_validate(args):
    d = json.loads(Path(args.spec).read_text())
    spec = d.get("body", d) if isinstance(d, dict) else d
    body = body_from_spec(spec)
    print(json.dumps(body_to_spec(body), sort_keys=True))
    return EXIT_OK


def _cmd_pipeline(args):
    checks = [args.check] if args.command == "geom" else SUBCOMMAND_CHECKS[args.command]
    config = _load_config(args, checks)
    manifest = run(config, workers=args.workers)
    print(manifest.to_json(), end="")
    return EXIT_FAIL if manifest.flags.get("geom_failures") else EXIT_OK


def _cmd_verify(args):
    from .acceptance import format_table, report_json, verify

    rows = verify(args.suite, seed=args.seed)
    text = report_json(args.suite, rows, args.seed)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"verify_{args.suite}.json").write_text(text)
    print(format_table(rows))
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_FAIL


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "body":
            return _cmd_validate(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_pipeline(args)
    except (ConfigError, BodySpecError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        if isinstance(exc.cause, (ConfigError, BodySpecError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
