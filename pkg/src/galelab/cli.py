"""Command-line entry point: ``galelab {entropy,construct,gamble,verify,equiv,gen}``.

Exit status: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .core import Alphabet
from .dimension import (
    equivalence_experiment,
    even_checkpoints,
    prepare_gambler,
    success_diagnostic,
)
from .entropy import MAX_BLOCK_LENGTH, MODES, entropy_profiles, estimates_from_reports
from .errors import GaleLabError
from .gambler import load_gambler, run_log2
from .seqgen import generate, ingest, parse_gen, write_corpus
from .verify import SUITES, run_suite


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def add_input_flags(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gen", help="inline generator: periodic:01 | champernowne[:base] | bernoulli:1/4:seed42 | thue_morse")
    src.add_argument("--file", help="glyph file, one glyph per symbol")
    p.add_argument("--alphabet", default="01", help="glyphs of the alphabet for --file (default 01)")
    p.add_argument("--strict", action="store_true", help="reject whitespace in --file input")
    p.add_argument("--n", type=int, help="number of symbols to use")


def open_input(args):
    """Returns (stream, n, input_descriptor)."""
    if args.n is not None and args.n < 1:
        raise UsageError("--n", "must be positive")
    if args.gen:
        if args.n is None:
            raise UsageError("--n", "required with --gen")
        try:
            cfg = parse_gen(args.gen, args.n)
        except ValueError as exc:
            raise UsageError("--gen", str(exc)) from None
        stream = generate(cfg)
        desc = {"gen": args.gen, "sha256": hashlib.sha256(args.gen.encode()).hexdigest()}
        return stream, args.n, desc
    try:
        alphabet = Alphabet(tuple(args.alphabet))
    except ValueError as exc:
        raise UsageError("--alphabet", str(exc)) from None
    try:
        stream = ingest(args.file, alphabet, skip_whitespace=not args.strict)
    except GaleLabError as exc:
        raise UsageError("--file", str(exc)) from None
    n = args.n
    if n is None:
        n = sum(len(c) for c in stream.chunks())
    stream = stream.limit(n)
    return stream, n, {"file": args.file, "sha256": stream.metadata.get("sha256")}


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def write_manifest(out: Path, command: str, args, inputs: dict, outputs) -> Path:
    """Manifest named after the output prefix; it lists every file the run wrote."""
    params = {k: (str(v) if isinstance(v, (Fraction, Path)) else v) for k, v in vars(args).items() if k != "func"}
    manifest = {
        "command": command,
        "parameters": params,
        "inputs": inputs,
        "library_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "outputs": [Path(o).name for o in outputs],
    }
    path = manifest_path(out)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return path


def _emit(payload: dict):
    print(json.dumps(payload, indent=2))


def cmd_entropy(args) -> int:
    if not 1 <= args.lmax <= MAX_BLOCK_LENGTH:
        raise UsageError("--lmax", f"must be between 1 and {MAX_BLOCK_LENGTH} (table size σ^ℓ)")
    stream, n, inputs = open_input(args)
    if n < args.lmax:
        raise UsageError("--n", f"must be at least --lmax ({args.lmax})")
    schedule = None
    if args.checkpoints:
        try:
            schedule = [int(c) for c in args.checkpoints.split(",")]
        except ValueError:
            raise UsageError("--checkpoints", "expected comma-separated integers") from None
    ls = list(range(1, args.lmax + 1))
    reports = entropy_profiles(stream, ls, [args.mode], n=n, schedule=schedule)
    n_used = max(r.checkpoints[-1][0] for r in reports.values())
    est = estimates_from_reports(reports, [args.mode], ls, n_used)[args.mode]
    payload = est.to_dict()
    if args.out:
        out = Path(args.out)
        payload["manifest"] = manifest_path(out).name
        written = [out.with_name(out.name + ".json"), out.with_name(out.name + ".csv")]
        full = dict(payload, profiles={str(ell): reports[(ell, args.mode)].to_dict() for ell in ls})
        written[0].write_text(json.dumps(full, indent=2))
        written[1].write_text(est.to_csv())
        for ell in ls:
            f = out.with_name(f"{out.name}.l{ell}.csv")
            f.write_text(reports[(ell, args.mode)].to_csv())
            written.append(f)
        write_manifest(out, "entropy", args, inputs, written)
    _emit(payload)
    return 0


def cmd_construct(args) -> int:
    if args.floor is not None and args.floor <= 0:
        raise UsageError("--floor", "must be positive; smoothing is mandatory so every block has mass")
    if not 1 <= args.l <= MAX_BLOCK_LENGTH:
        raise UsageError("--l", f"must be between 1 and {MAX_BLOCK_LENGTH}")
    stream, n, inputs = open_input(args)
    data = stream.take(n)
    try:
        dist, spec = prepare_gambler(data, args.l, args.mode, args.floor, stream.alphabet)
    except GaleLabError as exc:
        raise UsageError("--floor", str(exc)) from None
    out = Path(args.out)
    manifest = manifest_path(out).name
    d = spec.to_dict()
    d["provenance"] = dict(d.get("provenance", {}), manifest=manifest, source=inputs,
                           n=int(len(data)), mode=args.mode)
    out.write_text(json.dumps(d, indent=2))
    write_manifest(out, "construct", args, inputs, [out])
    _emit({"spec": str(out), "states": len(spec.states), "k": spec.k, "manifest": manifest})
    return 0


def cmd_gamble(args) -> int:
    if args.s < 0:
        raise UsageError("--s", "must be nonnegative")
    try:
        spec = load_gambler(args.spec)
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError("--spec", f"cannot load gambler: {exc}") from None
    if args.alphabet == "01" and spec.alphabet.symbols != ("0", "1"):
        args.alphabet = "".join(spec.alphabet.symbols)
    stream, n, inputs = open_input(args)
    data = stream.take(n)
    traj = run_log2(spec, args.s, data, even_checkpoints(len(data), args.checkpoints))
    report = success_diagnostic(traj, args.slope_threshold)
    payload = report.to_dict()
    if args.out:
        out = Path(args.out)
        payload["manifest"] = manifest_path(out).name
        report_file = out.with_name(out.name + ".report.json")
        out.write_text(traj.to_csv())
        report_file.write_text(json.dumps(payload, indent=2))
        write_manifest(out, "gamble", args, inputs, [out, report_file])
    _emit(payload)
    return 0


def cmd_verify(args) -> int:
    spec = None
    if args.spec:
        if args.suite != "gale":
            raise UsageError("--spec", "only the gale suite checks a given spec")
        try:
            spec = load_gambler(args.spec, check_rows=False)
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError("--spec", f"cannot load gambler: {exc}") from None
    if args.trials < 1:
        raise UsageError("--trials", "must be positive")
    result = run_suite(args.suite, args.trials, args.seed, spec)
    _emit(result.to_dict())
    print(f"{args.suite}: {'PASS' if result.passed else 'FAIL'} ({result.checked} checks)", file=sys.stderr)
    return 0 if result.passed else 1


def cmd_equiv(args) -> int:
    if not 1 <= args.lmax <= MAX_BLOCK_LENGTH:
        raise UsageError("--lmax", f"must be between 1 and {MAX_BLOCK_LENGTH}")
    stream, n, inputs = open_input(args)
    if n < args.lmax:
        raise UsageError("--n", f"must be at least --lmax ({args.lmax})")
    report = equivalence_experiment(stream, args.lmax, n)
    payload = report.to_dict()
    if args.out:
        out = Path(args.out)
        payload["manifest"] = manifest_path(out).name
        written = [out.with_name(out.name + ".json"), out.with_name(out.name + ".csv")]
        written[0].write_text(json.dumps(payload, indent=2))
        written[1].write_text(report.to_csv())
        write_manifest(out, "equiv", args, inputs, written)
    _emit(payload)
    return 0


def cmd_gen(args) -> int:
    stream, n, inputs = open_input(args)
    sidecar = write_corpus(stream, args.out)
    write_manifest(Path(args.out), "gen", args, inputs, [args.out, sidecar])
    _emit({"corpus": args.out, "metadata": str(sidecar), "n": n})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="galelab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="block entropy rates and the dimension estimate")
    add_input_flags(p)
    p.add_argument("--mode", choices=MODES, default="disjoint")
    p.add_argument("--lmax", type=int, default=4)
    p.add_argument("--checkpoints", help="comma-separated prefix lengths (default: geometric)")
    p.add_argument("--out", help="output prefix for JSON/CSV reports")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("construct", help="build a gambler from empirical block frequencies")
    add_input_flags(p)
    p.add_argument("--l", type=int, required=True, help="block length")
    p.add_argument("--mode", choices=MODES, default="disjoint")
    p.add_argument("--floor", type=_rational, help="smoothing floor (default: 1/(4·n·σ^ℓ))")
    p.add_argument("--out", required=True, help="gambler spec JSON path")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("gamble", help="run a gambler spec and judge success")
    p.add_argument("spec", help="gambler spec JSON")
    add_input_flags(p)
    p.add_argument("--s", type=_rational, required=True)
    p.add_argument("--checkpoints", type=int, default=100, help="number of trajectory points")
    p.add_argument("--slope-threshold", type=float, default=0.01)
    p.add_argument("--out", help="trajectory CSV path")
    p.set_defaults(func=cmd_gamble)

    p = sub.add_parser("verify", help="randomized/exhaustive identity checks")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spec", help="gambler spec to check (gale suite)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("equiv", help="sliding vs disjoint estimates side by side")
    add_input_flags(p)
    p.add_argument("--lmax", type=int, default=6)
    p.add_argument("--out", help="output prefix for JSON/CSV reports")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("gen", help="write a generated corpus with a metadata sidecar")
    add_input_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"galelab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (GaleLabError, ValueError) as exc:
        print(f"galelab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
