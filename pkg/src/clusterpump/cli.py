"""Command-line pipeline: build -> compile -> verify, plus symmetry and perturbation runs.

Exit codes: 0 pass, 1 failed check, 2 usage error, 3 resource cap exceeded.
Errors are written to stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from clusterpump import f2poly
from clusterpump.checks import symmetry_check, verify_pump
from clusterpump.compiler import PumpCompileError, compile_pump
from clusterpump.experiment import GLOBAL, PER_GENERATOR, X_TYPE, Z_TYPE, PerturbationSpec, run_postselected, sweep
from clusterpump.lattice import (
    LatticeError,
    LatticeSpec,
    build_fcc,
    build_fractal_stack,
    build_honeycomb_stack,
    build_square,
    build_triangular,
    build_union_jack,
)
from clusterpump.pauli import CliffordCircuit
from clusterpump.statevector import DEFAULT_CAP, CapExceeded

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _write(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_spec(path: str) -> LatticeSpec:
    try:
        return LatticeSpec.from_json(_read(path))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"{path} is not a lattice spec: {exc}") from exc


def _dims(args, count: tuple, name: str) -> list:
    dims = args.dims or []
    if len(dims) not in count:
        raise UsageError(f"{name} needs {' or '.join(map(str, count))} --dims values, got {len(dims)}")
    return dims


def cmd_build(args) -> int:
    lat = args.lattice
    if lat == "square":
        spec = build_square(*_dims(args, (2,), lat))
    elif lat == "union-jack":
        d = _dims(args, (1, 2), lat)
        spec = build_union_jack(d[0], d[1] if len(d) > 1 else None, periodic=not args.open)
    elif lat == "triangular":
        spec = build_triangular(*_dims(args, (1,), lat), shape=args.shape)
    elif lat == "fcc":
        spec = build_fcc(*_dims(args, (3,), lat), periodic=not args.open)
    elif lat in ("fractal", "honeycomb"):
        nx, ny, L = _dims(args, (3,), lat)
        kw = {"periodic_x": not args.open, "periodic_y": args.periodic_y}
        if lat == "honeycomb":
            spec = build_honeycomb_stack(nx, ny, L, **kw)
        else:
            try:
                f = f2poly.parse(args.ca)
            except ValueError as exc:
                raise UsageError(f"invalid CA polynomial {args.ca!r}: {exc}") from exc
            spec = build_fractal_stack(f, nx, ny, L, **kw)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown lattice {lat}")
    _write(spec.to_json(), args.out)
    return EXIT_OK


def cmd_compile(args) -> int:
    spec = _load_spec(args.spec)
    cert = symmetry_check(spec)
    if not cert.passed:
        raise CheckFailed("symmetry check failed", cert.to_dict())
    try:
        cp = compile_pump(spec)
    except PumpCompileError as exc:
        raise CheckFailed(str(exc)) from exc
    _write(cp.reduced.to_text(), args.out)
    if args.summary:
        _write(json.dumps(cp.summary(), indent=1) + "\n", args.summary)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _load_spec(args.spec)
    try:
        circuit = CliffordCircuit.from_text(_read(args.circuit), n=spec.n)
    except ValueError as exc:
        raise UsageError(f"bad circuit file: {exc}") from exc
    rep = verify_pump(spec, circuit)
    _write(rep.to_json(), args.report)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_symcheck(args) -> int:
    rep = symmetry_check(_load_spec(args.spec))
    _write(rep.to_json(), args.report)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_perturb(args) -> int:
    spec = _load_spec(args.spec)
    p = PerturbationSpec(args.kind, args.eps, args.disorder_seed)
    res = run_postselected(spec, p, args.seed, rule=args.rule, n_samples=args.samples, cap=args.cap)
    _write(json.dumps(res.to_dict(), indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        cfg = json.loads(_read(args.config))
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not JSON: {exc}") from exc
    if "seed" not in cfg:
        raise UsageError("sweep config must set an explicit 'seed'")
    unknown = set(cfg) - {"lattice", "sizes", "epsilons", "kinds", "seed", "accept_rule", "samples", "workers",
                          "cap"}
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    res = sweep(
        cfg.get("lattice", "square"),
        [tuple(s) for s in cfg.get("sizes", [[4, 4]])],
        [float(e) for e in cfg["epsilons"]],
        cfg.get("kinds", [Z_TYPE]),
        seed=int(cfg["seed"]),
        rule=cfg.get("accept_rule", PER_GENERATOR),
        n_samples=int(cfg.get("samples", 10_000)),
        workers=int(cfg.get("workers", 1)),
        cap=int(cfg.get("cap", DEFAULT_CAP)),
    )
    _write(res.to_csv(), args.out)
    if args.fits:
        _write(json.dumps(res.fits_dict(), indent=1) + "\n", args.fits)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="clusterpump", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="write a lattice spec as JSON")
    b.add_argument("--lattice", required=True,
                   choices=["square", "triangular", "union-jack", "fcc", "honeycomb", "fractal"])
    b.add_argument("--dims", type=int, nargs="+")
    b.add_argument("--ca", default="1+x", help="cellular-automaton rule for --lattice fractal")
    b.add_argument("--shape", default="triangle", choices=["triangle", "hexagon"])
    b.add_argument("--open", action="store_true", help="open boundaries instead of the periodic default")
    b.add_argument("--periodic-y", action="store_true", help="fractal stacks: close the y direction too")
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("compile", help="compile the pump of a spec into a reduced circuit")
    c.add_argument("--spec", required=True)
    c.add_argument("--out")
    c.add_argument("--summary")
    c.set_defaults(func=cmd_compile)

    v = sub.add_parser("verify", help="check a circuit against the expected pumped state")
    v.add_argument("--spec", required=True)
    v.add_argument("--circuit", required=True)
    v.add_argument("--report")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("symcheck", help="certify that symmetries commute with the driving terms")
    s.add_argument("--spec", required=True)
    s.add_argument("--report")
    s.set_defaults(func=cmd_symcheck)

    q = sub.add_parser("perturb", help="perturbed evolution with bulk post-selection")
    q.add_argument("--spec", required=True)
    q.add_argument("--kind", required=True, choices=[Z_TYPE, X_TYPE])
    q.add_argument("--eps", required=True, type=float)
    q.add_argument("--seed", required=True, type=int)
    q.add_argument("--rule", default=PER_GENERATOR, choices=[PER_GENERATOR, GLOBAL])
    q.add_argument("--samples", type=int, default=10_000)
    q.add_argument("--disorder-seed", type=int)
    q.add_argument("--cap", type=int, default=DEFAULT_CAP)
    q.add_argument("--out")
    q.set_defaults(func=cmd_perturb)

    w = sub.add_parser("sweep", help="run a perturbation sweep from a JSON config")
    w.add_argument("--config", required=True)
    w.add_argument("--out", required=True)
    w.add_argument("--fits")
    w.set_defaults(func=cmd_sweep)
    return p


def _fail(code: int, kind: str, message: str, report=None) -> int:
    err = {"error": kind, "message": message, "exit_code": code}
    if report is not None:
        err["report"] = report
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except CapExceeded as exc:
        return _fail(EXIT_CAP, "resource_cap", str(exc))
    except CheckFailed as exc:
        return _fail(EXIT_FAIL, "check_failed", str(exc), exc.report)
    except (LatticeError, ValueError) as exc:
        return _fail(EXIT_USAGE, "invalid_input", str(exc))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
