"""Command-line interface: train, show, eval, enumerate, gen-spec.

Exit codes: 0 success, 2 input validation, 3 runtime failure.  Error
messages carry a category prefix (PARSE/SPEC/CONFIG/IO) so scripts can
match on them.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .dists import ThetaError, load_thetas, save_thetas, softmax
from .engine import (
    ConfigError,
    EnumerationError,
    argmax_program,
    enumerate_discrete,
    train,
)
from .interp import SpecError, SpecSet, eval_program, eval_spec_loss
from .io import load_config, load_spec, save_spec, write_loss_csv
from .sketch import SketchError, format_real, parse_sketch, print_program


class _Failure(Exception):
    def __init__(self, category: str, message: str, code: int = 2):
        super().__init__(message)
        self.category = category
        self.code = code


def _read_text(path, category: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Failure(category, f"cannot read {path}: {exc}")


def _load_sketch(path):
    try:
        return parse_sketch(_read_text(path, "PARSE"))
    except SketchError as exc:
        raise _Failure("PARSE", str(exc))


def _load_program(path):
    program = _load_sketch(path)
    if not program.is_concrete:
        raise _Failure("PARSE", f"{path} still contains holes; expected a concrete program")
    return program


def _load_spec(path) -> SpecSet:
    try:
        return load_spec(path)
    except SpecError as exc:
        raise _Failure("SPEC", str(exc))


def _load_config(path):
    try:
        return load_config(path)
    except ConfigError as exc:
        raise _Failure("CONFIG", str(exc))


def _cmd_train(args) -> int:
    sketch = _load_sketch(args.sketch)
    spec = _load_spec(args.spec)
    config = _load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if spec.arity != sketch.arity:
        raise _Failure("SPEC", f"spec arity {spec.arity} does not match sketch arity {sketch.arity}")
    result = train(sketch, spec, config)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_loss_csv(result.records, out / "loss.csv", log_every=args.log_every)
        save_thetas(result.thetas, out / "theta_final.json")
        save_thetas(result.best_thetas, out / "theta_best.json")
        (out / "program_final.txt").write_text(print_program(result.final_program), encoding="utf-8")
        (out / "program_best.txt").write_text(print_program(result.best_program), encoding="utf-8")
    except OSError as exc:
        raise _Failure("IO", f"cannot write results to {out}: {exc}", code=3)
    print(f"best spec-MSE: {format_real(result.best_loss)}")
    print(f"final spec-MSE: {format_real(result.final_loss)}")
    return 0


def _cmd_show(args) -> int:
    sketch = _load_sketch(args.sketch)
    try:
        thetas = load_thetas(args.theta, sketch)
    except OSError as exc:
        raise _Failure("IO", f"cannot read {args.theta}: {exc}")
    except ThetaError as exc:
        raise _Failure("IO", str(exc))
    print(print_program(argmax_program(sketch, thetas)))
    for hole, theta in zip(sketch.holes, thetas):
        if hole.domain is None:
            print(f"hole {hole.index} [Real]: mu={format_real(theta.mu)} sigma={format_real(theta.sigma)}")
        else:
            probs = softmax(theta.logits)
            pairs = " ".join(f"p({tok})={p:.6f}" for tok, p in zip(hole.domain, probs))
            print(f"hole {hole.index} [{'COND' if len(hole.domain) == 3 else 'OP'}]: {pairs} sum={probs.sum():.3f}")
    return 0


def _cmd_eval(args) -> int:
    program = _load_program(args.program)
    spec = _load_spec(args.spec)
    if spec.arity != program.arity:
        raise _Failure("SPEC", f"spec arity {spec.arity} does not match program arity {program.arity}")
    for vec, target in zip(spec.inputs, spec.outputs):
        pred = eval_program(program, vec)
        err = (pred - target) ** 2
        ins = ", ".join(format_real(v) for v in vec)
        print(f"in=({ins}) pred={format_real(pred)} target={format_real(target)} sq_err={format_real(err)}")
    print(f"MSE: {format_real(eval_spec_loss(program, spec))}")
    return 0


def _cmd_enumerate(args) -> int:
    sketch = _load_sketch(args.sketch)
    spec = _load_spec(args.spec)
    try:
        reals = [float(v) for v in args.reals.split(",")] if args.reals else []
    except ValueError:
        raise _Failure("CONFIG", f"--reals must be comma-separated numbers, got {args.reals!r}")
    try:
        ranked = enumerate_discrete(sketch, reals, spec)
    except EnumerationError as exc:
        raise _Failure("CONFIG", str(exc))
    except SketchError as exc:
        raise _Failure("CONFIG", str(exc))
    top = ranked if args.top is None else ranked[: args.top]
    cat_holes = [h for h in sketch.holes if h.domain is not None]
    for rank, (assignment, loss) in enumerate(top, start=1):
        tokens = " ".join(h.domain[assignment.values[h.index]] for h in cat_holes)
        print(f"{rank:4d} loss={format_real(loss)} tokens=[{tokens}]")
    return 0


def _cmd_gen_spec(args) -> int:
    program = _load_program(args.program)
    text = _read_text(args.inputs, "SPEC")
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    if rows and not _numeric_row(rows[0]):
        rows = rows[1:]  # header line
    if not rows:
        raise _Failure("SPEC", f"{args.inputs} contains no input rows")
    pairs = []
    for r, line in enumerate(rows, start=1):
        cells = [c.strip() for c in line.split(",")]
        try:
            vec = tuple(float(c) for c in cells)
        except ValueError:
            raise _Failure("SPEC", f"{args.inputs} row {r}: non-numeric cell")
        if len(vec) != program.arity:
            raise _Failure("SPEC", f"{args.inputs} row {r}: expected {program.arity} inputs, got {len(vec)}")
        out = eval_program(program, vec)
        pairs.append((vec, out))
    try:
        spec = SpecSet.from_pairs(pairs)
    except SpecError as exc:
        raise _Failure("SPEC", f"program output is not a valid spec: {exc}")
    try:
        save_spec(spec, args.out)
    except OSError as exc:
        raise _Failure("IO", f"cannot write {args.out}: {exc}", code=3)
    print(f"wrote {len(spec)} pairs to {args.out}")
    return 0


def _numeric_row(line: str) -> bool:
    try:
        [float(c) for c in line.split(",")]
        return True
    except ValueError:
        return False


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sketchgrad", description="Induce programs from input-output examples.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="optimize a sketch's search distributions against a spec")
    p.add_argument("--sketch", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config's seed")
    p.add_argument("--log-every", type=int, default=10, help="loss.csv row cadence")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("show", help="print the argmax program and distribution summaries")
    p.add_argument("--sketch", required=True)
    p.add_argument("--theta", required=True)
    p.set_defaults(func=_cmd_show)

    p = sub.add_parser("eval", help="score a concrete program against a spec")
    p.add_argument("--program", required=True)
    p.add_argument("--spec", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("enumerate", help="rank every discrete hole combination by loss")
    p.add_argument("--sketch", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--reals", default="", help="comma-separated values for the [Real] holes")
    p.add_argument("--top", type=int, default=None)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("gen-spec", help="evaluate a program on input rows and write a spec CSV")
    p.add_argument("--program", required=True)
    p.add_argument("--inputs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_spec)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Failure as exc:
        print(f"{exc.category}: {exc}", file=sys.stderr)
        return exc.code
    except (SketchError, SpecError, ConfigError, ThetaError) as exc:
        # Typed errors escaping a subcommand are still input problems.
        category = {SpecError: "SPEC", ConfigError: "CONFIG", ThetaError: "IO"}.get(type(exc), "PARSE")
        print(f"{category}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"IO: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
