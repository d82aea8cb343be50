"""Command-line interface.

Exit codes: 0 success, 1 learning failure, 2 parse or I/O error,
3 unmet precondition (saturation, depth), 4 alphabet mismatch.
"""

from __future__ import annotations

import argparse
import importlib.util
import json
import sys
from pathlib import Path

from . import learner, pa, recogniser as rc, teacher as tch
from . import pomset as pm
from .errors import (
    AlphabetMismatch,
    ClosureDiverged,
    FormatError,
    InvalidBimonoid,
    NotDepthNilpotent,
    NotSaturatedWithin,
    TeacherInconsistent,
    UnknownLetter,
)

EXIT_OK, EXIT_LEARN, EXIT_INPUT, EXIT_PRECONDITION, EXIT_MISMATCH = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def load_any(path: str):
    """Load a recogniser or a pomset automaton, telling them apart by their keys."""
    data = _read_json(path)
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a JSON object")
    if "states" in data:
        return pa.from_dict(data)
    if "elements" in data:
        return rc.from_dict(data)
    raise FormatError(f"{path}: neither a recogniser nor a pomset automaton")


def _as_recogniser(obj, bound: int) -> rc.Recogniser:
    return obj if isinstance(obj, rc.Recogniser) else pa.pa_to_recogniser(obj, bound)


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_predicate(path: str):
    """A ``.py`` file defining ``member(u)`` and ``ALPHABET``, or any JSON target."""
    if path.endswith(".py"):
        spec = importlib.util.spec_from_file_location("_pomlearn_predicate", path)
        if spec is None or spec.loader is None:
            raise FormatError(f"cannot load {path}")
        mod = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(mod)
        try:
            return mod.member, tuple(mod.ALPHABET)
        except AttributeError as exc:
            raise FormatError(f"{path}: {exc}") from None
    target = load_any(path)
    return target.accepts, target.alphabet


def make_teacher(spec: str, bound: int) -> tch.Teacher:
    kind, _, arg = spec.partition(":")
    if kind == "recogniser":
        return tch.recogniser_teacher(rc.load(arg))
    if kind == "pa":
        return tch.pa_teacher(pa.load(arg), bound)
    if kind == "bounded":
        path, sep, n = arg.rpartition(",")
        if not sep:
            raise UsageError("bounded teacher needs <file>,<N>")
        try:
            depth = int(n)
        except ValueError:
            raise UsageError(f"bad node bound {n!r}") from None
        if depth < 0:
            raise UsageError("node bound must be non-negative")
        member, alphabet = _load_predicate(path)
        return tch.bounded_teacher(member, depth, alphabet)
    raise UsageError(f"unknown teacher kind {kind!r}")


# -- commands -------------------------------------------------------------


def cmd_learn(args) -> int:
    teacher = make_teacher(args.teacher, args.bound)
    transcript: list[str] | None = [] if args.transcript else None
    try:
        h, stats = learner.learn(teacher, transcript=transcript)
    finally:
        if transcript is not None:
            Path(args.transcript).write_text("\n".join(transcript) + "\n")
    if args.output:
        rc.save(h, args.output)
    print(stats.line())
    if stats.bounded:
        print(f"bounded: no counterexample with at most {teacher.bound} nodes")
    return EXIT_OK


def cmd_convert(args) -> int:
    src = load_any(args.input)
    if args.to == "recogniser":
        if isinstance(src, rc.Recogniser):
            raise UsageError("input is already a recogniser")
        out = rc.dumps(pa.pa_to_recogniser(src, args.bound))
    else:
        if not isinstance(src, rc.Recogniser):
            raise UsageError("input must be a recogniser")
        a = pa.recogniser_to_pa(src) if args.to == "pa" else pa.recogniser_to_fork_acyclic_pa(src)
        out = pa.dumps(a)
    _write(out + "\n", args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    obj = load_any(args.input)
    is_rec = isinstance(obj, rc.Recogniser)
    chosen = [c for c in ("axioms", "minimal", "depth_nilpotent", "saturated", "fork_acyclic") if getattr(args, c)]
    if not chosen:
        chosen = ["axioms", "minimal", "depth_nilpotent"] if is_rec else ["saturated", "fork_acyclic"]
    passed = True
    for check in chosen:
        if check in ("axioms", "minimal", "depth_nilpotent") and not is_rec:
            obj_r = _as_recogniser(obj, args.bound)
        elif check in ("saturated", "fork_acyclic") and is_rec:
            obj_r = pa.recogniser_to_pa(obj)
        else:
            obj_r = obj
        ok, detail = _run_check(check, obj_r, args.bound)
        passed &= ok
        print(detail)
    return EXIT_OK if passed else EXIT_PRECONDITION


def _run_check(check: str, obj, bound: int) -> tuple[bool, str]:
    if check == "axioms":
        report = rc.validate_axioms(obj.bimonoid)
        if report.ok:
            return True, "ok"
        return False, "axioms: " + report.violations[0].describe(obj.elements)
    if check == "minimal":
        m = rc.is_minimal(obj)
        if m.minimal:
            return True, "ok"
        if m.unreachable:
            return False, "minimal: unreachable " + ", ".join(obj.name(x) for x in m.unreachable)
        x, y = m.merged
        return False, f"minimal: {obj.name(x)} and {obj.name(y)} are equivalent"
    if check == "depth_nilpotent":
        d = rc.depth_analysis(obj)
        if d.is_depth_nilpotent:
            return True, f"ok max-chain={d.max_chain}"
        return False, f"depth-nilpotent: {d.failure_witness}"
    if check == "saturated":
        s = pa.check_saturated(obj, bound, first_only=True)
        return (True, "ok") if s.ok else (False, f"saturated: {s.witness}")
    f = pa.is_fork_acyclic(obj)
    if f.acyclic:
        return True, "ok"
    q, r, fork = f.witness
    return False, f"fork-acyclic: ({q}, {r}) via fork {{{', '.join(fork)}}}"


def _check_letters(u: pm.Pomset, alphabet):
    extra = u.letters() - set(alphabet)
    if extra:
        raise AlphabetMismatch(f"letters {sorted(extra)} are not in the alphabet {list(alphabet)}")


def cmd_eval(args) -> int:
    obj = load_any(args.input)
    u = pm.parse(args.term)
    if isinstance(u, pm.Context):
        raise UsageError("cannot evaluate a context")
    _check_letters(u, obj.alphabet)
    print(int(obj.accepts(u)))
    return EXIT_OK


def cmd_equiv(args) -> int:
    left = _as_recogniser(load_any(args.left), args.bound)
    right = _as_recogniser(load_any(args.right), args.bound)
    result = rc.equivalence(left, right)
    print("equal" if result.equal else f"cex {result.counterexample}")
    return EXIT_OK


def cmd_enum(args) -> int:
    if args.max_nodes > args.cap:
        raise UsageError(f"--max-nodes {args.max_nodes} exceeds the cap {args.cap}; raise --cap to allow it")
    letters = [a for a in args.alphabet.split(",") if a]
    out = sys.stdout
    for u in pm.enumerate_pomsets(letters, args.max_nodes):
        out.write(f"{u}\n")
    return EXIT_OK


def cmd_minimize(args) -> int:
    r = _as_recogniser(load_any(args.input), args.bound)
    _write(rc.dumps(rc.minimize(r)) + "\n", args.output)
    return EXIT_OK


def cmd_dot(args) -> int:
    obj = load_any(args.input)
    a = pa.recogniser_to_pa(obj) if isinstance(obj, rc.Recogniser) else obj
    _write(pa.to_dot(a), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pomlearn", description="Learn and convert pomset recognisers.")
    sub = p.add_subparsers(dest="command", required=True)

    def bound(sp):
        sp.add_argument("--bound", type=int, default=6, help="saturation screening bound in nodes (default 6)")

    sp = sub.add_parser("learn", help="learn a recogniser from a teacher")
    sp.add_argument("--teacher", required=True, help="recogniser:<file> | pa:<file> | bounded:<file>,<N>")
    sp.add_argument("-o", "--output")
    sp.add_argument("--transcript", help="write the query transcript to this file")
    bound(sp)
    sp.set_defaults(func=cmd_learn)

    sp = sub.add_parser("convert", help="convert between recognisers and automata")
    sp.add_argument("input", help="input JSON file, or - for standard input")
    sp.add_argument("--to", required=True, choices=["pa", "recogniser", "fork-acyclic-pa"])
    sp.add_argument("-o", "--output")
    bound(sp)
    sp.set_defaults(func=cmd_convert)

    sp = sub.add_parser("check", help="check structural properties")
    sp.add_argument("input")
    for flag in ("--axioms", "--minimal", "--depth-nilpotent", "--saturated", "--fork-acyclic"):
        sp.add_argument(flag, action="store_true")
    bound(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("eval", help="decide membership of a pomset term")
    sp.add_argument("input")
    sp.add_argument("term")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("equiv", help="compare two languages")
    sp.add_argument("left")
    sp.add_argument("right")
    bound(sp)
    sp.set_defaults(func=cmd_equiv)

    sp = sub.add_parser("enum", help="list sp-pomsets in canonical order")
    sp.add_argument("--alphabet", required=True, help="comma-separated letters")
    sp.add_argument("--max-nodes", type=int, default=4)
    sp.add_argument("--cap", type=int, default=7)
    sp.set_defaults(func=cmd_enum)

    sp = sub.add_parser("minimize", help="minimise a recogniser")
    sp.add_argument("input")
    sp.add_argument("-o", "--output")
    bound(sp)
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("dot", help="Graphviz rendering of an automaton")
    sp.add_argument("input")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_dot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("bound", "max_nodes", "cap"):
        if getattr(args, name, 0) < 0:
            parser.error(f"--{name.replace('_', '-')} must be non-negative")
    try:
        return args.func(args)
    except TeacherInconsistent as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LEARN
    except (NotSaturatedWithin, NotDepthNilpotent, ClosureDiverged) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (AlphabetMismatch, UnknownLetter) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (OSError, ValueError, InvalidBimonoid, UsageError) as exc:
        # FormatError, ParseError and JSON errors are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
