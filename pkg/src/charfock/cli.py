"""Batch command-line front-end.

Subcommands: charfn, transfer, lift-charfn, check, coincide, equiv,
mobius, examples, proptest.  Inputs are JSON files in the documented
schemas; reports are emitted as deterministic text or JSON (identical
inputs, flags and seed give identical bytes).

Exit codes: 0 all checks passed / output written, 1 a mathematical check
failed, 2 invalid input, 3 solver verdict unknown.
"""

import argparse
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import equiv as eqmod
from . import mobius as mbmod
from .colligation import is_coisometric, transfer_symbol, unobservable_subspace
from .errors import CharfockError, ComputationError, InputError
from .examples import CATALOG_KEYS, run_examples
from .fockseries import series_max_dev
from .lifting import (
    lifting_char_decomposed,
    lifting_char_direct,
    minimality_check,
    resolving_check,
)
from .proptests import SUITE_NAMES, run_suite
from .rowcon import char_symbol, is_cnc, validate
from .schemas import (
    SchemaError,
    colligation_from_json,
    dump_json,
    lifting_from_json,
    load_json_file,
    matrix_to_json,
    rowcon_from_json,
    series_from_json,
    series_to_json,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_UNKNOWN = 3

CHECK_KINDS = ("cnc", "coisom", "observable", "minimal", "resolving")

__all__ = ["JobSpec", "run", "main"]


@dataclass
class JobSpec:
    """One batch job: command, inputs, numeric knobs, output routing."""

    command: str
    inputs: list = field(default_factory=list)
    degree: int = 12
    tol: float | None = None
    rank_tol: float = 1e-10
    seed: int = 42
    output: str | None = None
    fmt: str = "text"
    method: str = "decomposed"
    check_kind: str | None = None
    which: str = "all"
    suite: str = "all"
    cases: int = 50
    restarts: int = 16
    iters: int = 500
    a: complex = 0.0
    samples: tuple = (0.0, 0.3, -0.3, 0.2j)

    def __post_init__(self):
        if self.degree < 0:
            raise InputError("degree must be nonnegative")
        if self.tol is not None and self.tol <= 0:
            raise InputError("tolerance must be positive")
        if self.rank_tol <= 0:
            raise InputError("rank tolerance must be positive")
        self.seed = int(self.seed) & (2**64 - 1)


# ---------------------------------------------------------------------------
# rendering


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return matrix_to_json(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return [z.real, z.imag]
    return obj


def _fmt_scalar(z: complex) -> str:
    z = complex(z)
    if z.imag == 0.0:
        return repr(z.real)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}j"


def _fmt_matrix(mat: np.ndarray) -> str:
    rows = [
        "[" + ", ".join(_fmt_scalar(z) for z in row) + "]" for row in np.asarray(mat)
    ]
    return "[" + "; ".join(rows) + "]"


def render_text(obj, indent: int = 0) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for key, value in obj.items():
            if isinstance(value, (dict, list, tuple)) and not isinstance(
                value, np.ndarray
            ):
                lines.append(f"{pad}{key}:")
                lines.extend(render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_render_leaf(value)}")
    elif isinstance(obj, (list, tuple)):
        for value in obj:
            if isinstance(value, (dict, list, tuple)) and not isinstance(
                value, np.ndarray
            ):
                lines.append(f"{pad}-")
                lines.extend(render_text(value, indent + 1))
            else:
                lines.append(f"{pad}- {_render_leaf(value)}")
    else:
        lines.append(f"{pad}{_render_leaf(obj)}")
    return lines


def _render_leaf(value) -> str:
    if isinstance(value, np.ndarray):
        return _fmt_matrix(value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (complex, np.complexfloating)):
        return _fmt_scalar(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _emit(report: dict, job: JobSpec):
    if job.fmt == "json":
        text = dump_json(to_jsonable(report))
    else:
        text = "\n".join(render_text(report)) + "\n"
    if job.output:
        with open(job.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# command implementations


def _collect_warnings(records) -> list:
    return sorted({str(r.message) for r in records})


def _cmd_charfn(job: JobSpec):
    t = rowcon_from_json(load_json_file(job.inputs[0]))
    report_v = validate(t)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        series = char_symbol(t, job.degree, job.rank_tol)
    report = {
        "command": "charfn",
        "input": job.inputs[0],
        "degree": job.degree,
        "is_contraction": report_v.is_contraction,
        "row_gram_top_eigenvalue": report_v.norm,
        "cnc": is_cnc(t, job.rank_tol),
        "warnings": _collect_warnings(caught),
        "series": series_to_json(series),
    }
    return EXIT_OK, report


def _cmd_transfer(job: JobSpec):
    w = colligation_from_json(load_json_file(job.inputs[0]))
    series = transfer_symbol(w, job.degree)
    coiso, resid = is_coisometric(w)
    report = {
        "command": "transfer",
        "input": job.inputs[0],
        "degree": job.degree,
        "coisometric": coiso,
        "coisometry_residual": resid,
        "observable": unobservable_subspace(w, job.rank_tol).dim == 0,
        "series": series_to_json(series),
    }
    return EXIT_OK, report


def _cmd_lift_charfn(job: JobSpec):
    lifting = lifting_from_json(load_json_file(job.inputs[0]))
    tol = job.tol if job.tol is not None else 1e-9
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = {
            "command": "lift-charfn",
            "input": job.inputs[0],
            "degree": job.degree,
            "method": job.method,
            "minimal": minimality_check(lifting, job.rank_tol),
            "resolving": resolving_check(lifting, job.rank_tol).resolving,
        }
        code = EXIT_OK
        if job.method in ("decomposed", "both"):
            dec = lifting_char_decomposed(lifting, job.degree, job.rank_tol)
            report["series"] = series_to_json(dec)
        if job.method in ("direct", "both"):
            dire = lifting_char_direct(lifting, job.degree, job.rank_tol)
            key = "series" if job.method == "direct" else "series_direct"
            report[key] = series_to_json(dire)
        if job.method == "both":
            dev = series_max_dev(dire, dec)
            report["max_coefficient_deviation"] = dev
            report["tol"] = tol
            report["agree"] = dev <= tol
            if dev > tol:
                code = EXIT_CHECK_FAILED
    report["warnings"] = _collect_warnings(caught)
    return code, report


def _cmd_check(job: JobSpec):
    kind = job.check_kind
    obj = load_json_file(job.inputs[0])
    tol = job.tol if job.tol is not None else 1e-10
    report = {"command": "check", "kind": kind, "input": job.inputs[0]}
    if kind == "cnc":
        t = rowcon_from_json(obj)
        passed = is_cnc(t, job.rank_tol)
        report["cnc"] = passed
    elif kind == "coisom":
        w = colligation_from_json(obj)
        passed, resid = is_coisometric(w, tol)
        report["coisometric"] = passed
        report["residual"] = resid
    elif kind == "observable":
        w = colligation_from_json(obj)
        dim = unobservable_subspace(w, job.rank_tol).dim
        passed = dim == 0
        report["observable"] = passed
        report["unobservable_dim"] = dim
    elif kind == "minimal":
        lifting = lifting_from_json(obj)
        passed = minimality_check(lifting, job.rank_tol)
        report["minimal"] = passed
    elif kind == "resolving":
        lifting = lifting_from_json(obj)
        res = resolving_check(lifting, job.rank_tol)
        passed = res.resolving
        report["resolving"] = passed
        if res.witness_word is not None:
            report["witness_word"] = list(res.witness_word)
    else:
        raise InputError(f"unknown check kind {kind!r}")
    report["passed"] = bool(passed)
    return (EXIT_OK if passed else EXIT_CHECK_FAILED), report


def _verdict_exit(status: str) -> int:
    if status == "confirmed":
        return EXIT_OK
    if status == "refuted_by_invariant":
        return EXIT_CHECK_FAILED
    return EXIT_UNKNOWN


def _cmd_coincide(job: JobSpec):
    s1 = series_from_json(load_json_file(job.inputs[0]), "first series")
    s2 = series_from_json(load_json_file(job.inputs[1]), "second series")
    verdict = eqmod.coincidence_solve(
        s1, s2, restarts=job.restarts, iters=job.iters, seed=job.seed, tol=job.tol
    )
    report = {
        "command": "coincide",
        "inputs": list(job.inputs),
        "status": verdict.status,
        "residual": verdict.residual,
        "certificate": verdict.certificate,
        "unitaries": [matrix_to_json(u) for u in verdict.unitaries],
    }
    return _verdict_exit(verdict.status), report


def _cmd_equiv(job: JobSpec):
    s1 = series_from_json(load_json_file(job.inputs[0]), "first series")
    s2 = series_from_json(load_json_file(job.inputs[1]), "second series")
    verdict = eqmod.equivalence_solve(s1, s2, tol=job.tol)
    report = {
        "command": "equiv",
        "inputs": list(job.inputs),
        "status": verdict.status,
        "residual": verdict.residual,
        "certificate": verdict.certificate,
        "unitaries": [matrix_to_json(u) for u in verdict.unitaries],
    }
    return _verdict_exit(verdict.status), report


def _cmd_mobius(job: JobSpec):
    obj = load_json_file(job.inputs[0])
    if isinstance(obj, dict) and ("E" in obj or "gamma" in obj):
        lifting = lifting_from_json(obj)
        rep = mbmod.verify_lifting_cf(
            lifting, job.a, job.samples, job.degree, job.rank_tol
        )
    else:
        t = rowcon_from_json(obj)
        if t.arity != 1:
            raise InputError("the transform verification needs a single contraction")
        rep = mbmod.verify_cf_relation(
            t.blocks[0], job.a, job.samples, job.degree, job.rank_tol
        )
    rep = {"command": "mobius", "input": job.inputs[0], **rep}
    return (EXIT_OK if rep["ok"] else EXIT_CHECK_FAILED), rep


def _cmd_examples(job: JobSpec):
    rep = run_examples(job.which, job.degree, job.tol)
    rep = {"command": "examples", **rep}
    return (EXIT_OK if rep["ok"] else EXIT_CHECK_FAILED), rep


def _cmd_proptest(job: JobSpec):
    rep = run_suite(job.suite, job.cases, job.seed)
    rep = {"command": "proptest", **rep}
    return (EXIT_OK if rep["ok"] else EXIT_CHECK_FAILED), rep


_COMMANDS = {
    "charfn": (_cmd_charfn, 1),
    "transfer": (_cmd_transfer, 1),
    "lift-charfn": (_cmd_lift_charfn, 1),
    "check": (_cmd_check, 1),
    "coincide": (_cmd_coincide, 2),
    "equiv": (_cmd_equiv, 2),
    "mobius": (_cmd_mobius, 1),
    "examples": (_cmd_examples, 0),
    "proptest": (_cmd_proptest, 0),
}


def run(job: JobSpec) -> int:
    """Execute one job and emit its report; returns the exit code."""
    handler, n_inputs = _COMMANDS[job.command]
    if len(job.inputs) != n_inputs:
        raise InputError(
            f"{job.command} expects {n_inputs} input file(s), got {len(job.inputs)}"
        )
    code, report = handler(job)
    _emit(report, job)
    return code


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser, n_inputs: int):
    for i in range(n_inputs):
        parser.add_argument(f"input{i + 1 if n_inputs > 1 else ''}", nargs=None)
    parser.add_argument("--degree", "-N", type=int, default=12, help="truncation degree")
    parser.add_argument("--tol", type=float, default=None, help="check tolerance")
    parser.add_argument("--rank-tol", type=float, default=1e-10, help="rank cutoff")
    parser.add_argument("--seed", type=int, default=42, help="solver seed")
    parser.add_argument("--output", "-o", default=None, help="write the report here")
    parser.add_argument(
        "--format", choices=("text", "json"), default="text", help="report format"
    )


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charfock",
        description="characteristic-function calculus for row contractions "
        "and contractive liftings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("charfn", help="characteristic symbol of a row contraction")
    _add_common(p, 1)

    p = sub.add_parser("transfer", help="transfer symbol of a colligation")
    _add_common(p, 1)

    p = sub.add_parser("lift-charfn", help="characteristic symbol of a lifting")
    _add_common(p, 1)
    p.add_argument(
        "--method",
        choices=("direct", "decomposed", "both"),
        default="decomposed",
    )

    p = sub.add_parser("check", help="boolean structure checks")
    p.add_argument("kind", choices=CHECK_KINDS)
    _add_common(p, 1)

    p = sub.add_parser("coincide", help="two-sided unitary matching of two symbols")
    _add_common(p, 2)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--iters", type=int, default=500)

    p = sub.add_parser("equiv", help="input-side unitary matching of two symbols")
    _add_common(p, 2)

    p = sub.add_parser("mobius", help="disc-automorphism transform verification")
    _add_common(p, 1)
    p.add_argument("--a", default="0.4", help="transform parameter (complex literal)")
    p.add_argument(
        "--samples",
        default="0,0.3,-0.3,0.2j",
        help="comma-separated evaluation points",
    )
    p.set_defaults(degree=40)

    p = sub.add_parser("examples", help="run the built-in worked-example catalog")
    _add_common(p, 0)
    p.add_argument("--which", choices=CATALOG_KEYS + ("all",), default="all")

    p = sub.add_parser("proptest", help="seeded property suites")
    _add_common(p, 0)
    p.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    p.add_argument("--cases", type=int, default=50)

    return parser


def _job_from_args(args: argparse.Namespace) -> JobSpec:
    inputs = []
    for key in ("input", "input1", "input2"):
        value = getattr(args, key, None)
        if value is not None:
            inputs.append(value)
    seed = args.seed
    env_seed = os.environ.get("CHARFOCK_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError as exc:
            raise InputError(f"CHARFOCK_SEED must be an integer, got {env_seed!r}") from exc
    job = JobSpec(
        command=args.command,
        inputs=inputs,
        degree=args.degree,
        tol=args.tol,
        rank_tol=args.rank_tol,
        seed=seed,
        output=args.output,
        fmt=args.format,
    )
    if args.command == "lift-charfn":
        job.method = args.method
    if args.command == "check":
        job.check_kind = args.kind
    if args.command == "coincide":
        job.restarts = args.restarts
        job.iters = args.iters
    if args.command == "mobius":
        job.a = _parse_complex(args.a)
        job.samples = tuple(
            _parse_complex(s) for s in args.samples.split(",") if s.strip()
        )
    if args.command == "examples":
        job.which = args.which
    if args.command == "proptest":
        job.suite = args.suite
        job.cases = args.cases
        if job.cases < 0:
            raise InputError("cases must be nonnegative")
    return job


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        job = _job_from_args(args)
        return run(job)
    except (SchemaError, InputError) as exc:
        print(f"charfock: invalid input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ComputationError as exc:
        print(f"charfock: check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except CharfockError as exc:
        print(f"charfock: error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
