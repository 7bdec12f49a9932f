"""``dbkit`` command line: one subcommand per operation, JSON envelope on stdout.

Exit codes: 0 success, 1 a ``verify`` suite failed, 2 bad input, 3 no convergence.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .classify import classify
from .exceptions import ConvergenceError, ValidationError
from .models import CATALOG, parse_complex, parse_space
from .moments import indeterminacy_diagnostic, moment_problem
from .operator import resolvent_apply, spectrum
from .phase import interpolate, sampling_grid
from .quadrature import QuadratureConfig
from .verify import verify_space

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


# -- output ------------------------------------------------------------------


def to_jsonable(obj):
    """Plain JSON tree: complex -> {"re", "im"}, arrays -> lists, non-finite -> null."""
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return bool(obj) if isinstance(obj, np.bool_) else obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "_asdict"):
        return to_jsonable(obj._asdict())
    return str(obj)


def dumps(tree) -> str:
    """Compact JSON with every float written to 17 significant digits."""
    if isinstance(tree, float):
        return format(tree, ".17g")
    if isinstance(tree, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {dumps(v)}" for k, v in tree.items()) + "}"
    if isinstance(tree, list):
        return "[" + ", ".join(dumps(v) for v in tree) + "]"
    return json.dumps(tree)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def load_schema(name: str) -> dict:
    """JSON schema shipped for a command payload (or ``"envelope"``)."""
    from importlib.resources import files
    return json.loads(files("dbkit").joinpath("schemas", f"{name}.json").read_text())


# -- argument helpers --------------------------------------------------------


def _window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise ValidationError(f"window must be 'lo,hi', got {text!r}") from None
    if not hi > lo:
        raise ValidationError(f"empty window {text!r}")
    return lo, hi


def _complex_list(values) -> np.ndarray:
    return np.array([parse_complex(v) for v in values], dtype=complex)


def _space(args):
    q = QuadratureConfig(eps=args.quadrature_eps) if args.quadrature_eps else None
    return parse_space(args.space, q)


def _read_numbers(path: str) -> list[list[str]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    # optional header
    if rows:
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
    return rows


def _threads() -> int | None:
    raw = os.environ.get("DBKIT_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"DBKIT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError(f"DBKIT_THREADS must be a positive integer, got {raw!r}")
    return n


# -- commands ----------------------------------------------------------------


def cmd_spaces(args):
    if args.space:
        sp = _space(args)
        return {"spaces": [{"id": args.space, "label": sp.label, "descriptor": sp.to_descriptor(),
                            "info": {k: v for k, v in sp.info.items() if not callable(v)}}]}, []
    return {"spaces": [{"id": k, "description": v} for k, v in CATALOG.items()]}, []


def cmd_kernel(args):
    sp = _space(args)
    z = _complex_list(args.z)
    w = _complex_list(args.w)
    if z.size != w.size:
        raise ValidationError(f"{z.size} z values but {w.size} w values")
    vals = sp.kernel(z, w)
    return {"values": [{"z": zi, "w": wi, "k": ki} for zi, wi, ki in zip(z, w, vals)]}, []


def cmd_spectrum(args):
    sp = _space(args)
    seq = spectrum(sp, args.beta, _window(args.window))
    return [float(v) for v in seq.eigenvalues], []


def cmd_sample(args):
    sp = _space(args)
    grid = sampling_grid(sp, args.alpha, _window(args.window))
    rows = list(zip(grid.points.tolist(), grid.weights.tolist()))
    payload = {"alpha": grid.alpha, "window": list(grid.window),
               "points": grid.points, "weights": grid.weights}
    return payload, [], _csv(rows, ["t", "weight"])


def _samples_from_file(path, grid):
    rows = _read_numbers(path)
    vals = []
    for r in rows:
        if len(r) == 1:
            vals.append(float(r[0]))
        elif len(r) == 2:  # t, value
            vals.append(float(r[1]))
        else:  # t, re, im
            vals.append(complex(float(r[1]), float(r[2])))
    if len(vals) != len(grid):
        raise ValidationError(f"{len(vals)} samples for a grid of {len(grid)} points")
    return np.asarray(vals, dtype=complex)


def _eval_points(args) -> np.ndarray:
    pts = list(args.z or [])
    if args.at:
        for r in _read_numbers(args.at):
            pts.append(r[0] if len(r) == 1 else f"{r[0]}+{r[1]}i".replace("+-", "-"))
    if not pts:
        raise ValidationError("no evaluation points (use --z or --at)")
    return _complex_list(pts)


def cmd_interpolate(args):
    sp = _space(args)
    grid = sampling_grid(sp, args.alpha, _window(args.window))
    samples = _samples_from_file(args.samples, grid)
    z = _eval_points(args)
    out = interpolate(grid, samples, z, full_output=True)
    vals = np.atleast_1d(out["value"])
    ind = np.atleast_1d(out["tail_indicator"])
    rows = [(zi.real, zi.imag, v.real, v.imag) for zi, v in zip(z, vals)]
    payload = {"z": z, "values": vals, "tail_indicator": ind}
    return payload, [], _csv(rows, ["z_re", "z_im", "value_re", "value_im"])


def cmd_resolvent(args):
    sp = _space(args)
    grid = sampling_grid(sp, args.alpha, _window(args.window))
    samples = _samples_from_file(args.samples, grid)

    from .entire import EntireFunction

    def f(z):
        return interpolate(grid, samples, z, check=False)

    g = resolvent_apply(sp, args.beta, parse_complex(args.w), EntireFunction(func=f, label="samples"))
    z = _eval_points(args)
    vals = np.atleast_1d(g(z))
    rows = [(zi.real, zi.imag, v.real, v.imag) for zi, v in zip(z, vals)]
    return {"beta": args.beta, "w": parse_complex(args.w), "z": z, "values": vals}, [], _csv(
        rows, ["z_re", "z_im", "value_re", "value_im"])


def cmd_classify(args):
    sp = _space(args)
    window = float(args.window) if args.window else None
    rep = classify(sp, n_max=args.nmax, window=window)
    return rep.to_dict(), list(rep.warnings)


def cmd_moments(args):
    rows = _read_numbers(args.file)
    moments = [r[0].strip() for r in rows]
    for m in moments:
        float(m)  # reject junk early
    prob = moment_problem(moments, args.K)
    z0 = parse_complex(args.z0)
    diag = indeterminacy_diagnostic(moments, args.K, z0)
    payload = {"polys": prob.poly_coefficients[:prob.K],
               "jacobi": {"a": prob.a, "b": prob.b},
               "diagnostics": {"z0": z0, "partial_sums": diag["partial_sums"],
                               "growth_exponent": diag["growth_exponent"],
                               "verdict": diag["verdict"], "working_dps": prob.dps}}
    return payload, list(prob.warnings)


def cmd_verify(args):
    sp = _space(args)
    window = _window(args.window) if args.window else (-30.0, 30.0)
    rep = verify_space(sp, window)
    return rep, []


COMMANDS = {"spaces": cmd_spaces, "kernel": cmd_kernel, "spectrum": cmd_spectrum,
            "sample": cmd_sample, "interpolate": cmd_interpolate, "resolvent": cmd_resolvent,
            "classify": cmd_classify, "moments": cmd_moments, "verify": cmd_verify}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--quadrature-eps", type=float, default=None,
                        help="relative tolerance of whole-line quadrature")
    common.add_argument("--out", default=None, help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="csv is available for sample, interpolate and resolvent")

    p = _Parser(prog="dbkit", description="de Branges space toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_, space=True, space_required=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if space:
            sp.add_argument("--space", required=space_required, help="catalog id, e.g. pw:a=1")
        return sp

    add("spaces", "list catalog spaces or describe one", space_required=False)
    s = add("kernel", "reproducing kernel values")
    s.add_argument("--z", action="append", required=True)
    s.add_argument("--w", action="append", required=True)
    s = add("spectrum", "zeros of s_beta in a window")
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--window", required=True)
    s = add("sample", "sampling grid for a phase offset")
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--window", required=True)
    for name, text in (("interpolate", "sampling series from grid samples"),
                       ("resolvent", "apply (S_beta - w)^-1 to a sampled function")):
        s = add(name, text)
        s.add_argument("--alpha", type=float, default=0.0)
        s.add_argument("--window", required=True)
        s.add_argument("--samples", required=True, help="CSV: value | t,value | t,re,im")
        s.add_argument("--z", action="append", help="evaluation point (repeatable)")
        s.add_argument("--at", help="CSV of evaluation points: re[,im]")
        if name == "resolvent":
            s.add_argument("--beta", type=float, required=True)
            s.add_argument("--w", required=True)
    s = add("classify", "smallest n with the space in E_n")
    s.add_argument("--nmax", type=int, default=4)
    s.add_argument("--window", default=None, help="half-width W of [-W, W]")
    s = add("moments", "Hamburger moment problem", space=False)
    s.add_argument("--file", required=True, help="one moment per line, s_0 first")
    s.add_argument("--K", type=int, default=12)
    s.add_argument("--z0", default="i")
    s = add("verify", "run the invariant suites on a space")
    s.add_argument("--window", default=None)
    return p


_VALUE_OPTS = {"--window", "--z", "--w", "--beta", "--alpha", "--z0"}


def _glue_negative(argv: list[str]) -> list[str]:
    """``--window -10,10`` -> ``--window=-10,10`` so argparse does not see an option."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTS and i + 1 < len(argv) and argv[i + 1][:1] == "-" \
                and argv[i + 1][1:2] not in ("-", ""):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out", "format")}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    t0 = time.perf_counter()
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        args = build_parser().parse_args(_glue_negative(argv))
        threads = _threads()
        result = COMMANDS[args.command](args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"dbkit: error: {exc}", file=stderr)
        return EXIT_INPUT
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"dbkit: no convergence: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError) as exc:
        print(f"dbkit: error: {exc}", file=stderr)
        return EXIT_INPUT
    payload, warns = result[0], result[1]
    table = result[2] if len(result) > 2 else None
    if args.format == "csv":
        if table is None:
            print(f"dbkit: error: {args.command} has no CSV output", file=stderr)
            return EXIT_INPUT
        text = table
    else:
        params = _params(args)
        if threads is not None:
            params["threads"] = threads
        envelope = {"command": args.command, "parameters": params,
                    "payload": to_jsonable(payload), "warnings": [str(w) for w in warns],
                    "timing_ms": (time.perf_counter() - t0) * 1e3}
        text = dumps(to_jsonable(envelope)) + "\n"
    for w in warns:
        print(f"dbkit: warning: {w}", file=stderr)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if args.command == "verify" and not payload["passed"]:
        return EXIT_FAILED
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
