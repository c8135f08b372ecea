"""Command-line front end.

Subcommands: simulate, scatter, check, sweep, preset, classify.
Exit codes: 0 ok, 2 input error, 3 integrator failure, 4 unitarity defect.
All numeric output uses 17 significant digits so identical invocations
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import model as model_mod
from . import presets
from .model import ModelSpec, TransitionClass, load_model, validate
from .propagator import (IntegratorConfig, IntegratorError, StateVector,
                         choose_window, propagate, write_timeseries_csv)
from .scattering import (ColumnError, saturation_check, scattering_matrix,
                         write_amplitude_csv, write_probability_csv)
from .theory import be_survival, nogo_prediction

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTEGRATOR = 3
EXIT_UNITARITY = 4

UNITARITY_LIMIT = 1e-4


class _InputError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _say(args, text=""):
    if not args.quiet:
        print(text)


def _load(args) -> ModelSpec:
    try:
        spec = load_model(args.model)
    except OSError as exc:
        raise _InputError(f"cannot read model file: {exc}") from exc
    except model_mod.ModelFormatError as exc:
        raise _InputError(f"model file error: {exc}") from exc
    violations = validate(spec)
    errors = [v for v in violations if v.level == "error"]
    if errors:
        lines = "\n".join(f"  {v}" for v in violations)
        raise _InputError(f"model validation failed:\n{lines}")
    for v in violations:
        if not args.quiet:
            print(f"warning: {v.message}", file=sys.stderr)
    return spec


def _config(args) -> IntegratorConfig:
    return IntegratorConfig(rtol=args.rtol, atol=args.atol,
                            sample_count=getattr(args, "samples", 2000))


def _window(args, spec) -> float:
    if args.T is not None:
        if args.T <= 0:
            raise _InputError("--T must be positive")
        return args.T
    try:
        return choose_window(spec)
    except ValueError as exc:
        raise _InputError(f"cannot choose a window automatically: {exc}"
                          " (pass --T)") from exc


def _initial_index(args, spec) -> int:
    k = args.initial
    if not (1 <= k <= spec.n):
        raise _InputError(f"--initial must be in 1..{spec.n}")
    return k - 1


def _cmd_simulate(args) -> int:
    spec = _load(args)
    config = _config(args)
    t_span = _window(args, spec)
    k = _initial_index(args, spec)
    result = propagate(spec, StateVector.basis(spec.n, k, -t_span),
                       t_span, config)
    if args.out:
        write_timeseries_csv(result, args.out)
        _say(args, f"wrote {result.times.shape[0]} samples to {args.out}")
    final = result.final_state.probabilities
    _say(args, f"window [-{t_span:g}, {t_span:g}], initial state {k + 1}")
    for i, p in enumerate(final):
        _say(args, f"  P{i + 1} = {_fmt(p)}")
    _say(args, f"norm drift {result.norm_drift:.3e}, "
               f"{result.rhs_evals} derivative evaluations, "
               f"{result.rejected_steps} rejected steps")
    return EXIT_OK


def _cmd_scatter(args) -> int:
    spec = _load(args)
    config = _config(args)
    t_span = _window(args, spec)
    matrix = scattering_matrix(spec, t_span, config)
    defect = matrix.unitarity_defect()
    if args.out:
        write_probability_csv(matrix, args.out)
        amp_path = _companion_path(args.out)
        write_amplitude_csv(matrix, amp_path)
        _say(args, f"wrote probabilities to {args.out} and amplitudes to {amp_path}")
    _say(args, f"window [-{t_span:g}, {t_span:g}]")
    _say(args, "probability matrix (rows = final state, columns = initial):")
    for i in range(spec.n):
        _say(args, "  " + "  ".join(f"{p:10.6f}"
                                    for p in matrix.probabilities[i]))
    _say(args, f"unitarity defect {defect:.3e}, "
               f"max column drift {matrix.column_norm_drift.max():.3e}")
    if defect > UNITARITY_LIMIT:
        print(f"unitarity defect {defect:.3e} exceeds {UNITARITY_LIMIT:g}; "
              "results untrusted (tighten tolerances or shrink the window)",
              file=sys.stderr)
        return EXIT_UNITARITY
    return EXIT_OK


def _companion_path(out_path: str) -> str:
    root, ext = os.path.splitext(out_path)
    return f"{root}_amplitudes{ext or '.csv'}"


def _cmd_check(args) -> int:
    spec = _load(args)
    config = _config(args)
    t_span = _window(args, spec)
    k = _initial_index(args, spec)
    result = propagate(spec, StateVector.basis(spec.n, k, -t_span),
                       t_span, config)
    measured = result.final_state.probabilities

    print(f"window [-{t_span:g}, {t_span:g}], initial state {k + 1}")
    try:
        prediction = be_survival(spec, k)
        predicted = prediction.survival_probability
        dev = measured[k] - predicted
        rel = dev / predicted if predicted else float("inf")
        print("survival formula:")
        print(f"  predicted |S_kk|^2 = {_fmt(predicted)} "
              f"(exponent {_fmt(prediction.exponent)})")
        print(f"  measured           = {_fmt(measured[k])}")
        print(f"  deviation          = {dev:+.3e} ({rel:+.3%} relative)")
    except ValueError:
        print("survival formula: not applicable "
              "(initial state is not in an extreme-slope band)")

    try:
        pairs = sorted(nogo_prediction(spec))
    except ValueError:
        pairs = []
    relevant = [(m, n) for (m, n) in pairs if m == k]
    if relevant:
        print("forbidden transitions from the initial state:")
        for m, n in relevant:
            print(f"  {m + 1} -> {n + 1}: measured {_fmt(measured[n])}")
    else:
        print("forbidden transitions from the initial state: none")

    report = saturation_check(spec, k, t_span, config)
    flags = ", ".join(
        f"P{i + 1}={'yes' if s else 'NO'}"
        for i, s in enumerate(report.saturated))
    print(f"saturated at T vs 2T: {flags}")
    print("deltas vs 2T: "
          + ", ".join(f"{d:.2e}" for d in report.deltas))
    return EXIT_OK


_PARAM_RE = re.compile(
    r"^(?:(alpha|beta)\[(\d+)\]|coupling\[(\d+)\]\[(\d+)\]\.(re|im))$")


def _apply_param(spec: ModelSpec, path: str, value: float) -> ModelSpec:
    m = _PARAM_RE.match(path)
    if not m:
        raise _InputError(
            f"bad parameter path {path!r}; use alpha[i], beta[i], "
            "coupling[i][j].re or coupling[i][j].im (1-based)")
    if m.group(1):
        name, idx = m.group(1), int(m.group(2)) - 1
        if not (0 <= idx < spec.n):
            raise _InputError(f"index out of range in {path!r}")
        arr = np.array(getattr(spec, name))
        arr[idx] = value
        return spec.replace(**{name: arr})
    i, j = int(m.group(3)) - 1, int(m.group(4)) - 1
    if not (0 <= i < spec.n and 0 <= j < spec.n) or i == j:
        raise _InputError(f"index out of range in {path!r}")
    coupling = np.array(spec.coupling)
    g = coupling[i, j]
    g = complex(value, g.imag) if m.group(5) == "re" else complex(g.real, value)
    coupling[i, j] = g
    coupling[j, i] = np.conj(g)
    return spec.replace(coupling=coupling)


def _sweep_values(args) -> list[float]:
    if args.values is not None:
        try:
            values = [float(tok) for tok in args.values.split(",") if tok.strip()]
        except ValueError as exc:
            raise _InputError(f"bad --values list: {exc}") from exc
    else:
        start, stop, count = args.grid
        count = int(count)
        if count < 1:
            raise _InputError("--grid count must be >= 1")
        values = list(np.linspace(start, stop, count))
    if not values:
        raise _InputError("sweep needs at least one value")
    return sorted(values)


def _sweep_point(spec, path, value, k, t_arg, config):
    point = _apply_param(spec, path, value)
    errors = [v for v in validate(point) if v.level == "error"]
    if errors:
        raise _InputError("; ".join(v.message for v in errors))
    t_span = t_arg if t_arg is not None else choose_window(point)
    result = propagate(point, StateVector.basis(point.n, k, -t_span),
                       t_span, config)
    return result.final_state.probabilities


def _cmd_sweep(args) -> int:
    spec = _load(args)
    config = _config(args)
    k = _initial_index(args, spec)
    values = _sweep_values(args)
    _apply_param(spec, args.param, 0.0)  # fail fast on a bad path
    workers = max(1, min(args.workers or (os.cpu_count() or 1), len(values)))

    rows: list[np.ndarray | None] = [None] * len(values)
    failed = False
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {i: pool.submit(_sweep_point, spec, args.param, v, k,
                                  args.T, config)
                   for i, v in enumerate(values)}
        for i, v in enumerate(values):
            try:
                rows[i] = futures[i].result()
            except (IntegratorError, _InputError, ValueError) as exc:
                failed = True
                rows[i] = np.full(spec.n, np.nan)
                print(f"sweep point {args.param}={v:g} failed: {exc}",
                      file=sys.stderr)

    lines = ["param," + ",".join(f"P{i + 1}" for i in range(spec.n))]
    for v, row in zip(values, rows):
        lines.append(_fmt(v) + "," + ",".join(_fmt(float(p)) for p in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        _say(args, f"wrote {len(values)} sweep rows to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_INTEGRATOR if failed else EXIT_OK


def _cmd_preset(args) -> int:
    try:
        text = presets.preset_text(args.name, args.epsilon)
    except KeyError as exc:
        raise _InputError(str(exc.args[0])) from exc
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        _say(args, f"wrote preset {args.name!r} to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_classify(args) -> int:
    spec = _load(args)
    short = {
        TransitionClass.REGULAR_CROSSING: "cross",
        TransitionClass.COUNTERINTUITIVE: "COUNTER",
        TransitionClass.WITHIN_BAND_INTUITIVE: "in-band",
        TransitionClass.DEGENERATE: "degen",
        TransitionClass.INTERIOR_BAND: "interior",
    }
    try:
        table = [[("-" if m == n else
                   short[model_mod.classify_transition(spec, m, n)])
                  for n in range(spec.n)] for m in range(spec.n)]
    except ValueError as exc:
        raise _InputError(str(exc)) from exc
    width = max(len(cell) for row in table for cell in row) + 2
    header = "src\\dst" + "".join(f"{n + 1:>{width}}" for n in range(spec.n))
    print(header)
    for m, row in enumerate(table):
        print(f"{m + 1:<7}" + "".join(f"{cell:>{width}}" for cell in row))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlz",
        description="Multistate linear level-crossing dynamics: propagation, "
                    "scattering matrices, and closed-form cross-checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rtol", type=float, default=1e-10,
                        help="relative tolerance (default 1e-10)")
    common.add_argument("--atol", type=float, default=1e-12,
                        help="absolute tolerance (default 1e-12)")
    common.add_argument("--T", type=float, default=None,
                        help="window half-width (default: auto from crossings)")
    common.add_argument("--out", default=None, help="output CSV path")
    common.add_argument("--quiet", action="store_true",
                        help="suppress progress chatter")

    p = sub.add_parser("simulate", parents=[common],
                       help="propagate one initial state, write a time series")
    p.add_argument("model", help="model file")
    p.add_argument("--initial", type=int, default=1,
                   help="initial diabatic state, 1-based (default 1)")
    p.add_argument("--samples", type=int, default=2000,
                   help="number of output samples (default 2000)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("scatter", parents=[common],
                       help="full probability matrix with unitarity report")
    p.add_argument("model", help="model file")
    p.set_defaults(func=_cmd_scatter)

    p = sub.add_parser("check", parents=[common],
                       help="survival formula, forbidden entries, saturation")
    p.add_argument("model", help="model file")
    p.add_argument("--initial", type=int, default=1,
                   help="initial diabatic state, 1-based (default 1)")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("sweep", parents=[common],
                       help="final probabilities versus one model parameter")
    p.add_argument("model", help="model file")
    p.add_argument("--param", required=True,
                   help="parameter path: alpha[i], beta[i], "
                        "coupling[i][j].re, coupling[i][j].im (1-based)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--values", default=None,
                       help="comma-separated explicit values")
    group.add_argument("--grid", nargs=3, type=float, default=None,
                       metavar=("START", "STOP", "COUNT"),
                       help="linear grid")
    p.add_argument("--initial", type=int, default=1,
                   help="initial diabatic state, 1-based (default 1)")
    p.add_argument("--workers", type=int, default=None,
                   help="concurrent sweep points (default: cpu count)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("preset", parents=[common],
                       help="emit a built-in model file")
    p.add_argument("name", help=f"one of: {', '.join(presets.PRESET_NAMES)}")
    p.add_argument("epsilon", nargs="?", type=float, default=None,
                   help="band gap for the fig4 preset (default 0.5)")
    p.set_defaults(func=_cmd_preset)

    p = sub.add_parser("classify", parents=[common],
                       help="transition class table for all state pairs")
    p.add_argument("model", help="model file")
    p.set_defaults(func=_cmd_classify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ColumnError as exc:
        print(f"integrator error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR
    except IntegratorError as exc:
        print(f"integrator error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR


if __name__ == "__main__":
    sys.exit(main())
