"""Command-line interface: analyze, solve, eval, verify.

Input is a JSON document

    {"terms": [{"d": 1.0, "alpha": 2.0}, ...], "beta": 2.0, "nu2": 0.25}

Exit codes: 0 success, 2 input error, 3 numerical failure, 4 verification
failure. Output files are written only after every computation succeeded,
each through a temporary file renamed into place.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .characteristic import (
    DEFAULT_STEP,
    CharacteristicRoot,
    classify,
    find_roots,
    resolve_window,
)
from .equation import EquationSpec, validate
from .errors import FracBesselError, ValidationError
from .series import SeriesSolution, build, choose_truncation, coefficients_csv, evaluate
from .verifier import residual

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4
VERIFY_TOL = 1e-6

_TOP_KEYS = {"terms", "beta", "nu2"}
_TERM_KEYS = {"d", "alpha"}


class InputError(Exception):
    """Malformed input document or invalid option combination."""


def _no_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise InputError(f"duplicate key {k!r}")
        seen[k] = v
    return seen


def parse_input(document: str) -> EquationSpec:
    """Parse and validate an equation document.

    Raises:
        InputError: JSON syntax error (with line and column) or unknown/duplicate keys.
        ValidationError: invalid values, one entry per problem.
    """
    try:
        raw = json.loads(document, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise InputError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(raw, dict):
        raise InputError("top level must be an object with keys terms, beta, nu2")
    problems = [f"{k}: unknown key" for k in sorted(set(raw) - _TOP_KEYS)]
    terms = raw.get("terms")
    if isinstance(terms, list):
        for i, t in enumerate(terms):
            if isinstance(t, dict):
                problems += [f"terms[{i}].{k}: unknown key" for k in sorted(set(t) - _TERM_KEYS)]
    if problems:
        raise InputError("; ".join(problems))
    return validate(raw)


@dataclass
class RunConfig:
    command: str
    input_path: str
    scan_lo: float | None = None
    scan_hi: float | None = None
    step: float = DEFAULT_STEP
    order: int | None = None
    target: float = 1e-12
    x_min: float = 0.01
    x_max: float = 5.0
    points: int = 200
    b: float = 1.0
    out: str = "out"
    plot: bool = False


def _g(v: float) -> str:
    return format(v, ".18g")


def _describe(spec: EquationSpec) -> str:
    text = ""
    for i, t in enumerate(spec.terms):
        sign = ("-" if t.d < 0 else "") if i == 0 else (" - " if t.d < 0 else " + ")
        text += f"{sign}{abs(t.d):g} x^{t.alpha:g} D^{t.alpha:g} u"
    return text + f" + (x^{spec.beta:g} - {spec.nu2:g}) u = 0"


def _root_table(roots: list[CharacteristicRoot]) -> list[str]:
    lines = [f"  {'#':>2}  {'gamma':>14}  {'mult':>4}  {'status':<22}  {'G-nu2':>10}  note"]
    for i, r in enumerate(roots, 1):
        lines.append(
            f"  {i:>2}  {r.gamma:>14.8f}  {r.multiplicity:>4}  {r.status.value:<22}  "
            f"{r.residual:>10.2e}  {r.reject_info or ''}".rstrip()
        )
    return lines


def _analysis(spec: EquationSpec, cfg: RunConfig):
    lo, hi = resolve_window(spec, cfg.scan_lo, cfg.scan_hi, cfg.step)
    roots = find_roots(spec, lo, hi, cfg.step)
    diag = classify(spec, roots, cfg.b)
    lines = [f"equation: {_describe(spec)}"]
    if spec.integer_only:
        lines.append(f"orders: integer only, p = {spec.p}")
        lines.append("nu2_min: not applicable (integer orders only)")
    else:
        lines.append(f"orders: n_max = {spec.n_max}, alpha_max = {spec.alpha_max:g}, p = {spec.p}")
        met = "satisfied" if diag.nu2_satisfied else "not satisfied"
        lines.append(f"nu2_min: {diag.nu2_min:.6f} ({met} by nu2 = {spec.nu2:g})")
    lines.append(f"uniqueness: {diag.uniqueness_class.value}")
    lines.append(
        f"IVP bound (b = {cfg.b:g}): {diag.ivp_bound:.6f}; "
        f"{'unique' if diag.ivp_unique else 'uniqueness not guaranteed'} (nu2 = {spec.nu2:g})"
    )
    lines.append(f"roots in [{lo:g}, {hi:g}], step {cfg.step:g}:")
    lines += _root_table(roots) if roots else ["  (none)"]
    if diag.valid_roots == 0:
        lines.append("no valid roots: the equation has no series solution of this form")
    return roots, diag, lo, hi, lines


def _solutions(spec: EquationSpec, roots: list[CharacteristicRoot], cfg: RunConfig):
    """[(root_index, root, solution)] for every valid root and branch."""
    out = []
    for i, r in enumerate(roots, 1):
        if not r.is_valid:
            continue
        n = cfg.order if cfg.order is not None else choose_truncation(spec, r, cfg.x_max, cfg.target)
        for sol in build(spec, r, n):
            out.append((i, r, sol))
    return out


def _stem(i: int, sol: SeriesSolution) -> str:
    return f"root{i}_branch{sol.branch}"


def _grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.x_min, cfg.x_max, cfg.points)


def _csv(header: str, rows) -> bytes:
    return (header + "\n" + "".join(",".join(_g(v) for v in row) + "\n" for row in rows)).encode()


def _manifest(spec, roots, diag, lo, hi, sols, cfg) -> bytes:
    doc = {
        "spec": spec.to_dict(),
        "scan": {"lo": lo, "hi": hi, "step": cfg.step},
        "diagnosis": {
            "nu2_min": diag.nu2_min,
            "nu2_satisfied": diag.nu2_satisfied,
            "uniqueness_class": diag.uniqueness_class.value,
            "ivp_bound": diag.ivp_bound,
            "ivp_unique": diag.ivp_unique,
            "b": diag.b,
        },
        "roots": [
            {"index": i, "gamma": r.gamma, "multiplicity": r.multiplicity, "status": r.status.value,
             "reject_info": r.reject_info, "residual": r.residual}
            for i, r in enumerate(roots, 1)
        ],
        "solutions": [
            {"root": i, "gamma": s.gamma, "beta": s.beta, "multiplicity": s.multiplicity,
             "branch": s.branch, "N": s.N, "c0": s.c0_normalization, "file": f"coeffs_{_stem(i, s)}.csv"}
            for i, _, s in sols
        ],
    }
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()


def _check_grid(cfg: RunConfig) -> None:
    if not (cfg.x_min > 0 and cfg.x_max > cfg.x_min):
        raise InputError(f"need 0 < x-min < x-max, got x-min={cfg.x_min}, x-max={cfg.x_max}")
    if cfg.points < 2:
        raise InputError(f"points must be >= 2, got {cfg.points}")


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one command; returns the exit status. Raises on errors (see main)."""
    stdout = sys.stdout if stdout is None else stdout
    if cfg.order is not None and cfg.order < 0:
        raise InputError(f"order must be >= 0, got {cfg.order}")
    if not cfg.target > 0:
        raise InputError(f"target must be > 0, got {cfg.target}")
    if not cfg.b > 0:
        raise InputError(f"b must be > 0, got {cfg.b}")
    if not cfg.step > 0:
        raise InputError(f"step must be > 0, got {cfg.step}")
    if cfg.scan_lo is not None and not cfg.scan_lo > -1.0:
        raise InputError(f"scan-lo must be > -1, got {cfg.scan_lo}")
    if cfg.command != "analyze":
        _check_grid(cfg)
    try:
        text = Path(cfg.input_path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {cfg.input_path}: {e.strerror}") from None
    spec = parse_input(text)

    roots, diag, lo, hi, lines = _analysis(spec, cfg)
    files: dict[str, bytes] = {}
    status = EXIT_OK

    if cfg.plot:
        from .plotting import characteristic_png

        # the scan window can reach gamma = 500; show the part holding the roots
        right = max([r.gamma for r in roots] + [spec.caputo_floor or 0.0]) + 5.0
        files["characteristic.png"] = characteristic_png(spec, roots, lo, min(hi, right))

    if cfg.command != "analyze":
        sols = _solutions(spec, roots, cfg)
        xs = _grid(cfg)
        if cfg.command == "solve":
            files["manifest.json"] = _manifest(spec, roots, diag, lo, hi, sols, cfg)
            for i, _, s in sols:
                files[f"coeffs_{_stem(i, s)}.csv"] = coefficients_csv(s).encode()
                lines.append(f"root {i} branch {s.branch}: gamma = {s.gamma:.10g}, N = {s.N}")
        elif cfg.command == "eval":
            curves = []
            for i, _, s in sols:
                u = np.atleast_1d(evaluate(s, xs))
                files[f"u_{_stem(i, s)}.csv"] = _csv("x,u", zip(xs, u))
                curves.append((f"gamma={s.gamma:.4f}, branch {s.branch}", xs, u))
                finite = bool(np.all(np.isfinite(u)))
                lines.append(
                    f"root {i} branch {s.branch}: N = {s.N}, u({cfg.x_max:g}) = {u[-1]:.10g}"
                    + ("" if finite else " (non-finite values)")
                )
            if cfg.plot:
                from .plotting import solutions_png

                files["solutions.png"] = solutions_png(curves)
        elif cfg.command == "verify":
            for i, _, s in sols:
                rep = residual(spec, s, xs)
                files[f"residual_{_stem(i, s)}.csv"] = rep.to_csv().encode()
                ok = math.isfinite(rep.max_excess) and rep.max_excess <= VERIFY_TOL
                lines.append(
                    f"root {i} branch {s.branch}: N = {s.N}, max_excess = {rep.max_excess:.3e} "
                    f"{'PASS' if ok else 'FAIL'}"
                )
                if not ok:
                    status = EXIT_VERIFY
        if not sols:
            lines.append(f"{cfg.command}: nothing to do (no valid roots)")

    if files:
        _write_all(Path(cfg.out), files)
        lines.append(f"wrote {len(files)} file(s) to {cfg.out}")
    stdout.write("\n".join(lines) + "\n")
    return status


def _write_all(out: Path, files: dict[str, bytes]) -> None:
    """Write every file to a temporary name first, then rename them all."""
    out.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, data in sorted(files.items()):
            fd, tmp = tempfile.mkstemp(dir=out, prefix=f".{name}.", suffix=".tmp")
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            staged.append((tmp, out / name))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fracbessel",
        description="Series solutions of sum_i d_i x^a_i D^a_i u + (x^beta - nu2) u = 0 (Caputo).",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "analyze": "print nu2_min, uniqueness class, IVP bound and the root table",
        "solve": "also write coefficient CSVs and manifest.json",
        "eval": "write u(x) CSVs over the x grid",
        "verify": "write residual CSVs; exit 4 if max_excess > 1e-6",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text, description=text)
        s.add_argument("input", help="JSON equation document")
        s.add_argument("--scan-lo", type=float, help="lower edge of the root scan (default -1+1e-6)")
        s.add_argument("--scan-hi", type=float, help="upper edge of the root scan (default auto)")
        s.add_argument("--step", type=float, default=DEFAULT_STEP, help="scan grid step (default 1e-3)")
        s.add_argument("--b", type=float, default=1.0, help="interval [0, b] for the IVP bound (default 1)")
        s.add_argument("--plot", action="store_true", help="also write PNG figures to --out")
        s.add_argument("--out", default="out", help="output directory (default ./out)")
        if name != "analyze":
            s.add_argument("--order", type=int, help="truncation order N (default: chosen from --target)")
            s.add_argument("--target", type=float, default=1e-12,
                           help="tail bound at x-max used to choose N (default 1e-12)")
            s.add_argument("--x-min", type=float, default=0.01, help="grid start (default 0.01)")
            s.add_argument("--x-max", type=float, default=5.0, help="grid end (default 5)")
            s.add_argument("--points", type=int, default=200, help="grid size (default 200)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        input_path=args.input,
        scan_lo=args.scan_lo,
        scan_hi=args.scan_hi,
        step=args.step,
        b=args.b,
        out=args.out,
        plot=args.plot,
    )
    for key in ("order", "target", "x_min", "x_max", "points"):
        if hasattr(args, key):
            setattr(cfg, key, getattr(args, key))
    try:
        return run(cfg)
    except (InputError, ValidationError) as e:
        print(f"fracbessel: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except FracBesselError as e:
        print(f"fracbessel: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
