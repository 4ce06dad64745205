"""Batch front-end: evolve trajectories, build and verify extensions,
run criterion checks and the seeded property suite.

Run specs are strict JSON documents with a schema_version field;
unknown keys are rejected so silent default drift cannot creep into
archived runs. Outputs (CSV, JSON, binary P6 heatmaps) are buffered in
memory and written only after the computation succeeds, so a failing
run leaves no partial files.

Exit codes: 0 pass, 1 mathematical fail (criterion or verification),
2 operational error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .analytic import (
    AnalyticMap,
    cardioid_map,
    half_plane_map,
    identity_map,
    koebe_map,
    polynomial_map,
    quadratic_map,
    root_scaled_koebe,
    scaled_koebe,
    sector_map,
)
from .beltrami import GridSpec
from .criteria import (
    ahlfors_becker_check,
    classify_subclass,
    schwarzian_norm_disk,
    sugawa_check,
)
from .errors import (
    LoewnerQCError,
    NormViolationError,
    PipelineError,
    SpecFormatError,
    UkViolationError,
)
from .loewner import (
    BerksonPortaData,
    HerglotzField,
    evolve_samples,
    herglotz_field_from_spec,
    schramm_field,
)
from .qcext import (
    ChainSpec,
    DEFAULT_REGION,
    extension_pipeline,
    sector_example,
    affine_laurent_example,
    radial_stretch_example,
    spiral_stretch_example,
)
from .suite import run_suite

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    subcommand: str
    spec_path: Optional[Path]
    out_dir: Path
    grid: Optional[tuple]
    tol: Optional[float]
    seed: int
    horizon: Optional[float]


# ---------------------------------------------------------------------------
# Strict spec parsing
# ---------------------------------------------------------------------------

def _load_spec(path: Path, allowed: set, required: set) -> dict:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecFormatError(f"cannot read spec {path}: {exc}")
    if not isinstance(obj, dict):
        raise SpecFormatError("spec document must be a JSON object")
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise SpecFormatError(
            f"spec must declare schema_version = {SCHEMA_VERSION}")
    unknown = set(obj) - allowed - {"schema_version"}
    if unknown:
        raise SpecFormatError(f"unknown spec keys: {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise SpecFormatError(f"missing spec keys: {sorted(missing)}")
    return obj


def _as_c(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if (isinstance(pair, list) and len(pair) == 2
            and all(isinstance(v, (int, float)) for v in pair)):
        return complex(pair[0], pair[1])
    raise SpecFormatError(f"expected number or [re, im], got {pair!r}")


FUNCTION_NAMES = ("identity", "koebe", "scaled-koebe", "root-koebe",
                  "half-plane", "cardioid", "quadratic", "polynomial",
                  "sector")


def function_from_spec(obj: dict) -> AnalyticMap:
    if not isinstance(obj, dict) or "name" not in obj:
        raise SpecFormatError("function spec needs a 'name' field")
    name = obj["name"]
    extra = set(obj) - {"name", "k", "n", "eps", "coefficients", "beta"}
    if extra:
        raise SpecFormatError(f"unknown function keys: {sorted(extra)}")
    try:
        if name == "identity":
            return identity_map()
        if name == "koebe":
            return koebe_map()
        if name == "scaled-koebe":
            return scaled_koebe(float(obj["k"]))
        if name == "root-koebe":
            return root_scaled_koebe(float(obj["k"]), int(obj["n"]))
        if name == "half-plane":
            return half_plane_map()
        if name == "cardioid":
            return cardioid_map()
        if name == "quadratic":
            return quadratic_map(float(obj["eps"]))
        if name == "polynomial":
            return polynomial_map([_as_c(c) for c in obj["coefficients"]])
        if name == "sector":
            return sector_map(float(obj["beta"]))
    except KeyError as exc:
        raise SpecFormatError(f"function {name!r} misses parameter {exc}")
    raise SpecFormatError(f"unknown function name {name!r}; "
                          f"expected one of {FUNCTION_NAMES}")


def chain_spec_from_obj(obj: dict) -> ChainSpec:
    allowed = {"kind", "base", "aux", "lambda", "alpha", "beta", "c"}
    unknown = set(obj) - allowed
    if unknown:
        raise SpecFormatError(f"unknown chain keys: {sorted(unknown)}")
    if "kind" not in obj or "base" not in obj:
        raise SpecFormatError("chain spec needs 'kind' and 'base'")
    g = function_from_spec(obj["aux"]) if "aux" in obj else None
    try:
        return ChainSpec(obj["kind"], function_from_spec(obj["base"]), g=g,
                         lam=float(obj.get("lambda", 0.0)),
                         alpha=float(obj.get("alpha", 1.0)),
                         beta=float(obj.get("beta", 0.0)),
                         c=_as_c(obj.get("c", 0.0)))
    except ValueError as exc:
        raise SpecFormatError(str(exc))


def _grid_from(obj: Optional[dict], override: Optional[tuple]) -> GridSpec:
    if obj is None:
        grid = DEFAULT_REGION
    else:
        extra = set(obj) - {"interior", "exterior", "radii", "angles"}
        if extra:
            raise SpecFormatError(f"unknown grid keys: {sorted(extra)}")
        bands = []
        if "interior" in obj:
            bands.append(tuple(float(v) for v in obj["interior"]))
        if "exterior" in obj:
            bands.append(tuple(float(v) for v in obj["exterior"]))
        if not bands:
            bands = list(DEFAULT_REGION.bands)
        grid = GridSpec(bands=tuple(bands),
                        n_radii=int(obj.get("radii", 64)),
                        n_angles=int(obj.get("angles", 128)))
    if override is not None:
        grid = GridSpec(bands=grid.bands, n_radii=override[0],
                        n_angles=override[1])
    return grid


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_evolve(cfg: RunConfig) -> int:
    spec = _load_spec(cfg.spec_path,
                      allowed={"setting", "field", "tau", "start", "t_start",
                               "t_end", "samples", "driving"},
                      required={"field", "start"})
    setting = spec.get("setting", "radial")
    if setting not in ("radial", "chordal"):
        raise SpecFormatError("setting must be 'radial' or 'chordal'")
    t0 = float(spec.get("t_start", 0.0))
    t1 = float(spec.get("t_end", 1.0))
    if cfg.horizon is not None:
        t1 = cfg.horizon
    n = int(spec.get("samples", 51))
    times = np.linspace(t0, t1, n)
    starts = [_as_c(v) for v in spec["start"]]

    if setting == "radial":
        field = herglotz_field_from_spec(spec["field"])
        tau_obj = spec.get("tau", [0.0, 0.0])
        if isinstance(tau_obj, dict):
            ts = [float(t) for t in tau_obj.get("times", [])]
            vals = [_as_c(v) for v in tau_obj.get("values", [])]
            bp = BerksonPortaData.with_piecewise_tau(field, ts, vals)
        else:
            tau = _as_c(tau_obj)
            bp = BerksonPortaData.radial(field) if tau == 0 \
                else BerksonPortaData.with_constant_tau(field, tau)
        source = bp
    else:
        fobj = spec["field"]
        if fobj.get("kind") == "schramm":
            driving = fobj.get("driving", {"kind": "zero"})
            if driving.get("kind") == "zero":
                lam = lambda t: 0.0
            elif driving.get("kind") == "constant":
                val = float(driving["value"])
                lam = lambda t: val
            elif driving.get("kind") == "linear":
                rate = float(driving["rate"])
                lam = lambda t: rate * t
            else:
                raise SpecFormatError("unknown driving kind")
            source = schramm_field(lam)
        else:
            source = herglotz_field_from_spec(fobj)

    rows = []
    tol = cfg.tol
    kw = {} if tol is None else {"rtol": tol, "atol": tol / 10}
    for z0 in starts:
        for tt, w in evolve_samples(source, t0, times, z0,
                                    setting=setting, **kw):
            rows.append((tt, w))

    lines = ["t,re,im"]
    for tt, w in rows:
        lines.append(f"{tt:.17g},{w.real:.17g},{w.imag:.17g}")
    _write_text(cfg.out_dir / "trajectory.csv", "\n".join(lines) + "\n")
    return 0


_EXAMPLE_BUILDERS = {
    1: lambda p: affine_laurent_example(float(p.get("k", 0.3))),
    2: lambda p: radial_stretch_example(float(p.get("a", 0.5))),
    3: lambda p: sector_example(float(p.get("beta", 0.5))),
    4: lambda p: spiral_stretch_example(float(p.get("lambda", 0.6))),
}


def cmd_extend(cfg: RunConfig) -> int:
    spec = _load_spec(cfg.spec_path,
                      allowed={"chain", "extension", "grid", "example"},
                      required=set())
    grid = _grid_from(spec.get("grid"), cfg.grid)
    tol_k = cfg.tol if cfg.tol is not None else 5e-3

    if "example" in spec:
        ex_obj = spec["example"]
        number = int(ex_obj.get("number", 0))
        if number not in _EXAMPLE_BUILDERS:
            raise SpecFormatError("example.number must be 1..4")
        entry = _EXAMPLE_BUILDERS[number](ex_obj)
        report = entry.extension.verify(grid, tol_k=tol_k)
        summary = {"example": entry.name, "claimed_k": entry.claimed_k,
                   "passed": bool(report.passed),
                   "verification": report.summary()}
        _write_report(cfg.out_dir, summary, report)
        return 0 if report.passed else 1

    if "chain" not in spec or "extension" not in spec:
        raise SpecFormatError("extend spec needs 'chain' and 'extension' "
                              "(or 'example')")
    chain_spec = chain_spec_from_obj(spec["chain"])
    ext_obj = spec["extension"]
    extra = set(ext_obj) - {"method", "k", "tau"}
    if extra:
        raise SpecFormatError(f"unknown extension keys: {sorted(extra)}")
    method = ext_obj.get("method", "becker")
    k = ext_obj.get("k")
    k = float(k) if k is not None else None
    tau = _as_c(ext_obj.get("tau", 0.0))

    try:
        result = extension_pipeline(chain_spec, k, method=method, tau=tau,
                                    region=grid, tol_k=tol_k)
    except PipelineError as exc:
        if isinstance(exc.cause, (UkViolationError, NormViolationError)):
            diag = {"passed": False, "stage": exc.stage,
                    "reason": str(exc.cause)}
            if isinstance(exc.cause, UkViolationError):
                diag["witness"] = {"z": [exc.cause.z.real, exc.cause.z.imag],
                                   "t": exc.cause.t,
                                   "p": [exc.cause.p.real, exc.cause.p.imag]}
            _write_text(cfg.out_dir / "report.json",
                        json.dumps(diag, indent=2, sort_keys=True) + "\n")
            print(f"FAIL at {exc.stage}: {exc.cause}", file=sys.stderr)
            return 1
        raise
    _write_report(cfg.out_dir, result.summary(), result.report)
    return 0 if result.passed else 1


def cmd_check(cfg: RunConfig) -> int:
    spec = _load_spec(cfg.spec_path,
                      allowed={"criterion", "function", "quantity", "k", "c",
                               "kind", "aux", "lambda", "alpha", "beta"},
                      required={"criterion", "function"})
    f = function_from_spec(spec["function"])
    criterion = spec["criterion"]
    if criterion == "sugawa":
        verdict = sugawa_check(f, spec.get("quantity", "zf'/f"),
                               float(spec.get("k", 0.5)))
        _write_text(cfg.out_dir / "verdict.json",
                    json.dumps(verdict.to_dict(), indent=2, sort_keys=True) + "\n")
        return 0 if verdict.passed else 1
    if criterion == "ahlfors-becker":
        verdict = ahlfors_becker_check(f, _as_c(spec.get("c", 0.0)),
                                       float(spec.get("k", 0.5)))
        _write_text(cfg.out_dir / "verdict.json",
                    json.dumps(verdict.to_dict(), indent=2, sort_keys=True) + "\n")
        return 0 if verdict.passed else 1
    if criterion == "classify":
        kinds = ([spec["kind"]] if "kind" in spec
                 else ["convex", "starlike", "noshiro-warschawski"])
        g = function_from_spec(spec["aux"]) if "aux" in spec else None
        labels = {}
        for kind in kinds:
            label = classify_subclass(f, kind, g=g,
                                      lam=float(spec.get("lambda", 0.0)),
                                      alpha=float(spec.get("alpha", 1.0)),
                                      beta=float(spec.get("beta", 0.0)))
            labels[kind] = label.to_dict()
        _write_text(cfg.out_dir / "verdict.json",
                    json.dumps(labels, indent=2, sort_keys=True) + "\n")
        return 0
    if criterion == "schwarzian-norm":
        norm = schwarzian_norm_disk(f)
        _write_text(cfg.out_dir / "verdict.json",
                    json.dumps({"schwarzian_norm": norm}, indent=2,
                               sort_keys=True) + "\n")
        return 0
    raise SpecFormatError(f"unknown criterion {criterion!r}")


def cmd_suite(cfg: RunConfig) -> int:
    seed = cfg.seed
    if cfg.spec_path is not None:
        spec = _load_spec(cfg.spec_path, allowed={"seed"}, required=set())
        seed = int(spec.get("seed", seed))
    results, elapsed = run_suite(seed)
    failures = [r for r in results if not r.passed]
    lines = [r.line() for r in results]
    lines.append(f"suite: {len(results) - len(failures)}/{len(results)} "
                 f"batteries passed in {elapsed:.1f} s (seed {seed})")
    body = "\n".join(lines) + "\n"
    print(body, end="")
    summary = {
        "seed": seed,
        "batteries": len(results),
        "failures": len(failures),
        "checks": sum(r.n_checks for r in results),
        "results": [{"battery": r.battery, "name": r.name,
                     "passed": r.passed, "checks": r.n_checks,
                     "witness": r.witness} for r in results],
    }
    _write_text(cfg.out_dir / "suite.json",
                json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0 if not failures else 1


# ---------------------------------------------------------------------------
# Output plumbing
# ---------------------------------------------------------------------------

def _write_text(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(content)


def _write_report(out_dir: Path, summary: dict, report) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "report.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    report.to_csv(out_dir / "grid.csv")
    report.to_ppm(out_dir / "heatmap.ppm")


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _parse_grid(text: str) -> tuple:
    try:
        radii, angles = text.lower().split("x")
        return (int(radii), int(angles))
    except ValueError:
        raise SpecFormatError(f"--grid expects RADIIxANGLES, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loewnerqc",
        description="Loewner evolution, quasiconformal extensions and "
                    "dilatation verification")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, needs_spec in (("evolve", True), ("extend", True),
                             ("check", True), ("suite", False)):
        p = sub.add_parser(name)
        p.add_argument("--spec", type=Path, required=needs_spec,
                       help="path to the JSON run spec")
        p.add_argument("--out", type=Path, default=Path("out"),
                       help="output directory")
        p.add_argument("--grid", type=str, default=None,
                       help="grid override RADIIxANGLES")
        p.add_argument("--tol", type=float, default=None,
                       help="tolerance override")
        p.add_argument("--seed", type=int, default=20240715,
                       help="seed for randomized suites")
        p.add_argument("--horizon", type=float, default=None,
                       help="time horizon override")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        subcommand=args.subcommand,
        spec_path=args.spec,
        out_dir=args.out,
        grid=_parse_grid(args.grid) if args.grid else None,
        tol=args.tol,
        seed=args.seed,
        horizon=args.horizon,
    )
    handlers = {"evolve": cmd_evolve, "extend": cmd_extend,
                "check": cmd_check, "suite": cmd_suite}
    try:
        return handlers[cfg.subcommand](cfg)
    except SpecFormatError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except LoewnerQCError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
