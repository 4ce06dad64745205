"""Schwarzian calculus and quasiconformal-extension criteria.

All criteria are evaluated as suprema over polar grids in the disk.
Grid suprema stand in for true suprema, so every verdict is re-run at
twice the grid density; a verdict that flips between the two densities
is reported UNSTABLE instead of pass/fail (the criteria quantities are
boundary-dominated and a flip means the grid is not resolving them).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .analytic import AnalyticMap
from .errors import (
    CriticalPointError,
    InvalidAuxiliaryError,
    OutOfBranchError,
)

PASS_EPS = 1e-9
SUGAWA_QUANTITIES = ("zf'/f", "1+zf''/f'", "f'")
SUBCLASS_KINDS = ("convex", "starlike", "spiral", "close-to-convex",
                  "noshiro-warschawski", "bazilevic", "strongly-starlike")


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiskGrid:
    """Polar evaluation grid in the unit disk, avoiding 0 and the boundary."""

    n_radii: int = 24
    n_angles: int = 64
    r_min: float = 0.05
    r_max: float = 0.99

    def points(self) -> np.ndarray:
        r = np.linspace(self.r_min, self.r_max, self.n_radii)
        th = 2 * np.pi * np.arange(self.n_angles) / self.n_angles
        return (r[:, None] * np.exp(1j * th)[None, :]).ravel()

    def doubled(self) -> "DiskGrid":
        return replace(self, n_radii=2 * self.n_radii, n_angles=2 * self.n_angles)

    def to_dict(self) -> dict:
        return {"radii": self.n_radii, "angles": self.n_angles,
                "r_min": self.r_min, "r_max": self.r_max}


DEFAULT_GRID = DiskGrid()


# ---------------------------------------------------------------------------
# Schwarzian calculus
# ---------------------------------------------------------------------------

def pre_schwarzian(f: AnalyticMap, z):
    """f''/f' at z."""
    fp = f.deriv(z, 1)
    if np.any(np.abs(fp) < 1e-14):
        raise CriticalPointError("f'(z) = 0", witness=_first_critical(z, fp))
    return f.deriv(z, 2) / fp


def schwarzian(f: AnalyticMap, z):
    """S_f = f'''/f' - (3/2)(f''/f')^2; vanishes exactly on Moebius maps."""
    fp = f.deriv(z, 1)
    if np.any(np.abs(fp) < 1e-14):
        raise CriticalPointError("f'(z) = 0", witness=_first_critical(z, fp))
    q = f.deriv(z, 2) / fp
    return f.deriv(z, 3) / fp - 1.5 * q ** 2


def _first_critical(z, fp):
    z = np.asarray(z, dtype=complex)
    fp = np.asarray(fp, dtype=complex)
    idx = np.argmax(np.abs(fp) < 1e-14)
    return complex(z.ravel()[idx]) if z.shape else complex(z)


def schwarzian_norm_disk(f: AnalyticMap, grid: DiskGrid = DEFAULT_GRID,
                         weight: str = "poincare") -> float:
    """sup over the grid of the hyperbolically weighted |S_f|.

    weight="poincare" uses (1 - |z|^2)^2, the density-consistent choice;
    weight="linear" uses (1 - |z|)^2 for comparison runs.
    """
    z = grid.points()
    s = np.abs(schwarzian(f, z))
    if weight == "poincare":
        w = (1 - np.abs(z) ** 2) ** 2
    elif weight == "linear":
        w = (1 - np.abs(z)) ** 2
    else:
        raise ValueError(f"unknown weight {weight!r}")
    return float(np.max(w * s))


# ---------------------------------------------------------------------------
# Criterion verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriterionVerdict:
    """Outcome of a grid-supremum criterion check."""

    criterion: str
    measured_sup: float
    threshold: float
    witness: complex
    passed: bool
    grid: DiskGrid
    stability: str = "stable"   # flips between densities -> "unstable"

    @property
    def status(self) -> str:
        if self.stability == "unstable":
            return "unstable"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "measured_sup": self.measured_sup,
            "threshold": self.threshold,
            "witness": [self.witness.real, self.witness.imag],
            "passed": bool(self.passed),
            "status": self.status,
            "grid": self.grid.to_dict(),
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _sup_verdict(name: str, values_fn, k: float, grid: DiskGrid) -> CriterionVerdict:
    """Evaluate a |quantity| supremum at two densities and compare verdicts."""

    def run(g: DiskGrid):
        z = g.points()
        vals = np.abs(values_fn(z))
        i = int(np.argmax(vals))
        return float(vals[i]), complex(z[i])

    sup1, _ = run(grid)
    grid2 = grid.doubled()
    sup2, witness = run(grid2)
    pass1 = sup1 <= k + PASS_EPS
    pass2 = sup2 <= k + PASS_EPS
    stability = "stable" if pass1 == pass2 else "unstable"
    return CriterionVerdict(name, sup2, k, witness, pass2, grid2, stability)


def ahlfors_becker_check(f: AnalyticMap, c: complex, k: float,
                         grid: DiskGrid = DEFAULT_GRID) -> CriterionVerdict:
    """sup |c|z|^2 + (1-|z|^2) f''/f'| <= k implies a k-QC extension.

    c = 0 is the pre-Schwarzian (Becker) case. No separate |c| <= k test
    is made; it is implied by the displayed inequality.
    """

    def values(z):
        return c * np.abs(z) ** 2 + (1 - np.abs(z) ** 2) * pre_schwarzian(f, z)

    return _sup_verdict(f"ahlfors-becker(c={c})", values, k, grid)


def sugawa_check(f: AnalyticMap, quantity: str, k: float,
                 grid: DiskGrid = DEFAULT_GRID) -> CriterionVerdict:
    """sup |1-p|/|1+p| <= k for p one of zf'/f, 1+zf''/f', f'."""
    if quantity not in SUGAWA_QUANTITIES:
        raise ValueError(f"quantity must be one of {SUGAWA_QUANTITIES}")

    def values(z):
        p = _sugawa_quantity(f, quantity, z)
        num = np.abs(1 - p)
        den = np.abs(1 + p)
        out = np.where(den < 1e-14, np.inf, num / np.where(den == 0, 1, den))
        return out

    return _sup_verdict(f"sugawa({quantity})", values, k, grid)


def _sugawa_quantity(f: AnalyticMap, quantity: str, z):
    z = np.asarray(z, dtype=complex)
    if quantity == "f'":
        return f.deriv(z, 1)
    if quantity == "1+zf''/f'":
        return 1 + z * pre_schwarzian(f, z)
    # zf'/f with the removable value 1 at the origin (normalised maps)
    w = f(z)
    at0 = z == 0
    safe_w = np.where(at0, 1, w)
    return np.where(at0, 1.0, z * f.deriv(z, 1) / safe_w)


def becker_to_sector(k: float) -> float:
    """Smallest sector half-angle parameter k0 with U(k) inside it.

    k0 = (2/pi) arcsin(2k/(1-k^2)); requires 2k/(1-k^2) <= 1, i.e.
    k <= sqrt(2) - 1.
    """
    if not 0 <= k < 1:
        raise ValueError("k must lie in [0, 1)")
    arg = 2 * k / (1 - k * k)
    if arg > 1:
        raise OutOfBranchError(
            f"2k/(1-k^2) = {arg:.6f} > 1 (k > sqrt(2)-1); no sector comparison")
    return 2 / math.pi * math.asin(arg)


def betker_sector_constant(alpha: float) -> float:
    """Extension bound sin(alpha pi / 2) for sector-valued driving terms."""
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    return math.sin(alpha * math.pi / 2)


# FKZ bound for strongly starlike maps coincides with the sector constant.
fkz_extension_constant = betker_sector_constant


# ---------------------------------------------------------------------------
# Subclass classifiers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubclassLabel:
    """Result of testing a defining inequality over a grid.

    residual >= 0 means the defining Re[...] > 0 (or the arg bound)
    held at every grid point; the most-violating point is the witness.
    """

    kind: str
    residual: float
    witness: complex
    passed: bool
    params: dict
    grid: DiskGrid

    def to_dict(self) -> dict:
        return {"kind": self.kind, "residual": self.residual,
                "witness": [self.witness.real, self.witness.imag],
                "passed": bool(self.passed),
                "params": {k: str(v) for k, v in self.params.items()},
                "grid": self.grid.to_dict()}


def _zfp_over_f(f: AnalyticMap, z):
    w = f(z)
    at0 = z == 0
    return np.where(at0, 1.0, z * f.deriv(z, 1) / np.where(at0, 1, w))


def strongly_starlike_order(f: AnalyticMap, grid: DiskGrid = DEFAULT_GRID) -> float:
    """(2/pi) sup |arg zf'/f|, the measured strong-starlikeness order."""
    z = grid.points()
    return float(2 / np.pi * np.max(np.abs(np.angle(_zfp_over_f(f, z)))))


def classify_subclass(f: AnalyticMap, kind: str,
                      grid: DiskGrid = DEFAULT_GRID,
                      g: Optional[AnalyticMap] = None,
                      lam: float = 0.0,
                      alpha: float = 1.0,
                      beta: float = 0.0) -> SubclassLabel:
    """Test a subclass-defining inequality on the grid.

    close-to-convex and bazilevic require the auxiliary map g, which
    must itself pass the starlike classifier. For bazilevic the free
    rotation in the definition is searched over a fine angle grid.
    """
    if kind not in SUBCLASS_KINDS:
        raise ValueError(f"unknown subclass kind {kind!r}")
    z = grid.points()
    params: dict = {}

    if kind in ("close-to-convex", "bazilevic"):
        if g is None:
            raise InvalidAuxiliaryError(f"{kind} requires an auxiliary map g")
        aux = classify_subclass(g, "starlike", grid)
        if not aux.passed:
            raise InvalidAuxiliaryError(
                f"auxiliary map fails Re[zg'/g] > 0 at {aux.witness}")
        params["g"] = g.name

    if kind == "convex":
        vals = np.real(1 + z * f.deriv(z, 2) / f.deriv(z, 1))
    elif kind == "starlike":
        vals = np.real(_zfp_over_f(f, z))
    elif kind == "spiral":
        params["lambda"] = lam
        vals = np.real(np.exp(-1j * lam) * _zfp_over_f(f, z))
    elif kind == "noshiro-warschawski":
        vals = np.real(f.deriv(z, 1))
    elif kind == "close-to-convex":
        vals = np.real(z * f.deriv(z, 1) / g(z))
    elif kind == "bazilevic":
        params.update({"alpha": alpha, "beta": beta})
        w = bazilevic_quantity(f, g, alpha, beta, z)
        rots = np.exp(1j * np.linspace(-np.pi, np.pi, 720, endpoint=False))
        mins = np.min(np.real(rots[:, None] * w[None, :]), axis=1)
        best = int(np.argmax(mins))
        params["lambda_opt"] = float(np.angle(rots[best]))
        vals = np.real(rots[best] * w)
    else:  # strongly-starlike of order alpha
        params["alpha"] = alpha
        args = np.abs(np.angle(_zfp_over_f(f, z)))
        vals = alpha * np.pi / 2 - args

    i = int(np.argmin(vals))
    residual = float(vals[i])
    return SubclassLabel(kind, residual, complex(z[i]),
                         residual >= -PASS_EPS, params, grid)


def bazilevic_quantity(f: AnalyticMap, g: AnalyticMap,
                       alpha: float, beta: float, z):
    """(zf'/f)(f/g)^alpha (f/z)^{i beta} with principal branches.

    f/z and f/g are nonvanishing and equal 1 at the origin for
    normalised maps, so principal logs are the right branches.
    """
    z = np.asarray(z, dtype=complex)
    fz = f(z)
    gz = g(z)
    ratio_fg = np.exp(alpha * np.log(fz / gz))
    ratio_fz = np.exp(1j * beta * np.log(fz / z))
    return _zfp_over_f(f, z) * ratio_fg * ratio_fz
