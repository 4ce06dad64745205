"""Numerical Wirtinger calculus on plane maps.

The partials are recovered from central differences of the real
coordinates,

    f_z = (f_x - i f_y)/2,      f_zbar = (f_x + i f_y)/2,

with a stencil step that scales like h = 1e-4 * max(|z|, 1) so the
exponentially growing exterior extensions keep relative precision.
Everything in this module treats the map as a black box; the dilatation
report is what a verification run hands back to callers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    DegenerateDerivativeError,
    GridEvaluationError,
    StencilError,
)

DEFAULT_TOL_K = 5e-3
DEFAULT_TOL_SEAM = 1e-3
_H_SCALE = 1e-4
_FZ_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# Plane maps and grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneMap:
    """A (not necessarily analytic) map of a plane region.

    seam describes an internal locus where the evaluator switches
    branches: "unit_circle", "imaginary_axis" or None. punctures are
    isolated points excluded from grids.
    """

    func: Callable
    seam: Optional[str] = None
    punctures: tuple = ()
    name: str = "plane-map"

    def __call__(self, z):
        return self.func(z)

    def seam_distance(self, z):
        z = np.asarray(z, dtype=complex)
        if self.seam == "unit_circle":
            return np.abs(np.abs(z) - 1.0)
        if self.seam == "imaginary_axis":
            return np.abs(np.real(z))
        return np.full(np.shape(z), np.inf)


@dataclass(frozen=True)
class GridSpec:
    """Sampling grid for verification runs.

    Polar form: a list of (r_lo, r_hi) annulus bands, each sampled on
    n_radii x n_angles points (seam-aligned sampling keeps the seam
    residual measurement stable). Cartesian form for axis-seam maps.
    """

    kind: str = "polar"
    bands: tuple = ((0.05, 0.99),)
    n_radii: int = 64
    n_angles: int = 128
    re_range: tuple = (-2.0, 2.0)
    im_range: tuple = (-2.0, 2.0)
    nx: int = 64
    ny: int = 64

    def points(self) -> np.ndarray:
        if self.kind == "polar":
            chunks = []
            for r_lo, r_hi in self.bands:
                r = np.linspace(r_lo, r_hi, self.n_radii)
                # half-cell offset keeps measure-zero singular rays
                # (slit images, boundary poles at theta = 0) off the grid
                th = 2 * np.pi * (np.arange(self.n_angles) + 0.5) / self.n_angles
                chunks.append((r[:, None] * np.exp(1j * th)[None, :]).ravel())
            return np.concatenate(chunks)
        x = np.linspace(*self.re_range, self.nx)
        y = np.linspace(*self.im_range, self.ny)
        return (x[:, None] + 1j * y[None, :]).ravel()

    def shape_rows(self) -> tuple:
        """(height, width) used by the heatmap writer."""
        if self.kind == "polar":
            return (self.n_radii * len(self.bands), self.n_angles)
        return (self.nx, self.ny)

    def to_dict(self) -> dict:
        if self.kind == "polar":
            return {"kind": "polar", "bands": [list(b) for b in self.bands],
                    "radii": self.n_radii, "angles": self.n_angles}
        return {"kind": "cartesian", "re": list(self.re_range),
                "im": list(self.im_range), "nx": self.nx, "ny": self.ny}


def stencil_step(z):
    return _H_SCALE * np.maximum(np.abs(np.asarray(z, dtype=complex)), 1.0)


# ---------------------------------------------------------------------------
# Pointwise Wirtinger operations
# ---------------------------------------------------------------------------

def wirtinger(F, z, h: float | None = None):
    """Central-difference estimates of (f_z, f_zbar) at z.

    Raises StencilError when a stencil point cannot be evaluated or the
    stencil straddles a declared seam.
    """
    zc = complex(z) if np.ndim(z) == 0 else np.asarray(z, dtype=complex)
    hh = stencil_step(zc) if h is None else h
    if isinstance(F, PlaneMap):
        if np.any(F.seam_distance(zc) <= np.asarray(hh)):
            raise StencilError("stencil crosses the seam locus", point=zc)
    try:
        fxp = F(zc + hh)
        fxm = F(zc - hh)
        fyp = F(zc + 1j * hh)
        fym = F(zc - 1j * hh)
    except Exception as exc:  # evaluator failures become stencil errors
        raise StencilError(f"evaluation failed near {zc}: {exc}", point=zc)
    vals = [fxp, fxm, fyp, fym]
    if any(not np.all(np.isfinite(np.asarray(v))) for v in vals):
        raise StencilError("non-finite stencil value", point=zc)
    fx = (fxp - fxm) / (2 * hh)
    fy = (fyp - fym) / (2 * hh)
    fz = (fx - 1j * fy) / 2
    fzbar = (fx + 1j * fy) / 2
    return fz, fzbar


def beltrami_coefficient(F, z, h: float | None = None) -> complex:
    """mu = f_zbar / f_z; |mu| < 1 signals sense-preserving behaviour."""
    fz, fzbar = wirtinger(F, z, h)
    if abs(fz) <= _FZ_FLOOR:
        raise DegenerateDerivativeError(f"|f_z| = {abs(fz):.3e} at {z}")
    return complex(fzbar / fz)


def jacobian(F, z, h: float | None = None) -> float:
    """J = |f_z|^2 - |f_zbar|^2; positive iff sense-preserving at z."""
    fz, fzbar = wirtinger(F, z, h)
    return float(abs(fz) ** 2 - abs(fzbar) ** 2)


def compose_dilatation(mu_f: complex, mu_g: complex, f_z: complex) -> complex:
    """Dilatation of g o f^{-1} at f(z) from the dilatations of f and g."""
    if abs(mu_f) >= 1 or abs(mu_g) >= 1:
        raise ValueError("dilatations must have modulus < 1")
    if f_z == 0:
        raise ValueError("f_z must be nonzero")
    return (f_z / np.conj(f_z)) * (mu_g - mu_f) / (1 - mu_g * np.conj(mu_f))


# ---------------------------------------------------------------------------
# Grid verification
# ---------------------------------------------------------------------------

@dataclass
class DilatationReport:
    """Measured Beltrami data of a plane map on a grid.

    Arrays cover the full rectangular grid; ``valid`` marks points that
    were actually measured (off-seam, off-puncture, stencil succeeded).
    """

    points: np.ndarray
    mu: np.ndarray
    jac: np.ndarray
    valid: np.ndarray
    grid: GridSpec
    h_scale: float
    k_claim: float
    tol_k: float
    tol_seam: float
    seam_residual: float
    failed_points: list = field(default_factory=list)

    @property
    def abs_mu(self) -> np.ndarray:
        out = np.abs(self.mu)
        out[~self.valid] = 0.0
        return out

    @property
    def max_abs_mu(self) -> float:
        vals = np.abs(self.mu[self.valid])
        return float(np.max(vals)) if vals.size else 0.0

    @property
    def witness(self) -> complex:
        if not np.any(self.valid):
            return 0j
        idx = np.where(self.valid)[0]
        return complex(self.points[idx[int(np.argmax(np.abs(self.mu[idx])))]])

    @property
    def jacobian_negative_count(self) -> int:
        return int(np.count_nonzero(self.jac[self.valid] <= 0))

    @property
    def passed(self) -> bool:
        return (self.max_abs_mu <= self.k_claim + self.tol_k
                and self.jacobian_negative_count == 0
                and self.seam_residual <= self.tol_seam)

    def summary(self) -> dict:
        return {
            "passed": bool(self.passed),
            "k_claim": self.k_claim,
            "max_abs_mu": self.max_abs_mu,
            "witness": [self.witness.real, self.witness.imag],
            "jacobian_negative_count": self.jacobian_negative_count,
            "seam_residual": self.seam_residual,
            "tol_k": self.tol_k,
            "tol_seam": self.tol_seam,
            "n_points": int(np.count_nonzero(self.valid)),
            "n_stencil_failures": len(self.failed_points),
            "grid": self.grid.to_dict(),
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("re_z,im_z,re_mu,im_mu,abs_mu,jacobian\n")
            for z, m, j, v in zip(self.points, self.mu, self.jac, self.valid):
                if not v:
                    continue
                fh.write(f"{z.real:.17g},{z.imag:.17g},{m.real:.17g},"
                         f"{m.imag:.17g},{abs(m):.17g},{j:.17g}\n")

    def to_ppm(self, path, k_ref: float | None = None) -> None:
        """Binary P6 heatmap of |mu|: 0 maps to black, k_ref to white."""
        k = k_ref if k_ref is not None else self.k_claim
        if k <= 0:
            k = max(self.max_abs_mu, 1e-12)
        height, width = self.grid.shape_rows()
        levels = np.nan_to_num(self.abs_mu, posinf=k).reshape(height, width)
        gray = np.round(255 * np.clip(levels / k, 0.0, 1.0)).astype(np.uint8)
        rgb = np.repeat(gray[:, :, None], 3, axis=2)
        with open(path, "wb") as fh:
            fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
            fh.write(rgb.tobytes())


def _measure_seam_residual(F: PlaneMap, n_samples: int = 256,
                           offset: float = 5e-5) -> float:
    """Max relative jump of the one-sided limits across the seam.

    The two-sided difference g(d) = F(outer side, d) - F(inner side, d)
    expands as jump + d (sum of one-sided derivatives) + O(d^2); the
    Richardson combination 2 g(d/2) - g(d) cancels the derivative term,
    so boundary-singular but continuous seams are not over-reported.
    """
    if F.seam is None:
        return 0.0

    def sides(d):
        if F.seam == "unit_circle":
            theta = 2 * np.pi * (np.arange(n_samples) + 0.5) / n_samples
            ray = np.exp(1j * theta)
            return F(ray * (1 + d)), F(ray * (1 - d))
        y = np.linspace(-2.0, 2.0, n_samples)
        return F(-d + 1j * y), F(d + 1j * y)

    out1, in1 = sides(offset)
    out2, in2 = sides(offset / 2)
    jump = 2 * (out2 - in2) - (out1 - in1)
    scale = np.maximum(1.0, np.abs(out2))
    return float(np.max(np.abs(jump) / scale))


def _pointwise_pass(F, pts, h, idx, mu, jac, valid, failed):
    for i in idx:
        try:
            fz, fzbar = wirtinger(F, complex(pts[i]), float(h[i]))
            mu[i] = np.inf if abs(fz) <= _FZ_FLOOR else fzbar / fz
            jac[i] = abs(fz) ** 2 - abs(fzbar) ** 2
        except StencilError:
            failed.append(complex(pts[i]))
            valid[i] = False


def verify_quasiconformal(F: PlaneMap, region: GridSpec, k_claim: float,
                          tol_k: float = DEFAULT_TOL_K,
                          tol_seam: float = DEFAULT_TOL_SEAM,
                          max_failure_fraction: float = 0.01) -> DilatationReport:
    """Estimate mu and J of F over the grid and assemble a report.

    PASS means max |mu| <= k_claim + tol_k, no nonpositive Jacobian
    sample and a seam residual within tol_seam. Individual stencil
    failures are recorded; more than max_failure_fraction of the grid
    failing raises GridEvaluationError.
    """
    pts = region.points()
    h = np.asarray(stencil_step(pts))
    valid = F.seam_distance(pts) > 2 * h
    for p in F.punctures:
        valid &= np.abs(pts - p) > 10 * h
    mu = np.zeros(pts.shape, dtype=complex)
    jac = np.ones(pts.shape, dtype=float)
    failed: list = []

    idx = np.where(valid)[0]
    try:
        fx = (F(pts[idx] + h[idx]) - F(pts[idx] - h[idx])) / (2 * h[idx])
        fy = (F(pts[idx] + 1j * h[idx]) - F(pts[idx] - 1j * h[idx])) / (2 * h[idx])
        fz = (fx - 1j * fy) / 2
        fzbar = (fx + 1j * fy) / 2
        bad = ~(np.isfinite(fz) & np.isfinite(fzbar))
        with np.errstate(divide="ignore", invalid="ignore"):
            mu_vals = np.where(np.abs(fz) > _FZ_FLOOR,
                               fzbar / np.where(fz == 0, 1, fz), np.inf)
        mu[idx] = np.where(bad, np.inf, mu_vals)
        jac[idx] = np.where(bad, -np.inf, np.abs(fz) ** 2 - np.abs(fzbar) ** 2)
        failed.extend(pts[idx[bad]].tolist())
        valid[idx[bad]] = False
    except Exception:
        _pointwise_pass(F, pts, h, idx, mu, jac, valid, failed)

    if len(failed) > max_failure_fraction * pts.size:
        raise GridEvaluationError(
            f"{len(failed)} of {pts.size} grid points failed stencil evaluation")

    seam_res = _measure_seam_residual(F)
    return DilatationReport(
        points=pts, mu=mu, jac=jac, valid=valid, grid=region,
        h_scale=_H_SCALE, k_claim=float(k_claim), tol_k=tol_k,
        tol_seam=tol_seam, seam_residual=seam_res, failed_points=failed)
