"""Explicit chains, sewing constructions and extension pipelines.

Catalog chains for the classical subclasses (starlike, convex,
spiral-like, close-to-convex, Noshiro-Warschawski, Bazilevic, and the
pre-Schwarzian chain behind the Ahlfors-Becker criterion) are built in
closed form together with their time and space derivatives. The sewing
rule

    F(r e^{i theta}) = f_0(r e^{i theta})   for r < 1,
    F(r e^{i theta}) = f_{log r}(e^{i theta})   for r >= 1,

is applied after verifying that the chain's driving term stays inside
the hyperbolic disk U(k) = {w : |1-w| <= k |1+w|} on a validation grid.
Chains whose display uses plain t are reparametrised by e^t - 1 before
sewing so the leading coefficient grows like e^t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .analytic import AnalyticMap, MoebiusTransform, cayley, koebe_map, sector_map
from .beltrami import (
    DEFAULT_TOL_K,
    DEFAULT_TOL_SEAM,
    DilatationReport,
    GridSpec,
    PlaneMap,
    verify_quasiconformal,
)
from .criteria import (
    DiskGrid,
    SubclassLabel,
    bazilevic_quantity,
    classify_subclass,
    schwarzian,
    schwarzian_norm_disk,
)
from .errors import (
    InvalidBaseError,
    NormViolationError,
    PipelineError,
    UkViolationError,
)
from .loewner import LoewnerChain, herglotz_from_chain

CHAIN_KINDS = ("starlike", "convex", "spiral", "close-to-convex",
               "noshiro-warschawski", "bazilevic", "ahlfors", "custom")
_REPARAMETRIZED = {"convex", "close-to-convex", "noshiro-warschawski",
                   "bazilevic"}

DEFAULT_EXTERIOR_RADIUS = math.e
DEFAULT_REGION = GridSpec(bands=((0.1, 0.98), (1.02, DEFAULT_EXTERIOR_RADIUS)))


# ---------------------------------------------------------------------------
# Chain specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainSpec:
    """Recipe for a catalog chain: kind, base map and parameters."""

    kind: str
    base: AnalyticMap
    g: Optional[AnalyticMap] = None       # auxiliary starlike map
    lam: float = 0.0                      # spiral angle
    alpha: float = 1.0                    # bazilevic exponent, > 0
    beta: float = 0.0                     # bazilevic exponent
    c: complex = 0j                       # pre-Schwarzian chain constant

    def __post_init__(self):
        if self.kind not in CHAIN_KINDS:
            raise ValueError(f"unknown chain kind {self.kind!r}")

    @property
    def label(self) -> str:
        return f"{self.kind}({self.base.name})"


def _require(label: SubclassLabel, inequality: str):
    if not label.passed:
        raise InvalidBaseError(
            f"base map violates {inequality} at z = {label.witness} "
            f"(residual {label.residual:.3e})")


def build_chain(spec: ChainSpec, becker_normalized: bool = True,
                grid: DiskGrid = DiskGrid()) -> LoewnerChain:
    """Closed-form chain for the spec, gated by the matching classifier.

    becker_normalized=True substitutes t -> e^t - 1 in the chains whose
    textbook display uses plain t, so that every returned chain has
    f_t'(0) growth compatible with the sewing construction. Pass False
    to get the plain display parameter (useful for identity checks).
    """
    f = spec.base
    kind = spec.kind

    if kind == "starlike":
        _require(classify_subclass(f, "starlike", grid), "Re[zf'/f] > 0")
        return _exponential_chain(f, 1.0 + 0j, spec.label)
    if kind == "spiral":
        _require(classify_subclass(f, "spiral", grid, lam=spec.lam),
                 "Re[e^{-i lambda} zf'/f] > 0")
        return _exponential_chain(f, np.exp(1j * spec.lam), spec.label,
                                  normalization="generalized")
    if kind == "convex":
        _require(classify_subclass(f, "convex", grid), "Re[1 + zf''/f'] > 0")
        return _convex_chain(f, becker_normalized, spec.label)
    if kind == "close-to-convex":
        if spec.g is None:
            raise InvalidBaseError("close-to-convex chain needs auxiliary g")
        _require(classify_subclass(f, "close-to-convex", grid, g=spec.g),
                 "Re[zf'/g] > 0")
        return _linear_drift_chain(f, spec.g, becker_normalized, spec.label)
    if kind == "noshiro-warschawski":
        _require(classify_subclass(f, "noshiro-warschawski", grid),
                 "Re[f'] > 0")
        ident = AnalyticMap(lambda z: np.asarray(z, dtype=complex),
                            d1=lambda z: np.ones_like(np.asarray(z, dtype=complex)),
                            name="id")
        return _linear_drift_chain(f, ident, becker_normalized, spec.label)
    if kind == "bazilevic":
        return _bazilevic_chain(spec, becker_normalized, grid)
    if kind == "ahlfors":
        return _ahlfors_chain(f, spec.c, spec.label)
    raise InvalidBaseError("custom chains must be constructed directly")


def _exponential_chain(f: AnalyticMap, c: complex, label: str,
                       normalization: str = "classical") -> LoewnerChain:
    """f_t = e^{ct} f; starlike for c = 1, spiral-like for c on the circle."""

    def value(z, t):
        return np.exp(c * np.asarray(t)) * f(z)

    def fdot(z, t):
        return c * np.exp(c * np.asarray(t)) * f(z)

    def fprime(z, t):
        return np.exp(c * np.asarray(t)) * f.deriv(z, 1)

    return LoewnerChain(value, fdot, fprime, name=label,
                        normalization=normalization)


def _sigma(t, normalized: bool):
    t = np.asarray(t, dtype=float)
    if normalized:
        return np.exp(t) - 1.0, np.exp(t)
    return t, np.ones_like(t)


def _convex_chain(f: AnalyticMap, normalized: bool, label: str) -> LoewnerChain:
    """f_t = f + sigma(t) z f'."""

    def value(z, t):
        s, _ = _sigma(t, normalized)
        z = np.asarray(z, dtype=complex)
        return f(z) + s * z * f.deriv(z, 1)

    def fdot(z, t):
        _, sd = _sigma(t, normalized)
        z = np.asarray(z, dtype=complex)
        return sd * z * f.deriv(z, 1)

    def fprime(z, t):
        s, _ = _sigma(t, normalized)
        z = np.asarray(z, dtype=complex)
        return (1 + s) * f.deriv(z, 1) + s * z * f.deriv(z, 2)

    return LoewnerChain(value, fdot, fprime, name=label,
                        normalization="classical" if normalized else "generalized")


def _linear_drift_chain(f: AnalyticMap, g: AnalyticMap, normalized: bool,
                        label: str) -> LoewnerChain:
    """f_t = f + sigma(t) g; the close-to-convex and NW chains."""

    def value(z, t):
        s, _ = _sigma(t, normalized)
        return f(z) + s * g(z)

    def fdot(z, t):
        _, sd = _sigma(t, normalized)
        return sd * g(z)

    def fprime(z, t):
        s, _ = _sigma(t, normalized)
        return f.deriv(z, 1) + s * g.deriv(z, 1)

    return LoewnerChain(value, fdot, fprime, name=label,
                        normalization="classical" if normalized else "generalized")


def _bazilevic_chain(spec: ChainSpec, normalized: bool,
                     grid: DiskGrid) -> LoewnerChain:
    """f_t = (f^gamma + sigma gamma g^alpha z^{i beta})^{1/gamma}.

    Written as f (1 + sigma R)^{1/gamma} with R = gamma (g/z)^alpha
    (f/z)^{-gamma}, which keeps a single-valued branch: the bracket
    moves along a straight segment from 1 as t grows, so the principal
    log is the continuous one along the whole t-ray.
    """
    f, g = spec.base, spec.g
    if g is None:
        raise InvalidBaseError("bazilevic chain needs auxiliary g")
    if spec.alpha <= 0:
        raise InvalidBaseError("bazilevic chain needs alpha > 0")
    aux = classify_subclass(g, "starlike", grid)
    if not aux.passed:
        raise InvalidBaseError(
            f"auxiliary map violates Re[zg'/g] > 0 at z = {aux.witness}")
    # the chain needs the unrotated inequality Re[h] > 0
    z = grid.points()
    h_vals = bazilevic_quantity(f, g, spec.alpha, spec.beta, z)
    i = int(np.argmin(np.real(h_vals)))
    if np.real(h_vals[i]) <= -1e-9:
        raise InvalidBaseError(
            "base map violates Re[(zf'/f)(f/g)^alpha (f/z)^{i beta}] > 0 "
            f"at z = {complex(z[i])}")
    gamma = spec.alpha + 1j * spec.beta

    def parts(z):
        z = np.asarray(z, dtype=complex)
        fz, gz = f(z), g(z)
        log_fz = np.log(fz / z)
        log_gz = np.log(gz / z)
        R = gamma * np.exp(spec.alpha * log_gz - gamma * log_fz)
        return fz, gz, R

    def value(z, t):
        s, _ = _sigma(t, normalized)
        fz, _, R = parts(z)
        return fz * np.exp(np.log1p(s * R) / gamma)

    def fdot(z, t):
        s, sd = _sigma(t, normalized)
        fz, _, R = parts(z)
        ft = fz * np.exp(np.log1p(s * R) / gamma)
        return ft * (sd * R / gamma) / (1 + s * R)

    def fprime(z, t):
        s, _ = _sigma(t, normalized)
        z = np.asarray(z, dtype=complex)
        fz, gz, R = parts(z)
        ft = fz * np.exp(np.log1p(s * R) / gamma)
        fp = f.deriv(z, 1)
        gp = g.deriv(z, 1)
        dR = R * (spec.alpha * gp / gz - gamma * fp / fz + 1j * spec.beta / z)
        return ft * (fp / fz + (s / gamma) * dR / (1 + s * R))

    return LoewnerChain(value, fdot, fprime, name=spec.label,
                        normalization="classical" if normalized else "generalized")


def _ahlfors_chain(f: AnalyticMap, c: complex, label: str) -> LoewnerChain:
    """f_t = f(u) + (e^t - e^{-t})/(1+c) z f'(u) with u = e^{-t} z.

    Its driving term satisfies (1-p)/(1+p) = c e^{-2t}
    + (1 - e^{-2t}) u f''(u)/f'(u), the quantity bounded by the
    pre-Schwarzian extension criterion.
    """
    c = complex(c)
    if c == -1:
        raise InvalidBaseError("constant c = -1 degenerates the chain")

    def value(z, t):
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=float)
        u = np.exp(-t) * z
        s = (np.exp(t) - np.exp(-t)) / (1 + c)
        return f(u) + s * z * f.deriv(u, 1)

    def fdot(z, t):
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=float)
        u = np.exp(-t) * z
        s = (np.exp(t) - np.exp(-t)) / (1 + c)
        sd = (np.exp(t) + np.exp(-t)) / (1 + c)
        return -u * f.deriv(u, 1) + sd * z * f.deriv(u, 1) - s * z * u * f.deriv(u, 2)

    def fprime(z, t):
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=float)
        u = np.exp(-t) * z
        s = (np.exp(t) - np.exp(-t)) / (1 + c)
        return (np.exp(-t) + s) * f.deriv(u, 1) + s * u * f.deriv(u, 2)

    return LoewnerChain(value, fdot, fprime, name=label,
                        normalization="generalized" if c != 0 else "classical")


# ---------------------------------------------------------------------------
# U(k) validation
# ---------------------------------------------------------------------------

def hyperbolic_disk_ratio(p):
    """|1 - p| / |1 + p|; p lies in U(k) iff the ratio is <= k."""
    p = np.asarray(p, dtype=complex)
    den = np.abs(1 + p)
    return np.where(den < 1e-300, np.inf, np.abs(1 - p) / np.where(den == 0, 1, den))


def herglotz_ratio_sup(chain: LoewnerChain, t_max: float = 2.5,
                       n_radii: int = 40, n_angles: int = 96,
                       n_times: int = 13, r_max: float = 0.995):
    """Supremum of |1-p|/|1+p| over a disk-times-time validation grid."""
    r = np.linspace(0.05, r_max, n_radii)
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    zs = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
    best = -1.0
    witness = (0j, 0.0, 1 + 0j)
    for t in np.linspace(0.0, t_max, n_times):
        p = np.asarray(herglotz_from_chain(chain, zs, float(t)))
        vals = hyperbolic_disk_ratio(p)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best = float(vals[i])
            witness = (complex(zs[i]), float(t), complex(p[i]))
    return best, witness


def chordal_ratio_sup(chain: LoewnerChain, t_max: float = 2.5,
                      re_max: float = 4.0, im_max: float = 4.0,
                      n_re: int = 20, n_im: int = 33, n_times: int = 9):
    x = np.geomspace(0.05, re_max, n_re)
    y = np.linspace(-im_max, im_max, n_im)
    zs = (x[:, None] + 1j * y[None, :]).ravel()
    best = -1.0
    witness = (0j, 0.0, 1 + 0j)
    for t in np.linspace(0.0, t_max, n_times):
        p = np.asarray(herglotz_from_chain(chain, zs, float(t)))
        vals = hyperbolic_disk_ratio(p)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best = float(vals[i])
            witness = (complex(zs[i]), float(t), complex(p[i]))
    return best, witness


# ---------------------------------------------------------------------------
# Extension maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionMap:
    """Two-piece plane map claiming k-quasiconformality."""

    interior: Callable
    exterior: Callable
    seam: Optional[str]
    claimed_k: float
    provenance: str
    pre_moebius: Optional[MoebiusTransform] = None
    punctures: tuple = ()
    name: str = "extension"
    metadata: dict = dc_field(default_factory=dict)
    claimed_beltrami: Optional[Callable] = None   # displayed mu field, if any

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        zz = np.atleast_1d(z)
        w = self.pre_moebius(zz) if self.pre_moebius is not None else zz
        out = np.empty(w.shape, dtype=complex)
        if self.seam == "unit_circle":
            inside = np.abs(w) < 1.0
        elif self.seam == "imaginary_axis":
            inside = np.real(w) > 0.0
        else:
            inside = np.ones(w.shape, dtype=bool)
        if np.any(inside):
            out[inside] = self.interior(w[inside])
        if np.any(~inside):
            out[~inside] = self.exterior(w[~inside])
        return complex(out[0]) if scalar else out.reshape(z.shape)

    def plane_map(self) -> PlaneMap:
        return PlaneMap(self.__call__, seam=self.seam,
                        punctures=self.punctures, name=self.name)

    def verify(self, region: GridSpec = DEFAULT_REGION,
               tol_k: float = DEFAULT_TOL_K,
               tol_seam: float = DEFAULT_TOL_SEAM) -> DilatationReport:
        return verify_quasiconformal(self.plane_map(), region, self.claimed_k,
                                     tol_k=tol_k, tol_seam=tol_seam)


def becker_extension(chain: LoewnerChain, k: float | None,
                     t_max: float | None = None,
                     validate: bool = True) -> ExtensionMap:
    """Sew the chain across the unit circle, gated by the U(k) check.

    With k=None the claimed constant is the measured grid supremum of
    |1-p|/|1+p|. Exterior points beyond e^{t_max} are still evaluated
    through the closed form; t_max only scopes the validation grid.
    """
    if chain.domain != "disk":
        raise ValueError("becker sewing needs a disk chain")
    horizon = t_max if t_max is not None else math.log(DEFAULT_EXTERIOR_RADIUS) + 1.0
    sup = None
    if validate:
        sup, witness = herglotz_ratio_sup(chain, t_max=horizon)
        if k is None:
            k = sup + 1e-12
        elif sup > k + 1e-9:
            z, t, p = witness
            raise UkViolationError(
                f"driving term leaves U({k:.4g}): ratio {sup:.6f} "
                f"at z = {z}, t = {t}", z, t, p)
    elif k is None:
        raise ValueError("k=None requires validation")

    def interior(z):
        return chain.f(z, 0.0)

    def exterior(z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        return chain.f(z / r, np.log(r))

    return ExtensionMap(interior, exterior, "unit_circle", float(k),
                        provenance="becker", name=f"becker({chain.name})",
                        metadata={"uk_sup": sup})


def radial_extension_with_tau(chain: LoewnerChain, k: float | None,
                              tau: complex, t_max: float | None = None,
                              validate: bool = True) -> ExtensionMap:
    """Becker sewing precomposed with M(z) = (z - tau)/(1 - conj(tau) z).

    tau = 0 reproduces the plain pipeline; an interior tau conjugates
    the extension by the disk automorphism, extending f_0 o M.
    """
    tau = complex(tau)
    base = becker_extension(chain, k, t_max=t_max, validate=validate)
    if tau == 0:
        return base
    moeb = MoebiusTransform.disk_automorphism(tau)
    # the automorphism has a pole at 1/conj(tau), exterior to the circle
    pole = 1 / np.conj(tau)
    return ExtensionMap(base.interior, base.exterior, "unit_circle",
                        base.claimed_k, provenance="moebius-conjugated",
                        pre_moebius=moeb, punctures=(complex(pole),),
                        name=f"{base.name}∘M(tau={tau})",
                        metadata=dict(base.metadata))


def chordal_extension(chain: LoewnerChain, k: float | None,
                      t_max: float = 2.5,
                      validate: bool = True) -> ExtensionMap:
    """Half-plane sewing F = f_0 on H, f_{-Re zeta}(i Im zeta) elsewhere."""
    if chain.domain != "halfplane":
        raise ValueError("chordal sewing needs a half-plane chain")
    sup = None
    if validate:
        sup, witness = chordal_ratio_sup(chain, t_max=t_max)
        if k is None:
            k = sup + 1e-12
        elif sup > k + 1e-9:
            z, t, p = witness
            raise UkViolationError(
                f"half-plane driving term leaves U({k:.4g}): ratio "
                f"{sup:.6f} at zeta = {z}, t = {t}", z, t, p)
    elif k is None:
        raise ValueError("k=None requires validation")

    def interior(z):
        return chain.f(z, 0.0)

    def exterior(z):
        z = np.asarray(z, dtype=complex)
        return chain.f(1j * z.imag, -z.real)

    return ExtensionMap(interior, exterior, "imaginary_axis", float(k),
                        provenance="chordal", name=f"chordal({chain.name})",
                        metadata={"uk_sup": sup})


def chordal_translation_chain(speed: complex = 1.0 + 0j) -> LoewnerChain:
    """f_t(zeta) = zeta - speed t, the chain of the constant field."""
    speed = complex(speed)
    if speed.real <= 0:
        raise ValueError("need Re speed > 0 for expanding images")

    def value(z, t):
        return np.asarray(z, dtype=complex) - speed * np.asarray(t)

    ones = lambda z: np.ones(np.shape(z), dtype=complex)
    return LoewnerChain(value, fdot=lambda z, t: -speed * ones(z),
                        fprime=lambda z, t: ones(z),
                        domain="halfplane", name=f"translation({speed})")


def chordal_parabola_chain() -> LoewnerChain:
    """f_t(zeta) = (zeta^2 - 2t)/2, the chain driven by p_H = 1/zeta.

    This is the zero-driving special case of the boundary-hull field
    1/(zeta + i lambda(t)); its evolution maps are sqrt(zeta^2 + 2t).
    """

    def value(z, t):
        z = np.asarray(z, dtype=complex)
        return (z * z - 2 * np.asarray(t)) / 2

    return LoewnerChain(value,
                        fdot=lambda z, t: -np.ones(np.shape(z), dtype=complex),
                        fprime=lambda z, t: np.asarray(z, dtype=complex),
                        domain="halfplane", name="parabola")


def ahlfors_weill_extension(f: AnalyticMap, k: float,
                            grid: DiskGrid = DiskGrid()) -> ExtensionMap:
    """Reflection extension for maps with small Schwarzian norm.

    Precondition: sup (1-|z|^2)^2 |S_f| <= k on the grid. The exterior
    value at z is the osculating Moebius approximation of f at the
    reflected point 1/conj(z); the claimed Beltrami field is

        mu(z) = -(1/2)(|z|^2 - 1)^2 S_f(1/conj(z)) / conj(z)^4.
    """
    zs = grid.points()
    weighted = (1 - np.abs(zs) ** 2) ** 2 * np.abs(schwarzian(f, zs))
    i = int(np.argmax(weighted))
    norm = float(weighted[i])
    if norm > k + 1e-9:
        raise NormViolationError(
            f"Schwarzian norm {norm:.6f} exceeds {k}", complex(zs[i]), norm)

    def interior(z):
        return f(z)

    def exterior(z):
        z = np.asarray(z, dtype=complex)
        w = 1 / np.conj(z)
        fw = f(w)
        fp = f.deriv(w, 1)
        q = f.deriv(w, 2) / (2 * fp)
        d = z - w
        return fw + fp * d / (1 - d * q)

    def claimed_beltrami(z):
        z = np.asarray(z, dtype=complex)
        w = 1 / np.conj(z)
        return -0.5 * (np.abs(z) ** 2 - 1) ** 2 * schwarzian(f, w) / np.conj(z) ** 4

    return ExtensionMap(interior, exterior, "unit_circle", float(k),
                        provenance="ahlfors-weill",
                        name=f"ahlfors-weill({f.name})",
                        metadata={"schwarzian_norm": norm},
                        claimed_beltrami=claimed_beltrami)


# ---------------------------------------------------------------------------
# Explicit example catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitExample:
    """Catalog entry: either a worked extension or a counterexample.

    Counterexamples carry non_extendable=True and a naive sewing that a
    verification run is expected to reject for every k < 1.
    """

    name: str
    extension: Optional[ExtensionMap]
    claimed_k: float
    non_extendable: bool = False
    notes: str = ""


def affine_laurent_example(k: float) -> ExplicitExample:
    """z + k conj(z) inside the disk sewn with z + k/z outside.

    The interior piece has |mu| = k everywhere; the exterior piece is
    holomorphic, so the maximal dilatation of the whole map is k.
    """
    if not 0 <= k < 1:
        raise ValueError("k must lie in [0, 1)")

    def interior(z):
        z = np.asarray(z, dtype=complex)
        return z + k * np.conj(z)

    def exterior(z):
        z = np.asarray(z, dtype=complex)
        return z + k / z

    ext = ExtensionMap(interior, exterior, "unit_circle", k,
                       provenance="explicit-example",
                       name=f"affine-laurent({k})")
    return ExplicitExample(f"affine-laurent({k})", ext, k,
                           notes="interior |mu| = k, exterior conformal")


def radial_stretch_example(a: float = 0.5) -> ExplicitExample:
    """Identity inside, phi(r) e^{i theta} outside.

    phi(r) = r + a(1 - e^{1-r}) is increasing and bi-Lipschitz with
    constant M = 1 + a, so |mu| = |phi - r phi'|/(phi + r phi') is
    bounded by (M^2-1)/(M^2+1).
    """
    if a < 0:
        raise ValueError("need a >= 0")
    M = 1.0 + a
    bound = (M * M - 1) / (M * M + 1) if M > 1 else 0.0

    def interior(z):
        return np.asarray(z, dtype=complex)

    def exterior(z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        phi = r + a * (1 - np.exp(1 - r))
        return phi * z / r

    ext = ExtensionMap(interior, exterior, "unit_circle", bound,
                       provenance="explicit-example",
                       name=f"radial-stretch(a={a})")
    return ExplicitExample(f"radial-stretch(a={a})", ext, bound,
                           notes=f"bi-Lipschitz constant M = {M}")


def radial_stretch_mu(a: float, r):
    """Exact |mu| of the radial stretch at radius r (oracle formula)."""
    r = np.asarray(r, dtype=float)
    phi = r + a * (1 - np.exp(1 - r))
    dphi = 1 + a * np.exp(1 - r)
    return np.abs(phi - r * dphi) / (phi + r * dphi)


def sector_example(beta: float) -> ExplicitExample:
    """Power of the Cayley map onto a sector, sewn with a radial power.

    Interior: ((1+z)/(1-z))^beta. Exterior: -(h(-K(z)))^{2-beta} with
    h(rho e^{i theta}) = rho^{beta/(2-beta)} e^{i theta}; the two agree
    on the circle and the maximal dilatation is |1 - beta|.
    """
    if not 0 < beta < 2:
        raise ValueError("beta must lie in (0, 2)")
    gamma = beta / (2 - beta)

    inner_map = sector_map(beta)

    def interior(z):
        return inner_map(z)

    def exterior(z):
        z = np.asarray(z, dtype=complex)
        w = -cayley_exterior(z)          # right half-plane for |z| > 1
        stretched = w * np.abs(w) ** (gamma - 1)
        return -np.exp((2 - beta) * np.log(stretched))

    ext = ExtensionMap(interior, exterior, "unit_circle", abs(1 - beta),
                       provenance="explicit-example",
                       punctures=(1 + 0j,),
                       name=f"sector(beta={beta})")
    return ExplicitExample(f"sector(beta={beta})", ext, abs(1 - beta),
                           notes="uniform |mu| = |1-beta| outside")


def cayley_exterior(z):
    """(1+z)/(1-z) evaluated on |z| > 1 (maps onto the left half-plane)."""
    z = np.asarray(z, dtype=complex)
    return (1 + z) / (1 - z)


def spiral_stretch_example(lam: float) -> ExplicitExample:
    """Whole-plane logarithmic spiral map z |z|^{e^{i lam} - 1}.

    In polar form e^{i theta} exp(e^{i lam} log r); the dilatation is
    tan(lam/2) at every point away from the origin, where the map is
    not differentiable.
    """
    if not -math.pi / 2 < lam < math.pi / 2:
        raise ValueError("lambda must lie in (-pi/2, pi/2)")
    c = np.exp(1j * lam)

    def whole(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        nz = z != 0
        out[nz] = z[nz] * np.exp((c - 1) * np.log(np.abs(z[nz])))
        return out

    k = abs(math.tan(lam / 2))
    ext = ExtensionMap(whole, whole, None, k,
                       provenance="explicit-example",
                       punctures=(0j,),
                       name=f"spiral-stretch(lam={lam})")
    return ExplicitExample(f"spiral-stretch(lam={lam})", ext, k,
                           notes="uniform |mu| = tan(lam/2), origin singular")


def naive_starlike_sewing(f: AnalyticMap, k: float) -> ExtensionMap:
    """Sew r f(e^{i theta}) outside the circle with no U(k) gate.

    Used to exercise expected failures: for non-extendable maps the
    verification run must reject this for every k < 1.
    """

    def interior(z):
        return f(z)

    def exterior(z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        return r * f(z / r)

    return ExtensionMap(interior, exterior, "unit_circle", k,
                        provenance="explicit-example",
                        name=f"naive-sewing({f.name})")


def counterexample_entries() -> list:
    """The two classical maps with no quasiconformal extension."""
    return [
        ExplicitExample("koebe", None, 1.0, non_extendable=True,
                        notes="image omits only a slit"),
        ExplicitExample("cardioid", None, 1.0, non_extendable=True,
                        notes="boundary image has a cusp"),
    ]


def explicit_examples(k: float = 0.3, a: float = 0.5, beta: float = 0.5,
                      lam: float = 0.6) -> list:
    """The four worked extensions plus the two counterexamples."""
    return [
        affine_laurent_example(k),
        radial_stretch_example(a),
        sector_example(beta),
        spiral_stretch_example(lam),
        *counterexample_entries(),
    ]


# ---------------------------------------------------------------------------
# End-to-end pipeline
# ---------------------------------------------------------------------------

@dataclass
class PipelineResult:
    """Everything a pipeline run produced, stage by stage."""

    spec_label: str
    method: str
    classifier: Optional[SubclassLabel]
    uk_sup: Optional[float]
    claimed_k: float
    report: DilatationReport
    schwarzian_norm: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.report.passed

    def summary(self) -> dict:
        out = {
            "spec": self.spec_label,
            "method": self.method,
            "claimed_k": self.claimed_k,
            "passed": bool(self.passed),
            "verification": self.report.summary(),
        }
        if self.classifier is not None:
            out["classifier"] = self.classifier.to_dict()
        if self.uk_sup is not None:
            out["uk_sup"] = self.uk_sup
        if self.schwarzian_norm is not None:
            out["schwarzian_norm"] = self.schwarzian_norm
        return out


def extension_pipeline(spec: ChainSpec, k: float | None,
                       method: str = "becker",
                       tau: complex = 0j,
                       region: GridSpec = DEFAULT_REGION,
                       tol_k: float = DEFAULT_TOL_K,
                       tol_seam: float = DEFAULT_TOL_SEAM) -> PipelineResult:
    """classify -> build chain -> extend -> verify, with stage labels.

    Raises PipelineError wrapping the failing stage's exception; the
    mathematical PASS/FAIL of a completed run lives in the report.
    """
    classifier = None
    uk_sup = None
    t_max = math.log(max(hi for _, hi in region.bands)) + 0.5 \
        if region.kind == "polar" else 2.5

    if method == "ahlfors-weill":
        if k is None:
            raise ValueError("ahlfors-weill pipeline needs an explicit k")
        try:
            ext = ahlfors_weill_extension(spec.base, k)
        except NormViolationError as exc:
            raise PipelineError("extension-precondition", exc)
        try:
            report = ext.verify(region, tol_k=tol_k, tol_seam=tol_seam)
        except Exception as exc:
            raise PipelineError("verification", exc)
        return PipelineResult(spec.label, method, None, None,
                              ext.claimed_k, report,
                              schwarzian_norm=ext.metadata.get("schwarzian_norm"))

    if method not in ("becker", "chordal"):
        raise ValueError(f"unknown extension method {method!r}")

    try:
        chain = build_chain(spec)
        classifier = classify_subclass(
            spec.base,
            {"starlike": "starlike", "convex": "convex", "spiral": "spiral",
             "close-to-convex": "close-to-convex",
             "noshiro-warschawski": "noshiro-warschawski",
             "bazilevic": "bazilevic", "ahlfors": "starlike"}[spec.kind],
            g=spec.g, lam=spec.lam, alpha=spec.alpha, beta=spec.beta) \
            if spec.kind != "ahlfors" else None
    except InvalidBaseError as exc:
        raise PipelineError("classifier", exc)

    try:
        if method == "becker":
            if tau != 0:
                ext = radial_extension_with_tau(chain, k, tau, t_max=t_max)
            else:
                ext = becker_extension(chain, k, t_max=t_max)
        else:
            ext = chordal_extension(chain, k, t_max=t_max)
        uk_sup = ext.metadata.get("uk_sup")
    except UkViolationError as exc:
        raise PipelineError("extension-precondition", exc)

    try:
        report = ext.verify(region, tol_k=tol_k, tol_seam=tol_seam)
    except Exception as exc:
        raise PipelineError("verification", exc)
    return PipelineResult(spec.label, method, classifier, uk_sup,
                          ext.claimed_k, report)
