"""Complex-analytic primitives.

Holomorphic maps are represented by plain evaluators plus optional
closed-form derivatives. When closed forms are absent, derivatives come
from a small Cauchy circle stencil

    f^(m)(z) = m!/(n h^m) * sum_j f(z + h w_j) conj(w_j)^m,   w_j = e^{2pi i j/n},

which is exact for polynomials of degree < n and keeps roundoff at
machine level for moderate h. A plain central-difference mode is kept as
a fallback for evaluators that are only piecewise smooth.

All objects here are immutable after construction and safe to share
between threads; every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateTransformError,
    DomainError,
    PoleError,
    SamplingError,
)

ComplexLike = "complex | np.ndarray"

_SPECTRAL_POINTS = 16
_SPECTRAL_SCALE = 0.25


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _maybe_scalar(values, z):
    if np.ndim(z) == 0:
        return complex(np.asarray(values).reshape(()))
    return values


# ---------------------------------------------------------------------------
# AnalyticMap
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticMap:
    """A holomorphic map with derivative access.

    Parameters
    ----------
    func : callable
        Vectorised evaluator z -> f(z).
    d1, d2, d3 : callable, optional
        Closed-form derivatives. If ``d1`` is present the map reports
        derivative mode ``closed``.
    domain : str
        One of ``disk``, ``halfplane``, ``exterior``, ``plane``. Used to
        scale numeric stencils by the distance to the boundary.
    derivative_mode : str
        ``spectral`` (circle stencil) or ``central`` for maps without
        closed forms.
    """

    func: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    d3: Optional[Callable] = None
    domain: str = "disk"
    name: str = "map"
    derivative_mode: str = "spectral"

    def __call__(self, z):
        return self.func(z)

    @property
    def mode(self) -> str:
        return "closed" if self.d1 is not None else self.derivative_mode

    def boundary_distance(self, z):
        z = _as_complex(z)
        if self.domain == "disk":
            d = 1.0 - np.abs(z)
        elif self.domain == "halfplane":
            d = np.real(z)
        elif self.domain == "exterior":
            d = np.abs(z) - 1.0
        else:
            d = np.maximum(np.abs(z), 1.0)
        return np.maximum(d, 1e-12)

    def deriv(self, z, order: int = 1):
        """Return f^(order)(z), order in {1, 2, 3}."""
        if order == 1 and self.d1 is not None:
            return self.d1(z)
        if order == 2 and self.d2 is not None:
            return self.d2(z)
        if order == 3 and self.d3 is not None:
            return self.d3(z)
        if not 1 <= order <= 3:
            raise ValueError(f"derivative order {order} unsupported")
        if self.derivative_mode == "central":
            return self._central_derivative(z, order)
        return self._spectral_derivative(z, order)

    def _spectral_derivative(self, z, order: int):
        z = _as_complex(z)
        h = _SPECTRAL_SCALE * self.boundary_distance(z)
        n = _SPECTRAL_POINTS
        j = np.arange(n)
        w = np.exp(2j * np.pi * j / n)
        samples = self.func(z[..., None] + h[..., None] * w)
        weights = np.exp(-2j * np.pi * order * j / n)
        fact = {1: 1.0, 2: 2.0, 3: 6.0}[order]
        out = fact * np.sum(samples * weights, axis=-1) / (n * h ** order)
        return _maybe_scalar(out, z)

    def _central_derivative(self, z, order: int):
        z = _as_complex(z)
        dist = self.boundary_distance(z)
        f = self.func
        if order == 1:
            h = 1e-6 * dist
            out = (f(z + h) - f(z - h)) / (2 * h)
        elif order == 2:
            h = 1e-4 * dist
            out = (f(z + h) - 2 * f(z) + f(z - h)) / h ** 2
        else:
            h = 1e-3 * dist
            out = (f(z + 2 * h) - 2 * f(z + h) + 2 * f(z - h) - f(z - 2 * h)) / (2 * h ** 3)
        return _maybe_scalar(out, z)

    def compose(self, inner: "AnalyticMap", name: str | None = None) -> "AnalyticMap":
        """self o inner, with chain-rule closed forms when both carry them."""
        outer = self
        func = lambda z: outer.func(inner.func(z))
        d1 = d2 = d3 = None
        if outer.d1 is not None and inner.d1 is not None:
            d1 = lambda z: outer.d1(inner.func(z)) * inner.d1(z)
            if outer.d2 is not None and inner.d2 is not None:
                def d2(z, o=outer, i=inner):
                    w, g1, g2 = i.func(z), i.d1(z), i.d2(z)
                    return o.d2(w) * g1 ** 2 + o.d1(w) * g2
                if outer.d3 is not None and inner.d3 is not None:
                    def d3(z, o=outer, i=inner):
                        w, g1, g2, g3 = i.func(z), i.d1(z), i.d2(z), i.d3(z)
                        return (o.d3(w) * g1 ** 3 + 3 * o.d2(w) * g1 * g2
                                + o.d1(w) * g3)
        return AnalyticMap(func, d1, d2, d3, domain=inner.domain,
                           name=name or f"{outer.name}∘{inner.name}",
                           derivative_mode=inner.derivative_mode)


def derivative_agreement(f: AnalyticMap, z, rel_tol: float = 1e-6) -> bool:
    """Check closed-form f' against central differences at points z."""
    if f.d1 is None:
        return True
    z = _as_complex(z)
    closed = f.d1(z)
    numeric = f._central_derivative(z, 1)
    scale = np.maximum(np.abs(closed), 1.0)
    return bool(np.all(np.abs(closed - numeric) <= rel_tol * scale))


# ---------------------------------------------------------------------------
# Moebius transforms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MoebiusTransform:
    """M(z) = (az + b)/(cz + d) with ad - bc != 0."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.det == 0:
            raise ValueError("degenerate coefficients: ad - bc = 0")

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __call__(self, z):
        z = _as_complex(z)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def compose(self, other: "MoebiusTransform") -> "MoebiusTransform":
        """self o other via the matrix product."""
        return MoebiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.d, -self.b, -self.c, self.a)

    def to_map(self, domain: str = "disk", name: str = "moebius") -> AnalyticMap:
        a, b, c, d = self.a, self.b, self.c, self.d
        det = self.det

        def func(z):
            z = _as_complex(z)
            return (a * z + b) / (c * z + d)

        def d1(z):
            z = _as_complex(z)
            return det / (c * z + d) ** 2

        def d2(z):
            z = _as_complex(z)
            return -2 * c * det / (c * z + d) ** 3

        def d3(z):
            z = _as_complex(z)
            return 6 * c ** 2 * det / (c * z + d) ** 4

        return AnalyticMap(func, d1, d2, d3, domain=domain, name=name)

    @staticmethod
    def identity() -> "MoebiusTransform":
        return MoebiusTransform(1, 0, 0, 1)

    @staticmethod
    def disk_automorphism(tau: complex) -> "MoebiusTransform":
        """M(z) = (z - tau)/(1 - conj(tau) z); requires |tau| < 1."""
        tau = complex(tau)
        if abs(tau) >= 1:
            raise DomainError(f"tau must be interior, got |tau| = {abs(tau)}")
        return MoebiusTransform(1, -tau, -np.conj(tau), 1)


# ---------------------------------------------------------------------------
# Taylor coefficients by circle sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TaylorCoefficients:
    """Coefficients a_0..a_N recovered from circle samples of radius r."""

    coefficients: np.ndarray
    radius: float
    n_samples: int

    def __getitem__(self, n: int) -> complex:
        return complex(self.coefficients[n])

    def __len__(self) -> int:
        return len(self.coefficients)


def taylor_coefficients(f, n: int, radius: float = 0.5,
                        n_samples: int | None = None) -> TaylorCoefficients:
    """Coefficients a_0..a_n of f via the discrete Cauchy integral.

    Uses max(4n, 64) uniform samples on |z| = radius by default; the
    aliasing error then decays like radius^(m - n) in the sample count m.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if not 0 < radius < 1:
        raise ValueError("sampling radius must lie in (0, 1)")
    m = n_samples or max(4 * n, 64)
    theta = 2 * np.pi * np.arange(m) / m
    zs = radius * np.exp(1j * theta)
    vals = _as_complex(f(zs))
    bad = ~np.isfinite(vals)
    if np.any(bad):
        theta_bad = float(theta[np.argmax(bad)])
        raise SamplingError(
            f"non-finite sample at theta = {theta_bad:.6f}", theta=theta_bad)
    spectrum = np.fft.fft(vals) / m
    coeffs = spectrum[: n + 1] / radius ** np.arange(n + 1)
    return TaylorCoefficients(coeffs, radius, m)


# ---------------------------------------------------------------------------
# Classical maps
# ---------------------------------------------------------------------------

def koebe(z):
    """z / (1 - z)^2 on the unit disk; coefficients are a_n = n."""
    z = _as_complex(z)
    if np.any(np.abs(z) >= 1):
        raise DomainError("koebe requires |z| < 1")
    return _maybe_scalar(z / (1 - z) ** 2, z)


def koebe_map() -> AnalyticMap:
    # unchecked evaluator: chains need boundary values K(e^{i theta})
    return AnalyticMap(
        lambda z: _as_complex(z) / (1 - _as_complex(z)) ** 2,
        d1=lambda z: (1 + z) / (1 - z) ** 3,
        d2=lambda z: (4 + 2 * z) / (1 - z) ** 4,
        d3=lambda z: (18 + 6 * z) / (1 - z) ** 5,
        name="koebe",
    )


def identity_map() -> AnalyticMap:
    one = lambda z: np.ones_like(_as_complex(z))
    zero = lambda z: np.zeros_like(_as_complex(z))
    return AnalyticMap(lambda z: _as_complex(z), one, zero, zero, name="id")


def scaled_koebe(k: float) -> AnalyticMap:
    """z / (1 - kz)^2, the coefficient-extremal map with a_2 = 2k."""
    if not 0 <= k < 1:
        raise ValueError("parameter k must lie in [0, 1)")

    return AnalyticMap(
        lambda z: _as_complex(z) / (1 - k * _as_complex(z)) ** 2,
        d1=lambda z: (1 + k * z) / (1 - k * z) ** 3,
        d2=lambda z: (4 * k + 2 * k ** 2 * z) / (1 - k * z) ** 4,
        d3=lambda z: (18 * k ** 2 + 6 * k ** 3 * z) / (1 - k * z) ** 5,
        name=f"scaled-koebe({k})",
    )


def root_scaled_koebe(k: float, n: int) -> AnalyticMap:
    """The n-th coefficient extremal z (1 - k z^{n-1})^{-2/(n-1)}.

    Its only nonzero early coefficients are a_1 = 1 and a_n = 2k/(n-1).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if n == 2:
        return scaled_koebe(k)
    m = n - 1
    q = -2.0 / m

    def func(z):
        z = _as_complex(z)
        return z * (1 - k * z ** m) ** q

    def d1(z):
        z = _as_complex(z)
        b = 1 - k * z ** m
        return b ** q + z * q * b ** (q - 1) * (-k * m * z ** (m - 1))

    return AnalyticMap(func, d1, name=f"root-koebe({k},{n})")


def half_plane_map() -> AnalyticMap:
    """z / (1 - z); convex, maps the disk onto Re w > -1/2."""
    return AnalyticMap(
        lambda z: _as_complex(z) / (1 - _as_complex(z)),
        d1=lambda z: 1 / (1 - z) ** 2,
        d2=lambda z: 2 / (1 - z) ** 3,
        d3=lambda z: 6 / (1 - z) ** 4,
        name="half-plane",
    )


def cardioid_map() -> AnalyticMap:
    """z - z^2/2; univalent, boundary image is a cardioid with a cusp."""
    zero = lambda z: np.zeros_like(_as_complex(z))
    return AnalyticMap(
        lambda z: _as_complex(z) - _as_complex(z) ** 2 / 2,
        d1=lambda z: 1 - _as_complex(z),
        d2=lambda z: -np.ones_like(_as_complex(z)),
        d3=zero,
        name="cardioid",
    )


def quadratic_map(eps: float) -> AnalyticMap:
    zero = lambda z: np.zeros_like(_as_complex(z))
    return AnalyticMap(
        lambda z: _as_complex(z) + eps * _as_complex(z) ** 2,
        d1=lambda z: 1 + 2 * eps * _as_complex(z),
        d2=lambda z: 2 * eps * np.ones_like(_as_complex(z)),
        d3=zero,
        name=f"quadratic({eps})",
    )


def polynomial_map(coefficients: Sequence[complex]) -> AnalyticMap:
    """Polynomial sum c_j z^j from the constant term upward."""
    coeffs = np.asarray(list(coefficients), dtype=complex)

    def horner(cs, z):
        acc = np.zeros_like(z)
        for c in cs[::-1]:
            acc = acc * z + c
        return acc

    def dcoeffs(cs):
        return cs[1:] * np.arange(1, len(cs))

    c1 = dcoeffs(coeffs)
    c2 = dcoeffs(c1) if len(c1) else c1
    c3 = dcoeffs(c2) if len(c2) else c2
    return AnalyticMap(
        lambda z: horner(coeffs, _as_complex(z)),
        d1=lambda z: horner(c1, _as_complex(z)),
        d2=lambda z: horner(c2, _as_complex(z)),
        d3=lambda z: horner(c3, _as_complex(z)),
        name="polynomial",
    )


def rotate_map(f: AnalyticMap, theta: float) -> AnalyticMap:
    """e^{-i theta} f(e^{i theta} z), the class-preserving rotation."""
    w = np.exp(1j * theta)
    d1 = (lambda z: f.d1(w * _as_complex(z))) if f.d1 else None
    d2 = (lambda z: w * f.d2(w * _as_complex(z))) if f.d2 else None
    d3 = (lambda z: w * w * f.d3(w * _as_complex(z))) if f.d3 else None
    return AnalyticMap(lambda z: f.func(w * _as_complex(z)) / w,
                       d1, d2, d3, domain=f.domain,
                       name=f"rot({theta:.3f})∘{f.name}")


def cayley(z):
    """(1 + z)/(1 - z): unit disk onto the right half-plane."""
    z = _as_complex(z)
    if np.any(z == 1):
        raise PoleError("cayley has a pole at z = 1")
    return _maybe_scalar((1 + z) / (1 - z), z)


def inverse_cayley(w):
    """(w - 1)/(w + 1), inverse of the Cayley map."""
    w = _as_complex(w)
    if np.any(w == -1):
        raise PoleError("inverse cayley has a pole at w = -1")
    return _maybe_scalar((w - 1) / (w + 1), w)


def cayley_map() -> AnalyticMap:
    return MoebiusTransform(1, 1, -1, 1).to_map(name="cayley")


def sector_map(beta: float) -> AnalyticMap:
    """((1+z)/(1-z))^beta: disk onto the sector |arg w| < pi beta / 2."""
    if not 0 < beta < 2:
        raise ValueError("beta must lie in (0, 2)")

    def func(z):
        return np.exp(beta * np.log(cayley(z)))

    def d1(z):
        z = _as_complex(z)
        # (K^beta)' = beta K^{beta-1} K', K' = 2/(1-z)^2
        return beta * np.exp((beta - 1) * np.log(cayley(z))) * 2 / (1 - z) ** 2

    return AnalyticMap(func, d1, name=f"sector({beta})")


def koebe_transform(f: AnalyticMap, zeta: complex) -> AnalyticMap:
    """Renormalised precomposition with the disk automorphism moving 0 to zeta.

    Keeps the class of normalised univalent maps closed; the second
    Taylor coefficient becomes (1-|zeta|^2) f''(zeta)/(2 f'(zeta)) - conj(zeta).
    """
    zeta = complex(zeta)
    if abs(zeta) >= 1:
        raise DomainError("zeta must satisfy |zeta| < 1")
    fp = f.deriv(zeta, 1)
    if abs(fp) < 1e-14:
        raise DegenerateTransformError("f'(zeta) = 0, transform degenerates")
    moeb = MoebiusTransform(1, zeta, np.conj(zeta), 1)  # z -> (z+zeta)/(1+conj(zeta) z)
    inner = moeb.to_map(name="aut")
    fz = complex(f(zeta))
    den = (1 - abs(zeta) ** 2) * fp
    comp = f.compose(inner)
    d1 = comp.d1 and (lambda z: comp.d1(z) / den)
    d2 = comp.d2 and (lambda z: comp.d2(z) / den)
    d3 = comp.d3 and (lambda z: comp.d3(z) / den)
    return AnalyticMap(lambda z: (comp.func(z) - fz) / den, d1, d2, d3,
                       name=f"koebe-transform({f.name})")
