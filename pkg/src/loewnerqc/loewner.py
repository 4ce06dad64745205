"""Loewner evolution engine.

Integrates the radial evolution equation

    dw/dt = (tau(t) - w)(1 - conj(tau(t)) w) p(w, t),

which reduces to dw/dt = -w p(w, t) for tau = 0, and the half-plane
(chordal) equation dW/dt = p_H(W, t). The integrator is an embedded
Dormand-Prince 4(5) pair with step rejection whenever a trial stage
leaves the domain (retry with half the step); time-discontinuous data
is split exactly at its breakpoints.

Chains are either closed-form catalog objects or reconstructed from an
evolution family through the scaling limit e^t phi_{s,t}(z), with
Richardson extrapolation in e^{-t}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    CriticalPointError,
    DomainError,
    HorizonError,
    InversionError,
    LoewnerQCError,
    StiffBoundaryError,
    SwallowingError,
)

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-10
HORIZON_DEFAULT = 25.0
HORIZON_MAX = 40.0
HORIZON_STEP = 2.0
CONVERGENCE_TOL = 1e-6


# ---------------------------------------------------------------------------
# Herglotz fields and Berkson-Porta data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HerglotzField:
    """p(z, t): analytic in z for fixed t, piecewise continuous in t.

    The validity certificate is the minimum of Re p over a sample grid;
    the theory requires Re p >= 0 everywhere.
    """

    p: Callable
    breakpoints: tuple = ()
    name: str = "herglotz"

    def __call__(self, z, t):
        return self.p(z, t)

    def validation_certificate(self, t_max: float, n_radii: int = 10,
                               n_angles: int = 24, n_times: int = 9) -> float:
        r = np.linspace(0.05, 0.95, n_radii)
        th = 2 * np.pi * np.arange(n_angles) / n_angles
        zs = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
        times = np.linspace(0.0, t_max, n_times)
        times = np.union1d(times, [b + 1e-9 for b in self.breakpoints if b < t_max])
        worst = math.inf
        for t in times:
            worst = min(worst, float(np.min(np.real(self.p(zs, float(t))))))
        return worst

    @staticmethod
    def constant(value: complex, name: str | None = None) -> "HerglotzField":
        value = complex(value)
        return HerglotzField(
            lambda z, t: np.full(np.shape(z), value) if np.ndim(z) else value,
            name=name or f"constant({value})")

    @staticmethod
    def time_independent(pz: Callable, name: str = "autonomous") -> "HerglotzField":
        return HerglotzField(lambda z, t: pz(z), name=name)

    @staticmethod
    def piecewise_constant(times: Sequence[float],
                           values: Sequence[complex]) -> "HerglotzField":
        """Right-continuous steps: value[i] on [times[i-1], times[i])."""
        if len(values) != len(times) + 1:
            raise ValueError("need one more value than breakpoints")
        ts = np.asarray(times, dtype=float)
        vs = np.asarray(values, dtype=complex)

        def p(z, t):
            v = vs[int(np.searchsorted(ts, t, side="right"))]
            return np.full(np.shape(z), v) if np.ndim(z) else v

        return HerglotzField(p, breakpoints=tuple(float(t) for t in times),
                             name="piecewise-constant")


def _zero_tau(t: float) -> complex:
    return 0j


@dataclass(frozen=True)
class BerksonPortaData:
    """Pairing of a Herglotz field with a Denjoy-Wolff trajectory tau(t)."""

    field: HerglotzField
    tau: Callable = _zero_tau
    tau_breakpoints: tuple = ()
    name: str = "bp-data"

    def tau_at(self, t: float) -> complex:
        return complex(self.tau(t))

    @property
    def breakpoints(self) -> tuple:
        return tuple(sorted(set(self.field.breakpoints) | set(self.tau_breakpoints)))

    def is_radial_origin(self, t_max: float = 40.0, n: int = 17) -> bool:
        return all(abs(self.tau_at(t)) < 1e-14
                   for t in np.linspace(0.0, t_max, n))

    def vector_field(self, w, t: float):
        tau = self.tau_at(t)
        if tau == 0:
            return -w * self.field(w, t)
        return (tau - w) * (1 - np.conj(tau) * w) * self.field(w, t)

    def validate(self, t_max: float) -> float:
        """Certificate: min Re p on the grid; also checks |tau| <= 1."""
        for t in np.linspace(0.0, t_max, 33):
            if abs(self.tau_at(float(t))) > 1 + 1e-12:
                raise DomainError(f"|tau({t})| > 1")
        return self.field.validation_certificate(t_max)

    @staticmethod
    def radial(field: HerglotzField, name: str | None = None) -> "BerksonPortaData":
        return BerksonPortaData(field, name=name or f"radial({field.name})")

    @staticmethod
    def with_constant_tau(field: HerglotzField, tau: complex) -> "BerksonPortaData":
        tau = complex(tau)
        if abs(tau) > 1 + 1e-12:
            raise DomainError("constant tau must satisfy |tau| <= 1")
        return BerksonPortaData(field, tau=lambda t: tau,
                                name=f"tau={tau}")

    @staticmethod
    def with_piecewise_tau(field: HerglotzField, times: Sequence[float],
                           values: Sequence[complex]) -> "BerksonPortaData":
        if len(values) != len(times) + 1:
            raise ValueError("need one more tau value than breakpoints")
        ts = np.asarray(times, dtype=float)
        vs = [complex(v) for v in values]
        if any(abs(v) > 1 + 1e-12 for v in vs):
            raise DomainError("tau values must satisfy |tau| <= 1")

        def tau(t):
            return vs[int(np.searchsorted(ts, t, side="right"))]

        return BerksonPortaData(field, tau=tau,
                                tau_breakpoints=tuple(float(t) for t in times),
                                name="piecewise-tau")


# ---------------------------------------------------------------------------
# Embedded Runge-Kutta 4(5)
# ---------------------------------------------------------------------------

_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
          187 / 2100, 1 / 40)
_MAX_STEPS = 1_000_000


def _integrate_segment(fun, s: float, t: float, w0: complex,
                       rtol: float, atol: float,
                       guard: Optional[Callable] = None,
                       on_stall: Optional[Callable] = None) -> complex:
    """Adaptive Dormand-Prince from s to t (s < t).

    guard(t, w) keeps trial states inside the domain: a violating trial
    step is rejected and retried at half the size.
    """
    w = complex(w0)
    tc = s
    span = t - s
    h = min(span, 0.1)
    h_min = max(1e-14, 1e-13 * span)
    for _ in range(_MAX_STEPS):
        if tc >= t - 1e-15 * max(1.0, abs(t)):
            return w
        h = min(h, t - tc)
        ks = []
        bad_stage = False
        for i in range(6):
            y = w
            for aij, kj in zip(_DP_A[i], ks):
                y = y + h * aij * kj
            if guard is not None and i > 0 and not guard(tc + _DP_C[i] * h, y):
                bad_stage = True
                break
            ks.append(fun(tc + _DP_C[i] * h, y))
        if not bad_stage:
            w5 = w
            for b, kj in zip(_DP_B5, ks):
                w5 = w5 + h * b * kj
            k7 = fun(tc + h, w5)
            w4 = w
            for b, kj in zip(_DP_B4, ks + [k7]):
                w4 = w4 + h * b * kj
            if guard is not None and not guard(tc + h, w5):
                bad_stage = True
        if bad_stage:
            h *= 0.5
            if h < h_min:
                if on_stall is not None:
                    on_stall(tc, w)
                raise StiffBoundaryError(
                    f"step size underflow at t = {tc:.6f}", tc, w)
            continue
        scale = atol + rtol * max(abs(w), abs(w5))
        err = abs(w5 - w4)
        if err <= scale:
            tc += h
            w = w5
            factor = 5.0 if err == 0 else min(5.0, 0.9 * (scale / err) ** 0.2)
            h *= factor
        else:
            h *= max(0.2, 0.9 * (scale / err) ** 0.2)
            if h < h_min:
                if on_stall is not None:
                    on_stall(tc, w)
                raise StiffBoundaryError(
                    f"step size underflow at t = {tc:.6f}", tc, w)
    raise LoewnerQCError("integrator exceeded maximum step count")


def _split_at_breakpoints(s: float, t: float, breaks: Sequence[float]):
    cuts = sorted(b for b in breaks if s < b < t)
    times = [s] + cuts + [t]
    return list(zip(times[:-1], times[1:]))


def solve_radial_ode(bp: BerksonPortaData, s: float, t: float, z0: complex,
                     rtol: float = DEFAULT_RTOL,
                     atol: float = DEFAULT_ATOL) -> complex:
    """phi_{s,t}(z0) by integrating the disk evolution equation."""
    if abs(z0) >= 1:
        raise DomainError("initial point must satisfy |z| < 1")
    if t < s:
        raise ValueError("need s <= t")
    if t == s:
        return complex(z0)
    w = complex(z0)
    fun = lambda tt, ww: bp.vector_field(ww, tt)
    guard = lambda tt, ww: abs(ww) < 1.0
    for a, b in _split_at_breakpoints(s, t, bp.breakpoints):
        w = _integrate_segment(fun, a, b, w, rtol, atol, guard=guard)
    return w


def solve_chordal_ode(p_h: HerglotzField, s: float, t: float, zeta0: complex,
                      rtol: float = DEFAULT_RTOL,
                      atol: float = DEFAULT_ATOL) -> complex:
    """Half-plane trajectory Phi_{s,t}(zeta0) of dW/dt = p_H(W, t)."""
    if zeta0.real <= 0:
        raise DomainError("initial point must satisfy Re zeta > 0")
    if t < s:
        raise ValueError("need s <= t")
    if t == s:
        return complex(zeta0)
    w = complex(zeta0)
    fun = lambda tt, ww: p_h(ww, tt)
    guard = lambda tt, ww: ww.real > 0.0

    def on_stall(tc, wc):
        if wc.real < 1e-6 * max(1.0, abs(wc)):
            raise SwallowingError(
                f"trajectory reached the boundary axis at t = {tc:.6f}", tc)

    for a, b in _split_at_breakpoints(s, t, p_h.breakpoints):
        w = _integrate_segment(fun, a, b, w, rtol, atol,
                               guard=guard, on_stall=on_stall)
    return w


def schramm_field(driving: Callable, breakpoints: tuple = ()) -> HerglotzField:
    """p_H(zeta, t) = 1/(zeta + i lambda(t)) for a real driving function."""
    return HerglotzField(lambda z, t: 1.0 / (z + 1j * driving(t)),
                         breakpoints=breakpoints, name="schramm")


def evolve_samples(bp_or_field, s: float, times: Sequence[float], z0: complex,
                   setting: str = "radial", rtol: float = DEFAULT_RTOL,
                   atol: float = DEFAULT_ATOL) -> list:
    """Trajectory samples w(t_i) for a CSV dump; times must be increasing."""
    out = []
    w = complex(z0)
    prev = s
    for tt in times:
        if tt < prev:
            raise ValueError("sample times must be nondecreasing")
        if tt > prev:
            if setting == "radial":
                bp = bp_or_field
                fun = lambda a, b: bp.vector_field(b, a)
                guard = lambda tt, ww: abs(ww) < 1.0
                for a, b in _split_at_breakpoints(prev, tt, bp.breakpoints):
                    w = _integrate_segment(fun, a, b, w, rtol, atol, guard=guard)
            else:
                ph = bp_or_field
                for a, b in _split_at_breakpoints(prev, tt, ph.breakpoints):
                    w = _integrate_segment(lambda x, y: ph(y, x), a, b, w,
                                           rtol, atol,
                                           guard=lambda tt, ww: ww.real > 0)
            prev = tt
        out.append((tt, w))
    return out


# ---------------------------------------------------------------------------
# Evolution families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvolutionFamily:
    """Two-parameter solver handle phi_{s,t}(z) over Berkson-Porta data."""

    bp: BerksonPortaData
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL

    def phi(self, s: float, t: float, z: complex) -> complex:
        return solve_radial_ode(self.bp, s, t, z, self.rtol, self.atol)

    def semigroup_residual(self, s: float, u: float, t: float, z: complex) -> float:
        direct = self.phi(s, t, z)
        composed = self.phi(u, t, self.phi(s, u, z))
        return abs(direct - composed)

    def beta_zero_estimate(self, horizon: float = HORIZON_DEFAULT,
                           dz: float = 1e-4) -> float:
        """Diagnostic for the Loewner-range trichotomy.

        Estimates beta(0) = lim |phi'_{0,t}(0)| / (1 - |phi_{0,t}(0)|^2);
        zero indicates the range is the whole plane. Heuristic: the
        limit is approximated at the finite horizon.
        """
        w0 = self.phi(0.0, horizon, 0.0) if abs(self.bp.tau_at(0)) > 0 else 0j
        d = (self.phi(0.0, horizon, dz) - self.phi(0.0, horizon, -dz)) / (2 * dz)
        return float(abs(d) / (1 - abs(w0) ** 2))


def chain_from_evolution(bp: BerksonPortaData, s: float, z: complex,
                         horizon: float = HORIZON_DEFAULT,
                         extrapolate: bool = True,
                         conv_tol: float = CONVERGENCE_TOL,
                         rtol: float = DEFAULT_RTOL,
                         atol: float = DEFAULT_ATOL) -> complex:
    """f_s(z) as the limit of e^t phi_{s,t}(z), tau = 0 normalisation.

    The scaled trajectory v = e^t phi is integrated directly through
    dv/dt = v (1 - p(e^{-t} v, t)), which converges without amplifying
    integration error by e^t. Convergence is declared when the values
    at horizons T and T+2 agree to conv_tol relatively, after which a
    Richardson step in e^{-T} removes the leading error term. Raises
    HorizonError if still moving at t = 40.
    """
    if not bp.is_radial_origin():
        raise DomainError("scaling limit requires tau = 0 data")
    if z == 0:
        return 0j
    p = bp.field

    def fun(tt, vv):
        return vv * (1.0 - p(math.exp(-tt) * vv, tt))

    def guard(tt, vv):
        return abs(vv) * math.exp(-tt) < 1.0

    v = _piecewise_integrate(fun, s, horizon, math.exp(s) * complex(z),
                             rtol, atol, bp.breakpoints, guard)
    t1, v1 = horizon, v
    while True:
        t2 = t1 + HORIZON_STEP
        v2 = _piecewise_integrate(fun, t1, t2, v1, rtol, atol,
                                  bp.breakpoints, guard)
        if abs(v2 - v1) <= conv_tol * max(1.0, abs(v2)):
            if extrapolate:
                damp = math.exp(-HORIZON_STEP)
                return complex((v2 - damp * v1) / (1 - damp))
            return complex(v2)
        if t2 >= HORIZON_MAX:
            raise HorizonError(
                f"no convergence of e^t phi by t = {t2:.1f}: "
                f"|delta| = {abs(v2 - v1):.3e}")
        t1, v1 = t2, v2


def _piecewise_integrate(fun, a, b, w, rtol, atol, breaks, guard):
    for seg_a, seg_b in _split_at_breakpoints(a, b, breaks):
        w = _integrate_segment(fun, seg_a, seg_b, w, rtol, atol, guard=guard)
    return w


# ---------------------------------------------------------------------------
# Loewner chains
# ---------------------------------------------------------------------------

_BOUNDARY_INSET = 1e-6


@dataclass(frozen=True)
class LoewnerChain:
    """Time-indexed family f_t, closed-form or ODE-reconstructed.

    Closed-form chains carry fdot and fprime; reconstructed chains fall
    back to finite differences (time) and a circle stencil (space), and
    evaluate boundary arguments at the small inset 1 - 1e-6.
    """

    f: Callable                       # (z, t) -> value, broadcasting
    fdot: Optional[Callable] = None
    fprime: Optional[Callable] = None
    tau: Callable = _zero_tau
    domain: str = "disk"              # "disk" | "halfplane"
    normalization: str = "classical"  # f_t'(0) = e^t when classical
    boundary_ok: bool = True
    name: str = "chain"
    bp: Optional[BerksonPortaData] = None
    horizon: float = HORIZON_DEFAULT

    def value(self, z, t):
        return self.f(z, t)

    def time_derivative(self, z, t, dt: float = 1e-5):
        if self.fdot is not None:
            return self.fdot(z, t)
        tm = max(t - dt, 0.0)
        return (self.f(z, t + dt) - self.f(z, tm)) / (t + dt - tm)

    def space_derivative(self, z, t):
        if self.fprime is not None:
            return self.fprime(z, t)
        z = np.asarray(z, dtype=complex)
        if self.domain == "disk":
            dist = np.maximum(1 - np.abs(z), 1e-9)
        else:
            dist = np.maximum(np.real(z), 1e-9)
        h = 0.25 * dist
        n = 8
        w = np.exp(2j * np.pi * np.arange(n) / n)
        samples = self.f(z[..., None] + h[..., None] * w, t)
        vals = np.sum(samples * np.conj(w), axis=-1) / (n * h)
        return complex(vals) if np.ndim(z) == 0 else vals

    @staticmethod
    def from_closed_form(f, fdot=None, fprime=None, **kw) -> "LoewnerChain":
        return LoewnerChain(f=f, fdot=fdot, fprime=fprime, **kw)

    @staticmethod
    def from_evolution(bp: BerksonPortaData,
                       horizon: float = HORIZON_DEFAULT,
                       name: str | None = None) -> "LoewnerChain":
        """Reconstructed chain f_t(z) = lim e^u phi_{t,u}(z)."""

        def f(z, t):
            def one(zz):
                zz = complex(zz)
                if abs(zz) >= 1.0 - 1e-9:          # boundary inset
                    zz = zz / abs(zz) * (1 - _BOUNDARY_INSET)
                return chain_from_evolution(bp, t, zz, horizon=horizon)
            if np.ndim(z) == 0:
                return one(z)
            flat = np.asarray(z, dtype=complex).ravel()
            out = np.array([one(v) for v in flat])
            return out.reshape(np.shape(z))

        return LoewnerChain(f=f, tau=bp.tau, boundary_ok=False,
                            name=name or f"reconstructed({bp.name})", bp=bp,
                            horizon=horizon)


def herglotz_from_chain(chain: LoewnerChain, z, t: float,
                        dt: float = 1e-5):
    """Recover p(z, t) from the chain evolution equation.

    Disk chains: p = fdot / ((z - tau)(1 - conj(tau) z) f'), which is
    fdot/(z f') for tau = 0; the z = 0 value is the removable limit,
    the ratio of first z-derivatives of fdot and f. Half-plane chains:
    p = -fdot / f'.
    """
    fdot = chain.time_derivative(z, t, dt)
    fprime = chain.space_derivative(z, t)
    if chain.domain == "halfplane":
        if np.any(np.abs(fprime) < 1e-14):
            raise CriticalPointError("f'(z) = 0 in chordal chain",
                                     witness=_witness(z, fprime))
        return -fdot / fprime
    tau = complex(chain.tau(t))
    z_arr = np.asarray(z, dtype=complex)
    den = (z_arr - tau) * (1 - np.conj(tau) * z_arr) * fprime
    at_origin = (z_arr == 0) & (tau == 0)
    if np.any(np.abs(np.where(at_origin, 1, den)) < 1e-300):
        raise CriticalPointError("vanishing denominator in chain PDE",
                                 witness=_witness(z_arr, den))
    if np.any(at_origin):
        # removable: ratio of first derivatives at the origin
        n, h = 8, 1e-3
        w = np.exp(2j * np.pi * np.arange(n) / n)
        dd = np.sum(np.asarray(chain.time_derivative(h * w, t, dt)) * np.conj(w)) / (n * h)
        fp0 = chain.space_derivative(0.0, t)
        val0 = dd / fp0
        out = np.where(at_origin, val0, np.asarray(fdot) / np.where(at_origin, 1, den))
        return complex(out) if np.ndim(z) == 0 else out
    return fdot / den


def _witness(z, vals):
    z = np.asarray(z, dtype=complex)
    vals = np.asarray(vals, dtype=complex)
    if z.shape:
        return complex(z.ravel()[int(np.argmin(np.abs(vals).ravel()))])
    return complex(z)


def evolution_from_chain(chain: LoewnerChain, s: float, t: float, z: complex,
                         max_iter: int = 50) -> complex:
    """phi_{s,t}(z) = f_t^{-1}(f_s(z)) by Newton iteration.

    Seeds with e^{s-t} z (classical normalisation) and certifies the
    residual |f_t(w) - f_s(z)| <= 1e-10 max(1, |target|).
    """
    target = complex(np.asarray(chain.f(z, s)).reshape(()))
    w = complex(z) * math.exp(s - t) if chain.domain == "disk" else complex(z)
    tol = 1e-10 * max(1.0, abs(target))
    for _ in range(max_iter):
        val = complex(np.asarray(chain.f(w, t)).reshape(()))
        resid = val - target
        if abs(resid) <= tol:
            return w
        dv = complex(np.asarray(chain.space_derivative(w, t)).reshape(()))
        if dv == 0:
            raise InversionError(f"f_t'({w}) = 0 during Newton")
        step = resid / dv
        w_new = w - step
        if chain.domain == "disk" and abs(w_new) >= 1:
            w_new = w - 0.5 * step
            if abs(w_new) >= 1:
                w_new = w_new / abs(w_new) * (1 - 1e-9)
        w = w_new
    raise InversionError(
        f"Newton failed after {max_iter} steps; residual {abs(resid):.3e}")


# ---------------------------------------------------------------------------
# Geometry helpers
# ---------------------------------------------------------------------------

def winding_number(curve: np.ndarray, w: complex) -> int:
    """Winding of a sampled closed curve around w."""
    rel = np.asarray(curve, dtype=complex) - w
    ratios = np.roll(rel, -1) / rel
    total = np.sum(np.angle(ratios))
    return int(round(total / (2 * np.pi)))


def chain_inclusion_holds(chain: LoewnerChain, r: float, s: float, t: float,
                          n_samples: int = 256, shrink: float = 1e-3) -> bool:
    """Subordination check f_s(D_r) inside f_t(D_r) via boundary winding."""
    th = 2 * np.pi * np.arange(n_samples) / n_samples
    curve = np.asarray(chain.f(r * np.exp(1j * th), t))
    probes = np.asarray(chain.f((1 - shrink) * r * np.exp(1j * th[::8]), s))
    return all(winding_number(curve, complex(p)) == 1 for p in probes)


def image_area(chain: LoewnerChain, r: float, t: float,
               n_samples: int = 512) -> float:
    """Shoelace area of f_t(D_r) from boundary samples."""
    th = 2 * np.pi * np.arange(n_samples) / n_samples
    w = np.asarray(chain.f(r * np.exp(1j * th), t))
    x, y = w.real, w.imag
    return float(0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)))


# ---------------------------------------------------------------------------
# JSON field specs
# ---------------------------------------------------------------------------

def herglotz_field_from_spec(obj: dict) -> HerglotzField:
    """Build a field from {kind, ...}; see the CLI schema notes."""
    kind = obj.get("kind")
    if kind == "constant":
        re, im = obj["value"]
        return HerglotzField.constant(complex(re, im))
    if kind == "cayley":
        return HerglotzField.time_independent(
            lambda z: (1 + z) / (1 - z), name="cayley")
    if kind == "cayley-reflected":
        return HerglotzField.time_independent(
            lambda z: (1 - z) / (1 + z), name="cayley-reflected")
    if kind == "piecewise-constant":
        times = [float(t) for t in obj["times"]]
        values = [complex(v[0], v[1]) for v in obj["values"]]
        return HerglotzField.piecewise_constant(times, values)
    raise ValueError(f"unknown field kind {kind!r}")
