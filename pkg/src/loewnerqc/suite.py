"""Seeded property batteries over the whole catalog.

Each battery re-checks one family of invariants on randomly sampled
points, maps and fields; a fixed seed makes the run reproducible. The
CLI `suite` subcommand prints one line per battery and fails the run if
any check fails.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass

import numpy as np

from .analytic import (
    cardioid_map,
    half_plane_map,
    identity_map,
    koebe_map,
    koebe_transform,
    quadratic_map,
    root_scaled_koebe,
    rotate_map,
    scaled_koebe,
    taylor_coefficients,
)
from .beltrami import GridSpec, PlaneMap, verify_quasiconformal, wirtinger
from .criteria import (
    DiskGrid,
    classify_subclass,
    schwarzian_norm_disk,
    strongly_starlike_order,
    sugawa_check,
)
from .analytic import MoebiusTransform
from .loewner import (
    BerksonPortaData,
    EvolutionFamily,
    HerglotzField,
    chain_inclusion_holds,
    image_area,
    solve_radial_ode,
    winding_number,
)
from .qcext import (
    ChainSpec,
    becker_extension,
    build_chain,
    extension_pipeline,
)


@dataclass
class CheckResult:
    battery: str
    name: str
    passed: bool
    n_checks: int
    witness: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  [{self.witness}]" if (self.witness and not self.passed) else ""
        return f"[{self.battery}] {self.name}: {status} ({self.n_checks} checks){extra}"


def _result(battery, name, ok_mask, points=None):
    ok_mask = np.asarray(ok_mask)
    n = int(ok_mask.size)
    passed = bool(np.all(ok_mask))
    witness = ""
    if not passed and points is not None:
        witness = f"witness z = {np.asarray(points).ravel()[int(np.argmin(ok_mask))]}"
    return CheckResult(battery, name, passed, n, witness)


def _disk_samples(rng, n, r_max=0.95):
    r = r_max * np.sqrt(rng.uniform(0, 1, n))
    th = rng.uniform(0, 2 * np.pi, n)
    return r * np.exp(1j * th)


def _catalog_s_maps():
    return [koebe_map(), scaled_koebe(0.2), scaled_koebe(0.35),
            rotate_map(koebe_map(), 0.7), root_scaled_koebe(0.2, 3)]


# ---------------------------------------------------------------------------
# Batteries
# ---------------------------------------------------------------------------

def analytic_battery(rng) -> list:
    out = []
    slack = 1e-9
    z = _disk_samples(rng, 1000)
    r = np.abs(z)
    for f in _catalog_s_maps():
        fp = np.abs(f.deriv(z, 1))
        fv = np.abs(f(z))
        lo_d, hi_d = (1 - r) / (1 + r) ** 3, (1 + r) / (1 - r) ** 3
        lo_f, hi_f = r / (1 + r) ** 2, r / (1 - r) ** 2
        ratio = np.abs(z * f.deriv(z, 1) / f(z))
        lo_r, hi_r = (1 - r) / (1 + r), (1 + r) / (1 - r)
        ok = ((lo_d - slack <= fp) & (fp <= hi_d + slack)
              & (lo_f - slack <= fv) & (fv <= hi_f + slack)
              & (lo_r - slack <= ratio) & (ratio <= hi_r + slack))
        out.append(_result("analytic", f"distortion({f.name})", ok, z))
        out.append(_result("analytic", f"growth({f.name})",
                           fv <= hi_f + slack, z))

    # coefficient oracles
    zetas = _disk_samples(rng, 100, r_max=0.8)
    a2 = [abs(taylor_coefficients(koebe_transform(koebe_map(), z0), 2)[2])
          for z0 in zetas]
    out.append(_result("analytic", "second-coefficient-bound",
                       np.asarray(a2) <= 2 + 1e-6, zetas))
    checks = []
    for k in (0.1, 0.25, 0.4):
        checks.append(abs(taylor_coefficients(scaled_koebe(k), 2)[2] - 2 * k) < 1e-8)
        for n in (3, 4, 5):
            cs = taylor_coefficients(root_scaled_koebe(k, n), n)
            checks.append(abs(cs[n] - 2 * k / (n - 1)) < 1e-8)
    out.append(_result("analytic", "extremal-coefficients", checks))
    return out


def beltrami_battery(rng) -> list:
    out = []
    grid = _disk_samples(rng, 200, r_max=0.9)
    for f in (koebe_map(), scaled_koebe(0.3)):
        mus = []
        for z0 in grid[:60]:
            fz, fzb = wirtinger(f, complex(z0))
            mus.append(abs(fzb / fz))
        out.append(_result("beltrami", f"analytic-mu({f.name})",
                           np.asarray(mus) < 1e-6, grid[:60]))

    # axis-ratio law for affine maps: the major axis sits at arg(mu)/2
    checks, pts = [], []
    for _ in range(40):
        mu = 0.9 * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        th_major = np.angle(mu) / 2
        major = abs(np.exp(1j * th_major) + mu * np.exp(-1j * th_major))
        minor = abs(np.exp(1j * (th_major + np.pi / 2))
                    + mu * np.exp(-1j * (th_major + np.pi / 2)))
        expected = (1 + abs(mu)) / (1 - abs(mu))
        checks.append(abs(major / minor - expected) <= 1e-6 * expected)
        th = rng.uniform(0, 2 * np.pi, 64)
        t_im = np.abs(np.exp(1j * th) + mu * np.exp(-1j * th))
        checks.append(bool(np.all((t_im <= major + 1e-12)
                                  & (t_im >= minor - 1e-12))))
        pts.extend([mu, mu])
    out.append(_result("beltrami", "axis-ratio", checks, pts))

    ks = np.linspace(0, 0.95, 50)
    K = (1 + ks) / (1 - ks)
    out.append(_result("beltrami", "K-monotone", np.diff(K) > 0))

    checks = []
    for _ in range(60):
        m1 = 0.8 * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        m2 = 0.8 * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        comp = abs((m1 + m2) / (1 + m2 * np.conj(m1)))
        bound = (abs(m1) + abs(m2)) / (1 + abs(m1) * abs(m2))
        checks.append(comp <= bound + 1e-12)
    out.append(_result("beltrami", "composition-bound", checks))
    return out


def criteria_battery(rng) -> list:
    out = []
    grid = DiskGrid(n_radii=40, n_angles=96, r_max=0.985)
    f = quadratic_map(0.05)
    base_norm = schwarzian_norm_disk(f, grid)
    checks = []
    for _ in range(6):
        a = 0.5 * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        rot = np.exp(1j * rng.uniform(0, 2 * np.pi))
        g = MoebiusTransform(rot, rot * (-a), -np.conj(a), 1)  # disk automorphism
        h = MoebiusTransform(1 + 0.3j, 0.2, 0.1j, 1)
        conj = h.to_map(domain="plane").compose(f.compose(g.to_map()))
        norm = schwarzian_norm_disk(conj, grid)
        checks.append(abs(norm - base_norm) <= 0.02 * max(base_norm, 1e-12))
    out.append(CheckResult("criteria", "schwarzian-norm-invariance",
                           all(checks), len(checks)))

    checks = []
    for _ in range(10):
        c = 0.4 * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        fq = quadratic_map(abs(c) / 2 + 0.01)
        verdict = sugawa_check(fq, "f'", 1 - 1e-6)
        checks.append(verdict.passed)
    out.append(CheckResult("criteria", "noshiro-warschawski-consistency",
                           all(checks), len(checks)))

    chain_ok = []
    for f in (identity_map(), half_plane_map(), koebe_map(),
              scaled_koebe(0.2), cardioid_map(), quadratic_map(0.1)):
        conv = classify_subclass(f, "convex").passed
        star = classify_subclass(f, "starlike").passed
        ctc = classify_subclass(f, "close-to-convex", g=f).passed if star else True
        chain_ok.append((not conv or star) and (not star or ctc))
    out.append(CheckResult("criteria", "subclass-implication-chain",
                           all(chain_ok), len(chain_ok)))
    return out


def _random_herglotz(rng) -> HerglotzField:
    """Positive combination of disk kernels plus an imaginary constant."""
    m = rng.integers(1, 4)
    etas = [0.8 * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            for _ in range(m)]
    weights = rng.uniform(0.2, 1.0, m)
    gamma = 1j * rng.uniform(-0.5, 0.5)

    def p(z, t):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros(np.shape(z), dtype=complex) + gamma
        for w, eta in zip(weights, etas):
            acc = acc + w * (1 + np.conj(eta) * z) / (1 - np.conj(eta) * z)
        return acc

    return HerglotzField(p, name="kernel-mix")


def loewner_battery(rng) -> list:
    out = []
    checks, pts = [], []
    for _ in range(6):
        bp = BerksonPortaData.radial(_random_herglotz(rng))
        z0 = complex(_disk_samples(rng, 1, 0.8)[0])
        mods = [abs(solve_radial_ode(bp, 0.0, t, z0))
                for t in (0.0, 0.3, 0.8, 1.5, 2.5)]
        checks.append(all(m2 <= m1 + 1e-10 for m1, m2 in zip(mods, mods[1:])))
        pts.append(z0)
    out.append(_result("loewner", "monotone-modulus", checks, pts))

    lip_ok = []
    for spec in (ChainSpec("starlike", scaled_koebe(0.2)),
                 ChainSpec("starlike", koebe_map()),
                 ChainSpec("convex", half_plane_map())):
        chain = build_chain(spec)
        for _ in range(40):
            z = complex(_disk_samples(rng, 1, 0.9)[0])
            s, t = sorted(rng.uniform(0, 2, 2))
            lhs = abs(chain.f(z, t) - chain.f(z, s))
            rhs = 8 * abs(z) / (1 - abs(z)) ** 4 * abs(math.exp(t) - math.exp(s))
            lip_ok.append(lhs <= rhs + 1e-9)
    out.append(CheckResult("loewner", "chain-lipschitz", all(lip_ok), len(lip_ok)))

    ef_ok = []
    for _ in range(4):
        bp = BerksonPortaData.radial(_random_herglotz(rng))
        ef = EvolutionFamily(bp)
        for _ in range(5):
            z = complex(_disk_samples(rng, 1, 0.85)[0])
            s, u, t = sorted(rng.uniform(0, 2, 3))
            lhs = abs(ef.phi(s, t, z) - ef.phi(u, t, z))
            rhs = 2 * abs(z) / (1 - abs(z)) ** 2 * (1 - math.exp(s - u))
            ef_ok.append(lhs <= rhs + 1e-8)
            ef_ok.append(ef.semigroup_residual(s, u, t, z) <= 1e-6)
    out.append(CheckResult("loewner", "evolution-family-bounds",
                           all(ef_ok), len(ef_ok)))

    uni_ok = []
    for _ in range(3):
        bp = BerksonPortaData.radial(_random_herglotz(rng))
        zs = _disk_samples(rng, 200, 0.9)
        vals = np.array([solve_radial_ode(bp, 0.0, 1.0, complex(z)) for z in zs])
        d = np.abs(vals[:, None] - vals[None, :])
        np.fill_diagonal(d, np.inf)
        uni_ok.append(bool(np.min(d) > 1e-10))
    out.append(CheckResult("loewner", "evolution-univalence",
                           all(uni_ok), len(uni_ok)))

    incl_ok = []
    chain = build_chain(ChainSpec("starlike", scaled_koebe(0.25)))
    for (s, t) in ((0.0, 0.5), (0.4, 1.2)):
        incl_ok.append(chain_inclusion_holds(chain, 0.8, s, t))
    out.append(CheckResult("loewner", "chain-inclusion", all(incl_ok), len(incl_ok)))
    return out


def qcext_battery(rng) -> list:
    out = []
    region = GridSpec(bands=((0.1, 0.95), (1.05, 2.0)), n_radii=16, n_angles=48)

    seam_ok, area_ok, quarter_ok = [], [], []
    # the half-plane map's chain has a boundary pole, so it joins the
    # area battery only; sewing batteries use boundary-regular bases
    area_specs = (ChainSpec("starlike", scaled_koebe(0.2)),
                  ChainSpec("convex", half_plane_map()),
                  ChainSpec("convex", quadratic_map(0.125)),
                  ChainSpec("noshiro-warschawski", quadratic_map(0.1)))
    for spec in area_specs:
        chain = build_chain(spec)
        areas = [image_area(chain, 0.9, t) for t in (0.0, 0.4, 0.9, 1.5)]
        area_ok.append(all(a2 >= a1 - 1e-9 for a1, a2 in zip(areas, areas[1:])))
    for spec in (ChainSpec("starlike", scaled_koebe(0.2)),
                 ChainSpec("convex", quadratic_map(0.125)),
                 ChainSpec("noshiro-warschawski", quadratic_map(0.1))):
        chain = build_chain(spec)
        ext = becker_extension(chain, None)
        rep = ext.verify(region)
        seam_ok.append(rep.seam_residual <= 1e-3)
        th = 2 * np.pi * np.arange(256) / 256
        for t in (0.0, 0.7):
            curve = np.asarray(chain.f(0.999 * np.exp(1j * th), t))
            radius = 0.95 * 0.999 * math.exp(t) / 4
            probes = radius * np.exp(1j * th[::16])
            quarter_ok.append(all(winding_number(curve, complex(p)) == 1
                                  for p in probes))
    out.append(CheckResult("qcext", "becker-seam-continuity",
                           all(seam_ok), len(seam_ok)))
    out.append(CheckResult("qcext", "monotone-image-area",
                           all(area_ok), len(area_ok)))
    out.append(CheckResult("qcext", "koebe-quarter-coverage",
                           all(quarter_ok), len(quarter_ok)))

    fkz_ok = []
    for k in (0.2, 0.35):
        f = scaled_koebe(k)
        alpha = strongly_starlike_order(f)
        k_claim = math.sin(math.pi * alpha / 2)
        res = extension_pipeline(ChainSpec("starlike", f), k_claim,
                                 region=region, tol_k=5e-3)
        fkz_ok.append(res.passed)
    out.append(CheckResult("qcext", "fkz-consistency", all(fkz_ok), len(fkz_ok)))

    ext_ok = []
    for k, n in ((0.1, 3), (0.1, 4)):
        f = root_scaled_koebe(k, n)
        cs = taylor_coefficients(f, n)
        ext_ok.append(abs(cs[n] - 2 * k / (n - 1)) < 1e-8)
        res = extension_pipeline(ChainSpec("starlike", f), k, region=region)
        ext_ok.append(res.passed)
    out.append(CheckResult("qcext", "extremal-pipeline", all(ext_ok), len(ext_ok)))
    return out


BATTERIES = (
    ("analytic", analytic_battery),
    ("beltrami", beltrami_battery),
    ("criteria", criteria_battery),
    ("loewner", loewner_battery),
    ("qcext", qcext_battery),
)


def thread_cap() -> int:
    raw = os.environ.get("LOEWNER_QCX_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_suite(seed: int = 20240715) -> tuple:
    """Run every battery with a shared seeded generator.

    Returns (results, elapsed_seconds). Batteries run independently;
    the LOEWNER_QCX_THREADS cap bounds any internal parallelism.
    """
    t0 = time.perf_counter()
    results: list = []
    cap = thread_cap()
    if cap > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=cap) as pool:
            futures = [pool.submit(fn, np.random.default_rng(seed + i))
                       for i, (_, fn) in enumerate(BATTERIES)]
            for fut in futures:
                results.extend(fut.result())
    else:
        for i, (_, fn) in enumerate(BATTERIES):
            results.extend(fn(np.random.default_rng(seed + i)))
    return results, time.perf_counter() - t0
