"""Invariant suites behind `probe verify`.

Each check runs a batch of randomized or gridded cases and reports the case
count and the worst residual.  A fault-injection hook lets the harness prove
it can actually fail: negating the spectrum prefactor must break the
ordering suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import moments
from .linalg import DensityMatrix, dag, density, partial_trace, sqrtm_psd, swap_operator, tensor
from .measures import (
    Spectrum,
    avsk,
    avsk_pure_relation,
    entanglement_witness,
    lqu_two_qubit,
    sigma_z_spectrum,
)
from .states import (
    RandomSeed,
    amplitude_damp_b,
    depolarize_b,
    family_pqc,
    family_product,
    family_sep,
    haar_unitary,
    isotropic,
    ket_density,
    pqc_state,
    pure_schmidt,
    random_density,
    random_local_density,
    random_pure,
    random_separable,
    werner,
)

SUITE_NAMES = ("linalg", "states", "measures", "moments")


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    count: int
    worst: float
    note: str = ""

    def line(self) -> str:
        status = "ok  " if self.passed else "FAIL"
        extra = f"  {self.note}" if self.note else ""
        return f"{status} {self.suite}.{self.name}  n={self.count}  worst={self.worst:.3e}{extra}"


def _result(suite: str, name: str, worst: float, tol: float, count: int, note: str = "") -> CheckResult:
    return CheckResult(suite, name, bool(worst <= tol), count, float(worst), note)


# ---------------------------------------------------------------------------
# linalg
# ---------------------------------------------------------------------------

def suite_linalg(seed: RandomSeed) -> list[CheckResult]:
    out = []
    dims = [(2, 2), (2, 3), (3, 2), (4, 2), (2, 4)]

    worst = 0.0
    n = 0
    for k in range(200):
        da, db = dims[k % len(dims)]
        rho = random_density(da, db, da * db, seed.child(k))
        root = rho.sqrt()
        worst = max(worst, float(np.max(np.abs(root @ root - rho.matrix))))
        n += 1
    out.append(_result("linalg", "sqrtm_squares_back", worst, 1e-9, n))

    worst = 0.0
    for k in range(200):
        da, db = dims[k % len(dims)]
        rho = random_density(da, db, da * db, seed.child(500 + k))
        ra = partial_trace(rho.matrix, da, db, keep="A")
        rb = partial_trace(rho.matrix, da, db, keep="B")
        worst = max(worst, abs(np.trace(ra).real - 1.0), abs(np.trace(rb).real - 1.0))
    out.append(_result("linalg", "partial_trace_composes", worst, 1e-12, 200))

    worst = 0.0
    rng = seed.child(1000).rng()
    for n_sub in (2, 3):
        s = swap_operator(n_sub)
        worst = max(worst, float(np.max(np.abs(s @ s - np.eye(n_sub * n_sub)))))
        for _ in range(50):
            th = rng.standard_normal((n_sub, n_sub)) + 1j * rng.standard_normal((n_sub, n_sub))
            om = rng.standard_normal((n_sub, n_sub)) + 1j * rng.standard_normal((n_sub, n_sub))
            worst = max(worst, float(np.max(np.abs(s @ tensor(th, om) @ s - tensor(om, th)))))
            worst = max(worst, abs(np.trace(tensor(th, om) @ s) - np.trace(th @ om)))
            worst = max(worst, float(np.max(np.abs(tensor(th, om) @ s - s @ tensor(om, th)))))
    s4 = swap_operator(4)
    s22 = tensor(swap_operator(2), swap_operator(2))
    perm = _interleave_abab(2, 2)
    worst = max(worst, float(np.max(np.abs(perm.T @ s4 @ perm - s22))))
    out.append(_result("linalg", "swap_properties", worst, 1e-10, 2 * 50 * 3 + 3))

    worst = 0.0
    for k in range(100):
        da, db = dims[k % len(dims)]
        rho = random_density(da, db, da * db, seed.child(2000 + k))
        w = np.linalg.eigvalsh(rho.matrix)
        worst = max(worst, abs(float(np.sum(w)) - 1.0))
    out.append(_result("linalg", "eigenvalues_sum_to_one", worst, 1e-10, 100))
    return out


def _interleave_abab(na: int, nb: int) -> np.ndarray:
    """Permutation matrix mapping (A B) (x) (A' B') ordering to (A A') (x) (B B')."""
    d = na * nb
    p = np.zeros((d * d, d * d))
    for a in range(na):
        for b in range(nb):
            for a2 in range(na):
                for b2 in range(nb):
                    src = (a * nb + b) * d + (a2 * nb + b2)
                    dst = (a * na + a2) * (nb * nb) + (b * nb + b2)
                    p[dst, src] = 1.0
    return p


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def suite_states(seed: RandomSeed) -> list[CheckResult]:
    out = []

    count = 0
    for k in range(1000):
        rng = seed.child(3000 + k).rng()
        p = float(rng.uniform())
        for maker in (isotropic, werner, family_product, family_pqc, family_sep, pure_schmidt):
            maker(p)
            count += 1
    out.append(CheckResult("states", "constructors_valid", True, count, 0.0))

    worst = 0.0
    phi = np.zeros(4, dtype=complex)
    phi[0] = phi[3] = 1 / np.sqrt(2)
    for f in np.arange(0.0, 1.0 + 1e-12, 0.01):
        rho = isotropic(float(f))
        fid = float((phi.conj() @ rho.matrix @ phi).real)
        worst = max(worst, abs(fid - float(f)))
    out.append(_result("states", "isotropic_fidelity", worst, 1e-12, 101))

    worst = 0.0
    for k in range(100):
        u = haar_unitary(2, seed.child(4000 + k))
        rho_w = werner(0.3).matrix
        rho_i = isotropic(0.7).matrix
        uu = tensor(u, u)
        uustar = tensor(u, u.conj())
        worst = max(worst, float(np.max(np.abs(uu @ rho_w @ dag(uu) - rho_w))))
        worst = max(worst, float(np.max(np.abs(uustar @ rho_i @ dag(uustar) - rho_i))))
    out.append(_result("states", "twirl_symmetry", worst, 1e-9, 200))

    a = random_density(2, 3, 6, RandomSeed(777, 5)).matrix
    b = random_density(2, 3, 6, RandomSeed(777, 5)).matrix
    identical = bool(np.array_equal(a, b))
    out.append(CheckResult("states", "seed_determinism", identical, 2, 0.0 if identical else 1.0))

    worst = 0.0
    for k, n in enumerate((2, 3, 5)):
        u = haar_unitary(n, seed.child(4200 + k))
        worst = max(worst, float(np.max(np.abs(dag(u) @ u - np.eye(n)))))
    out.append(_result("states", "haar_unitarity", worst, 1e-10, 3))
    return out


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

def suite_measures(seed: RandomSeed, prefactor_sign: float = 1.0) -> list[CheckResult]:
    out = []
    sz = sigma_z_spectrum()

    worst = -np.inf
    n = 10_000
    for k in range(n):
        rho = random_density(2, 2, 4, seed.child(10_000 + k))
        root = rho.sqrt()
        a = prefactor_sign * avsk(rho, sz, sqrt_rho=root)
        l = lqu_two_qubit(rho, sqrt_rho=root)
        worst = max(worst, l - a)
    out.append(_result("measures", "ordering_avsk_ge_lqu", worst, 1e-9, n))

    worst = 0.0
    for k in range(100):
        rho = random_density(2, 2, 4, seed.child(20_000 + k))
        w = haar_unitary(2, seed.child(21_000 + k))
        v = haar_unitary(2, seed.child(22_000 + k))
        wv = tensor(w, v)
        rotated = density(wv @ rho.matrix @ dag(wv), 2, 2)
        worst = max(worst, abs(avsk(rotated, sz) - avsk(rho, sz)))
    out.append(_result("measures", "local_unitary_invariance", worst, 1e-9, 100))

    worst = 0.0
    rho = random_density(2, 2, 4, seed.child(23_000))
    base = avsk(rho, sz)
    for eta in (-3.0, 0.7, 10.0):
        shifted = Spectrum(tuple(v + eta for v in sz.values))
        worst = max(worst, abs(avsk(rho, shifted) - base))
    out.append(_result("measures", "shift_invariance", worst, 1e-12, 3))

    worst = 0.0
    for eta in (-2.0, 0.5, 3.0):
        scaled = Spectrum(tuple(eta * v for v in sz.values))
        worst = max(worst, abs(avsk(rho, scaled) - eta * eta * base))
    out.append(_result("measures", "quadratic_scaling", worst, 1e-12, 3))

    worst = -np.inf
    for k in range(1000):
        rng = seed.child(24_000 + k).rng()
        r1 = random_density(2, 2, 4, rng)
        r2 = random_density(2, 2, 4, rng)
        p = float(rng.uniform())
        mix = density(p * r1.matrix + (1 - p) * r2.matrix, 2, 2)
        worst = max(worst, avsk(mix, sz) - p * avsk(r1, sz) - (1 - p) * avsk(r2, sz))
    out.append(_result("measures", "convexity", worst, 1e-9, 1000))

    worst = -np.inf
    for k in range(200):
        rng = seed.child(25_000 + k).rng()
        rho = random_density(2, 2, 4, rng)
        before = avsk(rho, sz)
        lam = float(rng.uniform())
        worst = max(worst, avsk(depolarize_b(rho, lam), sz) - before)
        worst = max(worst, avsk(amplitude_damp_b(rho, lam), sz) - before)
    out.append(_result("measures", "cptp_on_b_monotone", worst, 1e-9, 400))

    worst = 0.0
    n_zero = 0
    for k in range(1000):
        rng = seed.child(26_000 + k).rng()
        if k % 10 == 0:
            rho = density(tensor(np.eye(2) / 2, random_local_density(2, rng)), 2, 2)
        else:
            rho = random_density(2, 2, 4, rng)
        a = avsk(rho, sz)
        recon = tensor(np.eye(2) / 2, rho.marginal_b())
        dist = float(np.max(np.abs(recon - rho.matrix)))
        if a < 1e-9:
            n_zero += 1
            worst = max(worst, dist if dist > 1e-8 else 0.0)
        elif dist <= 1e-10:
            worst = max(worst, 1.0)
    out.append(_result("measures", "zero_law", worst, 1e-8, 1000, note=f"zero cases={n_zero}"))

    worst = -np.inf
    cap = sz.prefactor * (2 - 1)
    witness_fired = 0
    for k in range(1000):
        rng = seed.child(27_000 + k).rng()
        terms = int(rng.integers(1, 6))
        rho = random_separable(2, 2, terms, rng)
        worst = max(worst, avsk(rho, sz) - cap)
        if entanglement_witness(rho, sz):
            witness_fired += 1
    ok = worst <= 1e-9 and witness_fired == 0
    out.append(CheckResult("measures", "separable_cap_and_witness", ok, 1000, float(worst),
                           note=f"witness false positives={witness_fired}"))

    worst = 0.0
    for k in range(200):
        rng = seed.child(28_000 + k).rng()
        probs = rng.dirichlet(np.ones(2))
        vecs = [rng.standard_normal(2) + 1j * rng.standard_normal(2) for _ in range(2)]
        rho = pqc_state(probs, vecs)
        worst = max(worst, abs(avsk(rho, sz) - cap))
    out.append(_result("measures", "pqc_saturates_cap", worst, 1e-9, 200))

    worst = 0.0
    for k in range(1000):
        rng = seed.child(29_000 + k).rng()
        da = int(rng.integers(2, 5))
        db = int(rng.integers(2, 5))
        psi = random_pure(da, db, rng)
        spec = Spectrum(tuple(np.sort(rng.standard_normal(da))))
        rho = density(ket_density(psi), da, db)
        worst = max(worst, abs(avsk(rho, spec) - avsk_pure_relation(psi, spec, dim_b=db)))
    out.append(_result("measures", "pure_state_relation", worst, 1e-9, 1000))
    return out


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def suite_moments(seed: RandomSeed, mc_moment_samples: int = 1_000_000) -> list[CheckResult]:
    out = []
    sz = sigma_z_spectrum()

    worst = 0.0
    rng = seed.child(30_000).rng()
    theta = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    tw = moments.twirl2(theta, 2)
    for k in range(100):
        u = haar_unitary(2, seed.child(30_100 + k))
        uu = tensor(u, u)
        worst = max(worst, float(np.max(np.abs(uu @ tw @ dag(uu) - tw))))
    out.append(_result("moments", "twirl_output_invariant", worst, 1e-9, 100))

    i_row, j_row = (1, 1, 2, 2), (1, 2, 1, 2)
    k_row, l_row = (1, 2, 1, 2), (1, 1, 2, 2)
    exact = float(moments.haar_moment4(i_row, j_row, k_row, l_row, 4))
    mc, se = moments.haar_moment4_monte_carlo(i_row, j_row, k_row, l_row, 4, mc_moment_samples, seed.child(31_000))
    dev = abs(mc.real - exact) / max(se, 1e-16)
    out.append(CheckResult("moments", "weingarten_moment_mc", dev <= 5.0, mc_moment_samples, dev,
                           note=f"exact={exact:.6e} mc={mc.real:.6e} se={se:.1e}"))

    try:
        moments._finite_coefficients_at.cache_clear()
        moments._finite_coefficients_at(2)
        moments._finite_coefficients_at(3)
        out.append(CheckResult("moments", "pole_cancellation_exact", True, 2, 0.0))
    except AssertionError as exc:
        out.append(CheckResult("moments", "pole_cancellation_exact", False, 2, 1.0, note=str(exc)))

    worst_var = -np.inf
    worst_lo, worst_hi = -np.inf, -np.inf
    n = 10_000
    for k in range(n):
        rho = random_density(2, 2, 4, seed.child(32_000 + k))
        root = rho.sqrt()
        a = avsk(rho, sz, sqrt_rho=root)
        l = lqu_two_qubit(rho, sqrt_rho=root)
        sm = moments.second_moment(rho, sz, sqrt_rho=root)
        worst_var = max(worst_var, a * a - sm)
        lo, hi = moments.lqu_bounds(a, max(sm - a * a, 0.0))
        worst_lo = max(worst_lo, lo - l)
        worst_hi = max(worst_hi, l - hi)
    out.append(_result("moments", "second_moment_ge_avsk_sq", worst_var, 1e-9, n))
    out.append(_result("moments", "lqu_lower_bound", worst_lo, 1e-6, n))
    out.append(_result("moments", "lqu_upper_bound", worst_hi, 1e-6, n))

    worst_pure = 0.0
    worst_sep = 0.0
    worst_pqc = 0.0
    printed_pqc_residual = 0.0
    grid = np.linspace(0.0, 1.0, 41)
    for p in grid:
        st = pure_schmidt(float(p))
        root = st.sqrt()
        a, l = avsk(st, sz, root), lqu_two_qubit(st, root)
        worst_pure = max(worst_pure, abs(np.sqrt(moments.variance(st, sz, root)) - (a - l) / np.sqrt(5.0)))
        st = family_product(float(p))
        root = st.sqrt()
        a, l = avsk(st, sz, root), lqu_two_qubit(st, root)
        worst_pure = max(worst_pure, abs(np.sqrt(moments.variance(st, sz, root)) - (a - l) / np.sqrt(5.0)))
        st = family_sep(float(p))
        root = st.sqrt()
        a, l = avsk(st, sz, root), lqu_two_qubit(st, root)
        worst_sep = max(worst_sep, abs(np.sqrt(moments.variance(st, sz, root)) - 2.0 * (a - l) / np.sqrt(5.0)))
        st = family_pqc(float(p))
        root = st.sqrt()
        a, l = avsk(st, sz, root), lqu_two_qubit(st, root)
        worst_pqc = max(worst_pqc, abs(a - 2.0 / 3.0))
        printed = np.sqrt(1.0 + 3.0 * ((a - l) - 1.0 / 3.0) ** 2) / (3.0 * np.sqrt(5.0))
        printed_pqc_residual = max(printed_pqc_residual, abs(np.sqrt(moments.variance(st, sz, root)) - printed))
    out.append(_result("moments", "boundary_pure_product_relation", worst_pure, 1e-8, 2 * len(grid)))
    out.append(_result("moments", "boundary_sep_relation", worst_sep, 1e-8, len(grid)))
    out.append(_result("moments", "boundary_pqc_constant_avsk", worst_pqc, 1e-9, len(grid),
                       note=f"printed pQC relation residual={printed_pqc_residual:.3e} (logged, not gated)"))

    worst = 0.0
    for k in range(3):
        rho = random_density(2, 2, 4, seed.child(33_000 + k))
        mean, var, se_m, se_v = moments.variance_monte_carlo(rho, sz, 100_000, seed.child(33_100 + k))
        closed = moments.variance(rho, sz)
        worst = max(worst, abs(closed - var) / max(se_v, 1e-16))
    out.append(CheckResult("moments", "variance_mc_agreement", worst <= 4.0, 3, worst, note="units of stderr"))
    return out


def run_suites(
    which: str = "all",
    seed: int = 12345,
    inject_fault: Optional[str] = None,
    mc_moment_samples: int = 1_000_000,
) -> list[CheckResult]:
    """Run the requested invariant suites and return their results."""
    base = RandomSeed(seed)
    results: list[CheckResult] = []
    prefactor_sign = -1.0 if inject_fault == "negate-prefactor" else 1.0
    chosen = SUITE_NAMES if which == "all" else (which,)
    for name in chosen:
        if name == "linalg":
            results.extend(suite_linalg(base))
        elif name == "states":
            results.extend(suite_states(base))
        elif name == "measures":
            results.extend(suite_measures(base, prefactor_sign=prefactor_sign))
        elif name == "moments":
            results.extend(suite_moments(base, mc_moment_samples=mc_moment_samples))
        else:
            raise ValueError(f"unknown suite {name!r}")
    return results
