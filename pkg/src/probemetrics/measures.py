"""Scalar functionals on bipartite states.

Core quantities:

* skew_information  I(rho, H) = -Tr[[sqrt(rho), H]^2] / 2
* avsk              Haar average of I(rho, U L U^dag (x) I_B) over local
                    unitaries U, in closed form
* lqu_two_qubit     minimum of the same skew information over isospectral
                    local observables, via the 3x3 correlation-matrix formula
* lqu_minimize      multi-start numerical minimization for any N_A

plus the derived quantities built from them: entanglement witness, pure-state
concurrence relation, the correlation measure avsk_corr and phase-estimation
precision bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidParameter,
    NonHermitianInput,
    NotNormalized,
    ZeroSusceptibility,
)
from .linalg import (
    DensityMatrix,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    dag,
    embed_a,
    hermitian_eig,
    partial_trace,
    require_hermitian,
    sqrtm_psd,
)
from .states import RandomSeed, haar_unitaries

NEGATIVE_CLAMP = 1e-9


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue multiset of the local observable class on subsystem A."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 2:
            raise InvalidParameter("a spectrum needs at least two eigenvalues")
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def traceless(self) -> np.ndarray:
        v = np.array(self.values)
        return v - v.mean()

    @property
    def prefactor(self) -> float:
        """(N Tr[L^2] - Tr[L]^2) / (N (N^2 - 1)); shift- and basis-invariant."""
        v = np.array(self.values)
        n = len(v)
        return float((n * np.sum(v * v) - np.sum(v) ** 2) / (n * (n * n - 1)))

    def is_degenerate(self, tol: float = 1e-12) -> bool:
        v = np.sort(np.array(self.values))
        return bool(np.any(np.diff(v) < tol))

    def matrix(self) -> np.ndarray:
        return np.diag(np.array(self.values, dtype=complex))


def sigma_z_spectrum() -> Spectrum:
    return Spectrum((1.0, -1.0))


def optimal_spectrum(n_a: int) -> Spectrum:
    """The traceless spectrum with N-1 degenerate eigenvalues,
    {(N-1)/N, -1/N, ..., -1/N}; maximal prefactor among unit-purity-normalized
    spectra."""
    if n_a < 2:
        raise InvalidParameter("optimal_spectrum needs n_a >= 2")
    return Spectrum(((n_a - 1) / n_a,) + (-1.0 / n_a,) * (n_a - 1))


def harmonic_spectrum(n_a: int) -> Spectrum:
    """Equally spaced, fully non-degenerate spectrum {0, 1, ..., N-1}."""
    if n_a < 2:
        raise InvalidParameter("harmonic_spectrum needs n_a >= 2")
    return Spectrum(tuple(float(k) for k in range(n_a)))


def normalized_to_density(spec: Spectrum) -> Spectrum:
    """Shift to a nonnegative spectrum and rescale to unit trace.

    This is the fair-comparison normalization for ranking spectra by their
    prefactor: each spectrum is mapped onto the eigenvalues of a density
    matrix.  An all-equal spectrum maps to the maximally mixed one.
    """
    v = np.array(spec.values) - min(spec.values)
    total = v.sum()
    if total < 1e-300:
        v = np.ones_like(v)
        total = v.sum()
    return Spectrum(tuple(v / total))


# ---------------------------------------------------------------------------
# Skew information and its Haar average
# ---------------------------------------------------------------------------

def _full_observable(rho: DensityMatrix, h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.shape == (rho.dim_a, rho.dim_a):
        h = embed_a(h, rho.dim_b)
    if h.shape != (rho.dim, rho.dim):
        raise DimensionMismatch(
            f"observable shape {h.shape} fits neither subsystem A ({rho.dim_a}) nor the full space ({rho.dim})"
        )
    require_hermitian(h, what="observable")
    return h


def skew_information(rho: DensityMatrix, h: np.ndarray, sqrt_rho: Optional[np.ndarray] = None) -> float:
    """Wigner-Yanase skew information I(rho, H) = Tr[rho H^2] - Tr[sqrt(rho) H sqrt(rho) H].

    h may be an observable on subsystem A (embedded as H (x) I_B) or on the
    full space.  The result is clamped to >= 0; round-off below
    -NEGATIVE_CLAMP raises.
    """
    h = _full_observable(rho, h)
    root = rho.sqrt() if sqrt_rho is None else sqrt_rho
    term1 = np.trace(rho.matrix @ h @ h).real
    x = root @ h
    term2 = np.einsum("ij,ji->", x @ root, h).real
    value = float(term1 - term2)
    if value < -NEGATIVE_CLAMP:
        raise NonHermitianInput(f"skew information evaluated to {value:.3e}; inputs are inconsistent")
    return max(value, 0.0)


def state_trace_term(rho: DensityMatrix, sqrt_rho: Optional[np.ndarray] = None) -> float:
    """Tr_B[(Tr_A sqrt(rho))^2], the state-dependent bracket entry."""
    root = rho.sqrt() if sqrt_rho is None else sqrt_rho
    q = partial_trace(root, rho.dim_a, rho.dim_b, keep="B")
    return float(np.trace(q @ q).real)


def q_a(rho: DensityMatrix, sqrt_rho: Optional[np.ndarray] = None) -> float:
    """Spectrum-independent part of the average: N_A - Tr_B[(Tr_A sqrt(rho))^2]."""
    return rho.dim_a - state_trace_term(rho, sqrt_rho)


def avsk(rho: DensityMatrix, spec: Spectrum, sqrt_rho: Optional[np.ndarray] = None) -> float:
    """Closed-form Haar average of the skew information over isospectral
    local observables on A."""
    if spec.dim != rho.dim_a:
        raise DimensionMismatch(f"spectrum length {spec.dim} != N_A {rho.dim_a}")
    value = spec.prefactor * q_a(rho, sqrt_rho)
    return max(value, 0.0)


def avsk_monte_carlo(rho: DensityMatrix, spec: Spectrum, samples: int, seed) -> tuple[float, float]:
    """Sample mean and standard error of I(rho, U L U^dag (x) I) over Haar U."""
    if samples < 2:
        raise InvalidParameter("need at least 2 samples")
    values = skew_samples(rho, spec, samples, seed)
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(samples))


def skew_samples(rho: DensityMatrix, spec: Spectrum, samples: int, seed) -> np.ndarray:
    """Vectorized draw of the Haar-averaged integrand I(rho, U L U^dag (x) I)."""
    if spec.dim != rho.dim_a:
        raise DimensionMismatch(f"spectrum length {spec.dim} != N_A {rho.dim_a}")
    us = haar_unitaries(rho.dim_a, samples, seed)
    lam = np.array(spec.values)
    hs = np.einsum("bij,j,bkj->bik", us, lam, us.conj())
    root = rho.sqrt()
    rho_a = rho.marginal_a()
    # Tr[rho (H^2 (x) I)] = Tr_A[rho_A H^2]
    term1 = np.einsum("bij,bjk,ki->b", hs, hs, rho_a).real
    eye_b = np.eye(rho.dim_b, dtype=complex)
    hfull = np.einsum("bij,kl->bikjl", hs, eye_b).reshape(samples, rho.dim, rho.dim)
    x = root @ hfull
    term2 = np.einsum("bij,bji->b", x, x).real
    return np.clip(term1 - term2, 0.0, None)


# ---------------------------------------------------------------------------
# Local quantum uncertainty
# ---------------------------------------------------------------------------

def lqu_two_qubit(rho: DensityMatrix, sqrt_rho: Optional[np.ndarray] = None) -> float:
    """Two-qubit LQU for the sigma_z spectrum class: 1 - lambda_max(W) with
    W_ij = Tr[sqrt(rho) (s_i (x) I) sqrt(rho) (s_j (x) I)]."""
    if rho.dim_a != 2 or rho.dim_b != 2:
        raise DimensionMismatch("lqu_two_qubit requires a 2x2 bipartition")
    root = rho.sqrt() if sqrt_rho is None else sqrt_rho
    paulis = [embed_a(p, 2) for p in (PAULI_X, PAULI_Y, PAULI_Z)]
    xs = [root @ p for p in paulis]
    w = np.empty((3, 3))
    for i in range(3):
        for j in range(i, 3):
            w[i, j] = w[j, i] = np.einsum("ij,ji->", xs[i] @ root, paulis[j]).real
    lam_max = np.linalg.eigvalsh(w)[-1]
    return max(1.0 - float(lam_max), 0.0)


def _unitary_from_angles(theta: np.ndarray, n: int) -> np.ndarray:
    """Explicit angle chart of U(n): exponential of a Hermitian generator with
    n^2 real parameters."""
    h = np.zeros((n, n), dtype=complex)
    idx = 0
    for i in range(n):
        h[i, i] = theta[idx]
        idx += 1
    for i in range(n):
        for j in range(i + 1, n):
            h[i, j] = theta[idx] + 1j * theta[idx + 1]
            h[j, i] = theta[idx] - 1j * theta[idx + 1]
            idx += 2
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ dag(v)


def lqu_minimize(rho: DensityMatrix, spec: Spectrum, restarts: int = 32, seed=0) -> float:
    """Numerical LQU: multi-start gradient-free descent of I(rho, U L U^dag (x) I)
    over the angle chart of U(N_A).

    Upper-bounds the true minimum; for N_A = 2 it reproduces lqu_two_qubit.
    """
    if spec.is_degenerate():
        raise DegenerateSpectrum("lqu_minimize requires a non-degenerate spectrum")
    if restarts < 1:
        raise InvalidParameter("restarts must be >= 1")
    if spec.dim != rho.dim_a:
        raise DimensionMismatch(f"spectrum length {spec.dim} != N_A {rho.dim_a}")
    n = rho.dim_a
    root = rho.sqrt()
    lam = np.array(spec.values)
    rng = RandomSeed(int(seed)).rng() if not isinstance(seed, np.random.Generator) else seed

    # I(rho, H (x) I) is quadratic in H; precompute the cross-term kernel
    # T2[b,c,d,a] = sum_{alpha,beta} R[a,alpha,b,beta] R[c,beta,d,alpha]
    # so each evaluation is a small contraction instead of full matmuls.
    rt = root.reshape(n, rho.dim_b, n, rho.dim_b)
    t2 = np.einsum("axby,cydx->bcda", rt, rt)
    rho_a = rho.marginal_a()

    def objective(theta: np.ndarray) -> float:
        u = _unitary_from_angles(theta, n)
        h = (u * lam) @ dag(u)
        term1 = np.einsum("ab,bc,ca->", rho_a, h, h).real
        term2 = np.einsum("bc,da,bcda->", h, h, t2).real
        return float(term1 - term2)

    best = np.inf
    for k in range(restarts):
        theta0 = np.zeros(n * n) if k == 0 else rng.uniform(-np.pi, np.pi, n * n)
        res = minimize(objective, theta0, method="Powell", options={"xtol": 1e-10, "ftol": 1e-12, "maxiter": 4000})
        best = min(best, float(res.fun))
    return max(best, 0.0)


# ---------------------------------------------------------------------------
# Pure-state quantities
# ---------------------------------------------------------------------------

def _check_normalized(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise NotNormalized(f"state vector norm {norm} differs from 1")
    return psi


def concurrence_pure(psi: np.ndarray, dim_a: int, dim_b: int) -> float:
    """Generalized concurrence C = sqrt(2 - 2 Tr[rho_B^2]) of a pure state."""
    psi = _check_normalized(psi)
    if psi.shape != (dim_a * dim_b,):
        raise DimensionMismatch(f"vector length {psi.shape} incompatible with dims {dim_a}x{dim_b}")
    amp = psi.reshape(dim_a, dim_b)
    rho_b = np.einsum("ab,ad->bd", amp, amp.conj())
    purity = float(np.trace(rho_b @ rho_b).real)
    return float(np.sqrt(max(2.0 - 2.0 * purity, 0.0)))


def avsk_pure_relation(psi: np.ndarray, spec: Spectrum, dim_b: Optional[int] = None) -> float:
    """Closed form for pure states: prefactor * (N_A - 1 + C^2 / 2)."""
    psi = _check_normalized(psi)
    dim_a = spec.dim
    if dim_b is None:
        if len(psi) % dim_a:
            raise DimensionMismatch("cannot infer dim_b from vector length")
        dim_b = len(psi) // dim_a
    c = concurrence_pure(psi, dim_a, dim_b)
    return spec.prefactor * (dim_a - 1 + 0.5 * c * c)


# ---------------------------------------------------------------------------
# Correlations, witness, precision
# ---------------------------------------------------------------------------

def entanglement_witness(rho: DensityMatrix, spec: Spectrum, sqrt_rho: Optional[np.ndarray] = None) -> bool:
    """True when the average exceeds the separable cap prefactor*(N_A - 1),
    which certifies entanglement (one-directional)."""
    return avsk(rho, spec, sqrt_rho) > spec.prefactor * (rho.dim_a - 1) + NEGATIVE_CLAMP


def avsk_corr(rho: DensityMatrix, spec: Spectrum, sqrt_rho: Optional[np.ndarray] = None) -> float:
    """Total-correlation measure avsk(rho) - avsk(rho_A (x) rho_B)
    = prefactor * [ (Tr sqrt(rho_A))^2 - Tr_B[(Tr_A sqrt(rho))^2] ]."""
    root_a = sqrtm_psd(rho.marginal_a())
    local = float(np.trace(root_a).real) ** 2
    value = spec.prefactor * (local - state_trace_term(rho, sqrt_rho))
    if value < -NEGATIVE_CLAMP:
        raise NonHermitianInput(f"avsk_corr evaluated to {value:.3e}; inputs are inconsistent")
    return max(value, 0.0)


def precision_bounds(rho: DensityMatrix, h: np.ndarray) -> tuple[float, float]:
    """Bounds on the asymptotic phase-estimation error n*Var(phi):
    1/(8 I) <= n Var <= 1/(4 I)."""
    info = skew_information(rho, h)
    if info <= 1e-12:
        raise ZeroSusceptibility("skew information vanishes; the probe cannot sense this generator")
    return 1.0 / (8.0 * info), 1.0 / (4.0 * info)


# ---------------------------------------------------------------------------
# Per-state report
# ---------------------------------------------------------------------------

@dataclass
class MeasureReport:
    avsk: float
    lqu: float
    purity_a: float
    purity_b: float
    witness_entangled: bool
    variance: Optional[float] = None
    concurrence: Optional[float] = None
    family_tag: Optional[str] = None

    def validate(self, prefactor: float, n_a: int) -> None:
        if self.avsk < self.lqu - NEGATIVE_CLAMP:
            raise InvalidParameter(f"report violates avsk >= lqu: {self.avsk} < {self.lqu}")
        if self.witness_entangled and not self.avsk > prefactor * (n_a - 1):
            raise InvalidParameter("witness flag inconsistent with the separable cap")

    def as_dict(self) -> dict:
        out = {
            "avsk": self.avsk,
            "lqu": self.lqu,
            "purityA": self.purity_a,
            "purityB": self.purity_b,
            "witnessEntangled": self.witness_entangled,
        }
        if self.variance is not None:
            out["variance"] = self.variance
        if self.concurrence is not None:
            out["concurrence"] = self.concurrence
        if self.family_tag is not None:
            out["familyTag"] = self.family_tag
        return out


def measure_state(
    rho: DensityMatrix,
    spec: Spectrum,
    with_variance: bool = False,
    family_tag: Optional[str] = None,
    lqu_seed=12345,
) -> MeasureReport:
    """Bundle avsk, lqu, purities, witness (and optionally the variance) for
    one state.

    Two-qubit states use the closed-form LQU; other shapes fall back to the
    numerical minimization.
    """
    root = rho.sqrt()
    average = avsk(rho, spec, sqrt_rho=root)
    if rho.dim_a == 2 and rho.dim_b == 2:
        scale = ((max(spec.values) - min(spec.values)) / 2.0) ** 2
        minimum = scale * lqu_two_qubit(rho, sqrt_rho=root)
    else:
        minimum = lqu_minimize(rho, spec, seed=lqu_seed)
    variance = None
    if with_variance:
        from .moments import variance as variance_fn

        variance = variance_fn(rho, spec, sqrt_rho=root)
    conc = None
    w, v = hermitian_eig(rho.matrix)
    if w[-1] > 1.0 - 1e-10:
        conc = concurrence_pure(v[:, -1], rho.dim_a, rho.dim_b)
    report = MeasureReport(
        avsk=average,
        lqu=minimum,
        purity_a=rho.purity_a(),
        purity_b=rho.purity_b(),
        witness_entangled=entanglement_witness(rho, spec, sqrt_rho=root),
        variance=variance,
        concurrence=conc,
        family_tag=family_tag,
    )
    report.validate(spec.prefactor, rho.dim_a)
    return report
