import numpy as np
import pytest

from probemetrics import (
    DegenerateSpectrum,
    NotNormalized,
    RandomSeed,
    Spectrum,
    ZeroSusceptibility,
    avsk,
    avsk_corr,
    avsk_monte_carlo,
    avsk_pure_relation,
    bell_state,
    cc_state,
    concurrence_pure,
    cq_state,
    density,
    entanglement_witness,
    harmonic_spectrum,
    isotropic,
    lqu_minimize,
    lqu_two_qubit,
    measure_state,
    optimal_spectrum,
    precision_bounds,
    product_state,
    pure_schmidt,
    q_a,
    random_density,
    sigma_z_spectrum,
    skew_information,
    sqrtm_psd,
    tensor,
    werner,
)
from probemetrics.linalg import PAULI_Z, dag, embed_a
from probemetrics.measures import normalized_to_density
from probemetrics.states import KET_0, KET_PLUS, haar_unitary, ket_density, random_local_density

SEED = RandomSeed(3003)
SZ = sigma_z_spectrum()
BELL = bell_state()


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def test_prefactor_sigma_z():
    assert abs(SZ.prefactor - 2.0 / 3.0) < 1e-15


def test_prefactor_nonnegative_zero_iff_flat():
    assert Spectrum((1.0, 1.0, 1.0)).prefactor == 0.0
    rng = SEED.child(0).rng()
    for _ in range(50):
        vals = rng.standard_normal(4)
        spec = Spectrum(tuple(vals))
        assert spec.prefactor >= 0.0
        if np.ptp(vals) > 1e-9:
            assert spec.prefactor > 0.0


def test_prefactor_shift_and_scale():
    rng = SEED.child(1).rng()
    vals = rng.standard_normal(3)
    base = Spectrum(tuple(vals)).prefactor
    for eta in (-3.0, 0.7, 10.0):
        assert abs(Spectrum(tuple(vals + eta)).prefactor - base) < 1e-12
        assert abs(Spectrum(tuple(eta * vals)).prefactor - eta * eta * base) < 1e-12


def test_optimal_spectrum_values():
    assert np.allclose(optimal_spectrum(2).values, [0.5, -0.5])
    assert np.allclose(optimal_spectrum(3).values, [2 / 3, -1 / 3, -1 / 3])


def test_optimal_spectrum_maximizes_normalized_prefactor():
    rng = SEED.child(2).rng()
    for n in range(2, 7):
        best = normalized_to_density(optimal_spectrum(n)).prefactor
        assert best >= normalized_to_density(harmonic_spectrum(n)).prefactor - 1e-12
        for _ in range(20):
            spec = Spectrum(tuple(rng.standard_normal(n)))
            assert best >= normalized_to_density(spec).prefactor - 1e-12


# ---------------------------------------------------------------------------
# skew information
# ---------------------------------------------------------------------------

def test_skew_identity_observable_is_zero():
    rho = random_density(2, 2, 4, SEED.child(3))
    assert skew_information(rho, np.eye(2)) < 1e-12
    assert skew_information(rho, np.eye(4)) < 1e-12


def test_skew_pure_state_is_variance():
    plus = density(tensor(ket_density(KET_PLUS), ket_density(KET_0)), 2, 2)
    assert abs(skew_information(plus, PAULI_Z) - 1.0) < 1e-12


def test_skew_matches_commutator_form():
    for k in range(20):
        rho = random_density(2, 2, 4, SEED.child(10 + k))
        u = haar_unitary(2, SEED.child(100 + k))
        h = embed_a(u @ PAULI_Z @ dag(u), 2)
        root = sqrtm_psd(rho.matrix)
        comm = root @ h - h @ root
        oracle = -0.5 * np.trace(comm @ comm).real
        assert abs(skew_information(rho, h) - oracle) < 1e-10


# ---------------------------------------------------------------------------
# avsk
# ---------------------------------------------------------------------------

def test_avsk_anchors():
    assert abs(avsk(BELL, SZ) - 1.0) < 1e-12
    assert abs(avsk(product_state(), SZ) - 2.0 / 3.0) < 1e-12
    rng = SEED.child(4).rng()
    free = density(tensor(np.eye(2) / 2, random_local_density(2, rng)), 2, 2)
    assert avsk(free, SZ) < 1e-12


def test_avsk_monte_carlo_bell_constant():
    mean, stderr = avsk_monte_carlo(BELL, SZ, 10_000, SEED.child(5))
    assert abs(mean - 1.0) < 1e-10
    assert stderr < 1e-12


def test_avsk_monte_carlo_free_state():
    rng = SEED.child(6).rng()
    free = density(tensor(np.eye(2) / 2, random_local_density(2, rng)), 2, 2)
    mean, _ = avsk_monte_carlo(free, SZ, 5_000, SEED.child(7))
    assert mean < 1e-10


def test_avsk_matches_monte_carlo():
    for k in range(5):
        rho = random_density(2, 2, 4, SEED.child(20 + k))
        mean, stderr = avsk_monte_carlo(rho, SZ, 20_000, SEED.child(200 + k))
        assert abs(mean - avsk(rho, SZ)) <= 4 * stderr


# ---------------------------------------------------------------------------
# lqu
# ---------------------------------------------------------------------------

def test_lqu_cq_state_vanishes():
    rng = SEED.child(8).rng()
    cq = cq_state([0.3, 0.7], [random_local_density(2, rng), random_local_density(2, rng)])
    assert lqu_two_qubit(cq) < 1e-9


def test_lqu_anchors():
    from probemetrics import max_discordant

    assert abs(lqu_two_qubit(max_discordant()) - 0.5) < 1e-12
    assert abs(lqu_two_qubit(BELL) - 1.0) < 1e-12


def test_lqu_minimize_matches_closed_form():
    for k in range(5):
        rho = random_density(2, 2, 4, SEED.child(30 + k))
        assert abs(lqu_minimize(rho, SZ, restarts=16, seed=k) - lqu_two_qubit(rho)) < 1e-6


def test_lqu_minimize_free_state_zero():
    rng = SEED.child(9).rng()
    free = density(tensor(np.eye(2) / 2, random_local_density(2, rng)), 2, 2)
    assert lqu_minimize(free, SZ, restarts=4, seed=1) < 1e-9


def test_lqu_minimize_saturates_on_symmetric_states():
    for rho in (werner(0.2), isotropic(0.75)):
        assert abs(lqu_minimize(rho, SZ, restarts=8, seed=2) - avsk(rho, SZ)) < 1e-6


def test_lqu_minimize_rejects_degenerate():
    with pytest.raises(DegenerateSpectrum):
        lqu_minimize(random_density(3, 2, 6, SEED.child(11)), optimal_spectrum(3))


# ---------------------------------------------------------------------------
# pure-state quantities
# ---------------------------------------------------------------------------

def test_concurrence_examples():
    bell_vec = np.zeros(4)
    bell_vec[0] = bell_vec[3] = 1 / np.sqrt(2)
    assert abs(concurrence_pure(bell_vec, 2, 2) - 1.0) < 1e-12
    prod = np.zeros(4)
    prod[0] = 1.0
    assert concurrence_pure(prod, 2, 2) < 1e-12
    psi = np.zeros(4)
    psi[0], psi[3] = np.sqrt(0.9), np.sqrt(0.1)
    assert abs(concurrence_pure(psi, 2, 2) - 0.6) < 1e-12
    with pytest.raises(NotNormalized):
        concurrence_pure(np.array([1.0, 1.0, 0, 0]), 2, 2)


def test_avsk_pure_relation():
    bell_vec = np.zeros(4)
    bell_vec[0] = bell_vec[3] = 1 / np.sqrt(2)
    assert abs(avsk_pure_relation(bell_vec, SZ) - 1.0) < 1e-12
    prod = np.zeros(4)
    prod[0] = 1.0
    assert abs(avsk_pure_relation(prod, SZ) - 2 / 3) < 1e-12
    psi = np.zeros(4)
    psi[0], psi[3] = np.sqrt(0.9), np.sqrt(0.1)
    assert abs(avsk_pure_relation(psi, SZ) - (2 / 3) * 1.18) < 1e-12


def test_pure_relation_matches_avsk_on_random_states():
    from probemetrics import random_pure

    for k in range(200):
        rng = SEED.child(6_000 + k).rng()
        da, db = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        psi = random_pure(da, db, rng)
        spec = Spectrum(tuple(np.sort(rng.standard_normal(da))))
        rho = density(np.outer(psi, psi.conj()), da, db)
        assert abs(avsk(rho, spec) - avsk_pure_relation(psi, spec, dim_b=db)) < 1e-9


# ---------------------------------------------------------------------------
# witness / correlations / precision
# ---------------------------------------------------------------------------

def test_witness():
    assert entanglement_witness(BELL, SZ)
    assert not entanglement_witness(product_state(), SZ)
    # the isotropic average crosses the separable cap at F = (2 + sqrt(3))/4
    threshold = (2 + np.sqrt(3)) / 4
    assert entanglement_witness(isotropic(0.95), SZ)
    assert not entanglement_witness(isotropic(0.9), SZ)
    assert entanglement_witness(isotropic(threshold + 1e-3), SZ)
    assert not entanglement_witness(isotropic(threshold - 1e-3), SZ)


def test_avsk_corr():
    rng = SEED.child(12).rng()
    prod = density(tensor(random_local_density(2, rng), random_local_density(2, rng)), 2, 2)
    assert avsk_corr(prod, SZ) < 1e-10
    assert abs(avsk_corr(BELL, SZ) - 1.0) < 1e-12
    cc = cc_state(np.array([[0.5, 0.0], [0.0, 0.5]]))
    assert abs(avsk_corr(cc, SZ) - 2 / 3) < 1e-12


def test_q_a():
    rng = SEED.child(13).rng()
    free = density(tensor(np.eye(2) / 2, random_local_density(2, rng)), 2, 2)
    assert q_a(free) < 1e-12
    assert abs(q_a(BELL) - 1.5) < 1e-12
    rho = random_density(2, 2, 4, SEED.child(14))
    assert abs(q_a(rho) * SZ.prefactor - avsk(rho, SZ)) < 1e-12


def test_precision_bounds():
    lo, hi = precision_bounds(BELL, PAULI_Z)
    assert abs(lo - 0.125) < 1e-12 and abs(hi - 0.25) < 1e-12
    plus = density(tensor(ket_density(KET_PLUS), ket_density(KET_0)), 2, 2)
    lo, hi = precision_bounds(plus, PAULI_Z)
    assert abs(lo - 0.125) < 1e-12 and abs(hi - 0.25) < 1e-12
    rng = SEED.child(15).rng()
    free = density(tensor(np.eye(2) / 2, random_local_density(2, rng)), 2, 2)
    u = haar_unitary(2, SEED.child(16))
    with pytest.raises(ZeroSusceptibility):
        precision_bounds(free, u @ PAULI_Z @ dag(u))


def test_measure_report_bundle():
    report = measure_state(BELL, SZ, with_variance=True, family_tag="bell")
    assert abs(report.avsk - 1.0) < 1e-9
    assert abs(report.lqu - 1.0) < 1e-9
    assert report.variance < 1e-9
    assert report.witness_entangled
    assert abs(report.concurrence - 1.0) < 1e-9
    d = report.as_dict()
    assert d["familyTag"] == "bell"


# ---------------------------------------------------------------------------
# ordering and pure-state structure on random states
# ---------------------------------------------------------------------------

def test_avsk_dominates_lqu():
    for k in range(500):
        rho = random_density(2, 2, 4, SEED.child(7_000 + k))
        root = rho.sqrt()
        assert avsk(rho, SZ, sqrt_rho=root) >= lqu_two_qubit(rho, sqrt_rho=root) - 1e-9


def test_pure_state_lqu_equals_concurrence_squared():
    for c1 in np.linspace(0.0, 1.0, 21):
        st = pure_schmidt(float(c1))
        c2 = 4 * c1 * (1 - c1)
        assert abs(lqu_two_qubit(st) - c2) < 1e-9
