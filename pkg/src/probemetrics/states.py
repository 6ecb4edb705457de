"""State-family constructors and seeded random samplers.

Random sampling conventions:

* Haar unitaries come from the QR decomposition of a complex standard
  Gaussian (Ginibre) matrix with the R-diagonal phase correction.
* Random density matrices use the Ginibre-induced measure
  rho = G G^dag / Tr[G G^dag] with G of shape (dim, rank).
* All sampling is driven by a RandomSeed; identical (seed, stream) values
  reproduce bit-identical matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter, InvalidRank
from .linalg import DensityMatrix, dag, density, partial_trace, swap_operator, tensor

KET_0 = np.array([1.0, 0.0], dtype=complex)
KET_1 = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True)
class RandomSeed:
    """Master seed plus a stream counter for independent sub-generators."""

    seed: int
    stream: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence((self.seed, self.stream))))

    def child(self, index: int) -> "RandomSeed":
        """Derive an independent per-item stream (worker/state indexing)."""
        return RandomSeed(self.seed, self.stream * 1_000_003 + index + 1)


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, RandomSeed):
        return seed.rng()
    return RandomSeed(int(seed)).rng()


def ginibre(n: int, m: int, rng) -> np.ndarray:
    """n x m complex standard Gaussian matrix."""
    rng = _as_rng(rng)
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2.0)


def haar_unitary(n: int, seed) -> np.ndarray:
    """Haar-distributed unitary on U(n)."""
    return haar_unitaries(n, 1, seed)[0]


def haar_unitaries(n: int, count: int, seed) -> np.ndarray:
    """Batch of Haar unitaries, shape (count, n, n)."""
    rng = _as_rng(seed)
    z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.einsum("bii->bi", r)
    return q * (d / np.abs(d))[:, None, :]


def random_density(dim_a: int, dim_b: int, rank: int, seed) -> DensityMatrix:
    """Ginibre-induced random density matrix of the requested rank."""
    d = dim_a * dim_b
    if not 1 <= rank <= d:
        raise InvalidRank(f"rank {rank} outside 1..{d}")
    g = ginibre(d, rank, seed)
    m = g @ dag(g)
    m /= np.trace(m).real
    return density(m, dim_a, dim_b)


def random_pure(dim_a: int, dim_b: int, seed) -> np.ndarray:
    """Haar-random pure state vector on the bipartite space."""
    rng = _as_rng(seed)
    v = rng.standard_normal(dim_a * dim_b) + 1j * rng.standard_normal(dim_a * dim_b)
    return v / np.linalg.norm(v)


def random_local_density(n: int, seed) -> np.ndarray:
    g = ginibre(n, n, seed)
    m = g @ dag(g)
    return m / np.trace(m).real


def random_separable(dim_a: int, dim_b: int, terms: int, seed) -> DensityMatrix:
    """Convex mixture of `terms` random product states with flat-Dirichlet weights."""
    if terms < 1:
        raise InvalidParameter(f"terms must be >= 1, got {terms}")
    rng = _as_rng(seed)
    weights = rng.dirichlet(np.ones(terms)) if terms > 1 else np.array([1.0])
    m = np.zeros((dim_a * dim_b, dim_a * dim_b), dtype=complex)
    for w in weights:
        m += w * tensor(random_local_density(dim_a, rng), random_local_density(dim_b, rng))
    return density(m, dim_a, dim_b)


# ---------------------------------------------------------------------------
# Named families
# ---------------------------------------------------------------------------

def ket_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def bell_state(which: int = 0) -> DensityMatrix:
    """Bell states; which=0 is (|00> + |11>)/sqrt(2)."""
    kets = {
        0: (np.kron(KET_0, KET_0) + np.kron(KET_1, KET_1)) / np.sqrt(2.0),
        1: (np.kron(KET_0, KET_0) - np.kron(KET_1, KET_1)) / np.sqrt(2.0),
        2: (np.kron(KET_0, KET_1) + np.kron(KET_1, KET_0)) / np.sqrt(2.0),
        3: (np.kron(KET_0, KET_1) - np.kron(KET_1, KET_0)) / np.sqrt(2.0),
    }
    if which not in kets:
        raise InvalidParameter(f"bell index must be 0..3, got {which}")
    return density(ket_density(kets[which]), 2, 2)


def pure_schmidt(c1: float, dim_b: int = 2) -> DensityMatrix:
    """Two-term Schmidt state sqrt(c1)|00> + sqrt(1-c1)|11> on 2 x dim_b."""
    if not 0.0 <= c1 <= 1.0:
        raise InvalidParameter(f"Schmidt coefficient c1 must lie in [0,1], got {c1}")
    if dim_b < 2:
        raise InvalidParameter("pure_schmidt needs dim_b >= 2")
    psi = np.zeros(2 * dim_b, dtype=complex)
    psi[0] = np.sqrt(c1)
    psi[dim_b + 1] = np.sqrt(1.0 - c1)
    return density(ket_density(psi), 2, dim_b)


def isotropic(fidelity: float, n: int = 2) -> DensityMatrix:
    """Isotropic state with the given fidelity to the maximally entangled state."""
    if not 0.0 <= fidelity <= 1.0:
        raise InvalidParameter(f"isotropic fidelity must lie in [0,1], got {fidelity}")
    phi = np.zeros(n * n, dtype=complex)
    for i in range(n):
        phi[i * n + i] = 1.0 / np.sqrt(n)
    proj = ket_density(phi)
    eye = np.eye(n * n, dtype=complex)
    m = (1.0 - fidelity) / (n * n - 1.0) * (eye - proj) + fidelity * proj
    return density(m, n, n)


def werner(q: float, n: int = 2) -> DensityMatrix:
    """Werner state: mixture of the normalized symmetric and antisymmetric projectors.

    q in [0,1] is the weight on the symmetric component; every output is
    invariant under U (x) U conjugations.
    """
    if not 0.0 <= q <= 1.0:
        raise InvalidParameter(f"werner weight must lie in [0,1], got {q}")
    s = swap_operator(n)
    eye = np.eye(n * n, dtype=complex)
    p_sym = 0.5 * (eye + s)
    p_asym = 0.5 * (eye - s)
    m = q * 2.0 * p_sym / (n * (n + 1)) + (1.0 - q) * 2.0 * p_asym / (n * (n - 1))
    return density(m, n, n)


def product_state(rho_a: np.ndarray | None = None, rho_b: np.ndarray | None = None) -> DensityMatrix:
    """Product state rho_A (x) rho_B; defaults to the pure product |00><00|."""
    if rho_a is None:
        rho_a = ket_density(KET_0)
    if rho_b is None:
        rho_b = ket_density(KET_0)
    return density(tensor(rho_a, rho_b), rho_a.shape[0], rho_b.shape[0])


def max_discordant() -> DensityMatrix:
    """The separable two-qubit state with maximal discord-type correlations:
    (|0><0| (x) |0><0| + |+><+| (x) |1><1|) / 2."""
    m = 0.5 * tensor(ket_density(KET_0), ket_density(KET_0)) + 0.5 * tensor(
        ket_density(KET_PLUS), ket_density(KET_1)
    )
    return density(m, 2, 2)


def family_product(p: float) -> DensityMatrix:
    """One-parameter product family (p|0><0| + (1-p) I/2) (x) |0><0|."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"family parameter p must lie in [0,1], got {p}")
    rho_a = p * ket_density(KET_0) + (1.0 - p) * np.eye(2, dtype=complex) / 2.0
    return product_state(rho_a, ket_density(KET_0))


def family_pqc(p: float) -> DensityMatrix:
    """(pure quantum)-classical line from the maximally discordant state (p=0)
    to a pure product state (p=1)."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"family parameter p must lie in [0,1], got {p}")
    m = 0.5 * (1.0 - p) * tensor(ket_density(KET_0), ket_density(KET_0)) + 0.5 * (1.0 + p) * tensor(
        ket_density(KET_PLUS), ket_density(KET_1)
    )
    return density(m, 2, 2)


def family_sep(p: float) -> DensityMatrix:
    """Separable line from the maximally mixed state (p=0) to the maximally
    discordant state (p=1)."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"family parameter p must lie in [0,1], got {p}")
    m = 0.5 * p * (
        tensor(ket_density(KET_0), ket_density(KET_0)) + tensor(ket_density(KET_PLUS), ket_density(KET_1))
    ) + (1.0 - p) * np.eye(4, dtype=complex) / 4.0
    return density(m, 2, 2)


def _validate_probs(probs: np.ndarray) -> np.ndarray:
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < -1e-12) or abs(probs.sum() - 1.0) > 1e-10:
        raise InvalidParameter("probabilities must be nonnegative and sum to 1")
    return np.clip(probs, 0.0, None)


def cq_state(probs, states_b, basis_a: np.ndarray | None = None) -> DensityMatrix:
    """Classical-quantum state sum_i p_i |i><i|_A (x) rho_B^(i).

    basis_a columns give the local A basis (default computational).
    """
    probs = _validate_probs(probs)
    dim_a = len(probs)
    dim_b = states_b[0].shape[0]
    if basis_a is None:
        basis_a = np.eye(dim_a, dtype=complex)
    m = np.zeros((dim_a * dim_b, dim_a * dim_b), dtype=complex)
    for i, (p, rb) in enumerate(zip(probs, states_b)):
        m += p * tensor(ket_density(basis_a[:, i]), np.asarray(rb, dtype=complex))
    return density(m, dim_a, dim_b)


def qc_state(probs, states_a, basis_b: np.ndarray | None = None) -> DensityMatrix:
    """Quantum-classical state sum_i p_i rho_A^(i) (x) |i><i|_B."""
    probs = _validate_probs(probs)
    dim_b = len(probs)
    dim_a = states_a[0].shape[0]
    if basis_b is None:
        basis_b = np.eye(dim_b, dtype=complex)
    m = np.zeros((dim_a * dim_b, dim_a * dim_b), dtype=complex)
    for i, (p, ra) in enumerate(zip(probs, states_a)):
        m += p * tensor(np.asarray(ra, dtype=complex), ket_density(basis_b[:, i]))
    return density(m, dim_a, dim_b)


def pqc_state(probs, vectors_a, basis_b: np.ndarray | None = None) -> DensityMatrix:
    """(pure quantum)-classical state: every A block is a pure state."""
    states_a = [ket_density(v / np.linalg.norm(v)) for v in vectors_a]
    return qc_state(probs, states_a, basis_b)


def cc_state(pmat, basis_a: np.ndarray | None = None, basis_b: np.ndarray | None = None) -> DensityMatrix:
    """Classical-classical state sum_ij p_ij |i><i|_A (x) |j><j|_B."""
    pmat = np.asarray(pmat, dtype=float)
    if np.any(pmat < -1e-12) or abs(pmat.sum() - 1.0) > 1e-10:
        raise InvalidParameter("joint probabilities must be nonnegative and sum to 1")
    dim_a, dim_b = pmat.shape
    if basis_a is None:
        basis_a = np.eye(dim_a, dtype=complex)
    if basis_b is None:
        basis_b = np.eye(dim_b, dtype=complex)
    m = np.zeros((dim_a * dim_b, dim_a * dim_b), dtype=complex)
    for i in range(dim_a):
        for j in range(dim_b):
            m += pmat[i, j] * tensor(ket_density(basis_a[:, i]), ket_density(basis_b[:, j]))
    return density(m, dim_a, dim_b)


# ---------------------------------------------------------------------------
# Tagged family dispatch
# ---------------------------------------------------------------------------

FAMILY_TAGS = (
    "bell",
    "werner",
    "isotropic",
    "cq",
    "cc",
    "qc",
    "pqc",
    "product",
    "max_discordant",
    "family_product",
    "family_pqc",
    "family_sep",
    "pure_schmidt",
    "random_ginibre",
    "random_pure",
)


@dataclass(frozen=True)
class StateFamily:
    """A family tag plus its real parameter list."""

    tag: str
    params: tuple = field(default=())

    def __post_init__(self):
        if self.tag not in FAMILY_TAGS:
            raise InvalidParameter(f"unknown family tag {self.tag!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))


def make_state(family: StateFamily, seed=None) -> DensityMatrix:
    """Build the exact density matrix of a tagged family.

    Parametric tags take their parameters from family.params; the random tags
    additionally require a seed.
    """
    tag, params = family.tag, family.params
    first = params[0] if params else None
    if tag == "bell":
        return bell_state(int(first) if params else 0)
    if tag == "werner":
        return werner(first if params else 1.0, int(params[1]) if len(params) > 1 else 2)
    if tag == "isotropic":
        if not params:
            raise InvalidParameter("isotropic requires a fidelity parameter")
        return isotropic(first, int(params[1]) if len(params) > 1 else 2)
    if tag == "product":
        return product_state()
    if tag == "max_discordant":
        return max_discordant()
    if tag == "family_product":
        return family_product(_require_param(tag, first))
    if tag == "family_pqc":
        return family_pqc(_require_param(tag, first))
    if tag == "family_sep":
        return family_sep(_require_param(tag, first))
    if tag == "pure_schmidt":
        return pure_schmidt(_require_param(tag, first))
    if tag == "cq":
        probs = params if params else (0.5, 0.5)
        return cq_state(probs, [ket_density(KET_0), ket_density(KET_1)][: len(probs)])
    if tag == "cc":
        p = first if params else 0.5
        return cc_state(np.array([[p, 0.0], [0.0, 1.0 - p]]))
    if tag == "qc":
        p = first if params else 0.5
        return qc_state([p, 1.0 - p], [ket_density(KET_0), ket_density(KET_PLUS)])
    if tag == "pqc":
        p = first if params else 0.5
        return pqc_state([p, 1.0 - p], [KET_0, KET_PLUS])
    if tag == "random_ginibre":
        dim_a = int(params[0]) if len(params) > 0 else 2
        dim_b = int(params[1]) if len(params) > 1 else 2
        rank = int(params[2]) if len(params) > 2 else dim_a * dim_b
        return random_density(dim_a, dim_b, rank, _seed_or_raise(tag, seed))
    if tag == "random_pure":
        dim_a = int(params[0]) if len(params) > 0 else 2
        dim_b = int(params[1]) if len(params) > 1 else 2
        psi = random_pure(dim_a, dim_b, _seed_or_raise(tag, seed))
        return density(ket_density(psi), dim_a, dim_b)
    raise InvalidParameter(f"unhandled family tag {tag!r}")


def _require_param(tag: str, value) -> float:
    if value is None:
        raise InvalidParameter(f"family {tag!r} requires a parameter")
    return value


def _seed_or_raise(tag: str, seed):
    if seed is None:
        raise InvalidParameter(f"family {tag!r} requires a seed")
    return seed


def depolarize_b(rho: DensityMatrix, strength: float) -> DensityMatrix:
    """Depolarizing channel on subsystem B."""
    ra = partial_trace(rho.matrix, rho.dim_a, rho.dim_b, keep="A")
    mixed = tensor(ra, np.eye(rho.dim_b, dtype=complex) / rho.dim_b)
    return density((1.0 - strength) * rho.matrix + strength * mixed, rho.dim_a, rho.dim_b)


def amplitude_damp_b(rho: DensityMatrix, gamma: float) -> DensityMatrix:
    """Amplitude damping channel on a qubit subsystem B."""
    if rho.dim_b != 2:
        raise InvalidParameter("amplitude damping is implemented for qubit B only")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    out = np.zeros_like(rho.matrix)
    for k in (k0, k1):
        kk = tensor(np.eye(rho.dim_a, dtype=complex), k)
        out += kk @ rho.matrix @ dag(kk)
    return density(out, rho.dim_a, rho.dim_b)
