"""Dense complex linear algebra: Hermitian eigendecompositions, PSD square
roots, tensor products, partial traces and swap operators.

All operators are plain complex numpy arrays in row-major order.  Bipartite
states carry their factor dimensions in a small DensityMatrix wrapper so that
partial traces know how to reshape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput

HERMITICITY_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
# Positive eigenvalues below this are solver noise on an exact zero; keeping
# them would pollute sqrt(rho) at the 1e-8 scale (sqrt of machine epsilon)
# on rank-deficient states, while zeroing them moves rho itself by < 1e-13.
EIGENVALUE_ZERO_FLOOR = 1e-13
TRACE_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation of m from its adjoint."""
    return float(np.max(np.abs(m - dag(m)))) if m.size else 0.0


def require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL, what: str = "matrix") -> None:
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NonHermitianInput(f"{what} deviates from Hermiticity by {defect:.3e} (tol {tol:.1e})")


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with block ordering a (x) b."""
    return np.kron(a, b)


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, unitary of column eigenvectors) such that
    m = V diag(w) V^dag.  Raises NonHermitianInput when the symmetry check
    fails.
    """
    require_hermitian(m)
    w, v = np.linalg.eigh(m)
    return w, v


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in [EIGENVALUE_FLOOR, 0) are clamped to 0; anything more
    negative is an error rather than silently clamped.
    """
    w, v = hermitian_eig(m)
    if w[0] < EIGENVALUE_FLOOR:
        raise NonHermitianInput(
            f"matrix is not PSD: smallest eigenvalue {w[0]:.3e} below floor {EIGENVALUE_FLOOR:.1e}"
        )
    w = np.where(w < EIGENVALUE_ZERO_FLOOR, 0.0, w)
    root = (v * np.sqrt(w)) @ dag(v)
    return 0.5 * (root + dag(root))


@dataclass(frozen=True)
class DensityMatrix:
    """A bipartite density operator with recorded factor dimensions."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = self.dim_a * self.dim_b
        if self.matrix.shape != (d, d):
            raise DimensionMismatch(
                f"matrix shape {self.matrix.shape} incompatible with dims {self.dim_a}x{self.dim_b}"
            )
        require_hermitian(self.matrix, what="density matrix")
        w = np.linalg.eigvalsh(self.matrix)
        if w[0] < EIGENVALUE_FLOOR:
            raise NonHermitianInput(
                f"density matrix has eigenvalue {w[0]:.3e} below floor {EIGENVALUE_FLOOR:.1e}"
            )
        tr = float(np.trace(self.matrix).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise DimensionMismatch(f"density matrix trace {tr} differs from 1 beyond {TRACE_TOL:.1e}")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def sqrt(self) -> np.ndarray:
        return sqrtm_psd(self.matrix)

    def marginal_a(self) -> np.ndarray:
        return partial_trace(self.matrix, self.dim_a, self.dim_b, keep="A")

    def marginal_b(self) -> np.ndarray:
        return partial_trace(self.matrix, self.dim_a, self.dim_b, keep="B")

    def purity_a(self) -> float:
        ra = self.marginal_a()
        return float(np.trace(ra @ ra).real)

    def purity_b(self) -> float:
        rb = self.marginal_b()
        return float(np.trace(rb @ rb).real)


def density(matrix: np.ndarray, dim_a: int, dim_b: int) -> DensityMatrix:
    """Validating DensityMatrix constructor (Hermitian, PSD, unit trace)."""
    return DensityMatrix(dim_a=dim_a, dim_b=dim_b, matrix=np.asarray(matrix, dtype=complex))


def partial_trace(m: np.ndarray, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Trace out one factor of an operator on a dim_a x dim_b bipartite space.

    keep="A" returns the dim_a x dim_a reduction Tr_B[m]; keep="B" returns
    Tr_A[m].  m may be any (not necessarily Hermitian) square matrix of the
    right size.
    """
    d = dim_a * dim_b
    if m.shape != (d, d):
        raise DimensionMismatch(f"matrix shape {m.shape} incompatible with dims {dim_a}x{dim_b}")
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep in ("A", "a", 0):
        return np.einsum("abcb->ac", t)
    if keep in ("B", "b", 1):
        return np.einsum("abad->bd", t)
    raise DimensionMismatch(f"keep must be 'A' or 'B', got {keep!r}")


def swap_operator(n: int) -> np.ndarray:
    """Swap operator S on H_n (x) H_n with S|i>|j> = |j>|i>."""
    eye = np.eye(n)
    return np.einsum("ad,bc->abcd", eye, eye).reshape(n * n, n * n).astype(complex)


def embed_a(h_a: np.ndarray, dim_b: int) -> np.ndarray:
    """Extend a subsystem-A operator to the full space as H_A (x) I_B."""
    return tensor(h_a, np.eye(dim_b, dtype=complex))
