"""Haar-integration machinery: the order-2 twirling channel, order-4
Weingarten coefficients as exact rational functions of the dimension N,
the fourth-moment contraction tables and the variance of the skew
information.

The order-4 coefficient functions have poles at N = 1, 2, 3.  The variance
of a two-qubit state is nevertheless finite: the full contraction is
reorganized as a linear form over eight state-dependent "letter" scalars,
whose rational coefficient functions of N lose their (N-2) and (N-3)
factors exactly.  All polynomial arithmetic stays in integers until the
final evaluation, so the cancellation is exact rather than a float
near-miss.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Optional, Union

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, PoleEvaluation
from .linalg import DensityMatrix, partial_trace, swap_operator
from .measures import NEGATIVE_CLAMP, Spectrum, avsk, skew_samples
from .states import haar_unitaries

# ---------------------------------------------------------------------------
# Integer polynomials in N (dense coefficient tuples, low order first)
# ---------------------------------------------------------------------------

def poly_strip(p: tuple) -> tuple:
    n = len(p)
    while n > 1 and p[n - 1] == 0:
        n -= 1
    return tuple(p[:n])


def poly_add(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return poly_strip(tuple(out))


def poly_mul(a: tuple, b: tuple) -> tuple:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return poly_strip(tuple(out))


def poly_scale(a: tuple, k: int) -> tuple:
    return poly_strip(tuple(c * k for c in a))


def poly_eval(a: tuple, n) -> int:
    acc = 0
    for c in reversed(a):
        acc = acc * n + c
    return acc


def poly_from_roots(roots) -> tuple:
    p = (1,)
    for r in roots:
        p = poly_mul(p, (-r, 1))
    return p


def poly_div_linear(a: tuple, root: int) -> tuple:
    """Exact synthetic division of a by (N - root); the remainder must vanish."""
    if len(a) < 2:
        raise ArithmeticError(f"cannot divide the constant polynomial {a} by (N - {root})")
    out = [0] * (len(a) - 1)
    carry = 0
    for i in range(len(a) - 1, 0, -1):
        carry = a[i] + carry * root
        out[i - 1] = carry
    remainder = a[0] + carry * root
    if remainder != 0:
        raise ArithmeticError(f"(N - {root}) does not divide {a}")
    return poly_strip(tuple(out))


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _integer_roots(p: tuple) -> list[int]:
    p = poly_strip(p)
    roots = []
    if p == (0,):
        return roots
    if p[0] == 0:
        roots.append(0)
        return roots + _integer_roots(poly_div_linear(p, 0))
    for c in _divisors(p[0]):
        for r in (c, -c):
            if poly_eval(p, r) == 0 and r not in roots:
                roots.append(r)
    return roots


def _content(p: tuple) -> int:
    g = 0
    for c in p:
        g = int(np.gcd(g, abs(int(c))))
    return g if g else 1


def _poly_primitive(p: tuple) -> tuple:
    g = _content(p)
    return tuple(c // g for c in p)


def _poly_pseudo_rem(a: tuple, b: tuple) -> tuple:
    """Pseudo-remainder of a by b over the integers (b nonzero, deg a >= deg b)."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and any(a):
        da, la = len(a) - 1, a[-1]
        a = [c * lb for c in a]
        for i, cb in enumerate(b):
            a[da - db + i] -= la * cb
        a = list(poly_strip(tuple(a)))
        if a == [0]:
            break
    return poly_strip(tuple(a))


def poly_gcd(a: tuple, b: tuple) -> tuple:
    """GCD of integer polynomials (primitive part), via the primitive PRS."""
    a, b = poly_strip(a), poly_strip(b)
    if a == (0,):
        return _poly_primitive(b) if b != (0,) else (1,)
    if b == (0,):
        return _poly_primitive(a)
    if len(a) < len(b):
        a, b = b, a
    while True:
        r = _poly_pseudo_rem(a, b)
        if r == (0,):
            return _poly_primitive(b)
        a, b = b, _poly_primitive(r)
        if len(b) == 1:
            return (1,)


def poly_div_exact(a: tuple, b: tuple) -> tuple:
    """Exact division of integer polynomials; raises if b does not divide a."""
    a = list(poly_strip(a))
    b = poly_strip(b)
    if b == (1,):
        return poly_strip(tuple(a))
    db, lb = len(b) - 1, b[-1]
    out = [0] * (len(a) - db)
    while len(a) - 1 >= db and any(a):
        da, la = len(a) - 1, a[-1]
        if la % lb != 0:
            raise ArithmeticError(f"{b} does not divide exactly")
        coeff = la // lb
        out[da - db] = coeff
        for i, cb in enumerate(b):
            a[da - db + i] -= coeff * cb
        a = list(poly_strip(tuple(a)))
    if any(a):
        raise ArithmeticError(f"{b} does not divide: remainder {tuple(a)}")
    return poly_strip(tuple(out))


@dataclass(frozen=True)
class RationalFunctionOfN:
    """Ratio of integer-coefficient polynomials in the dimension variable N.

    Arithmetic is exact; `reduce` cancels common linear integer-root factors
    so that removable poles disappear before any evaluation.
    """

    numerator: tuple
    denominator: tuple

    def __post_init__(self):
        num = poly_strip(tuple(int(c) for c in self.numerator))
        den = poly_strip(tuple(int(c) for c in self.denominator))
        if den == (0,):
            raise ZeroDivisionError("zero denominator polynomial")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @staticmethod
    def from_int(k: int) -> "RationalFunctionOfN":
        return RationalFunctionOfN((k,), (1,))

    def reduce(self) -> "RationalFunctionOfN":
        num, den = self.numerator, self.denominator
        if num == (0,):
            return RationalFunctionOfN((0,), (1,))
        g = poly_gcd(num, den)
        if len(g) > 1:
            num = poly_div_exact(num, g)
            den = poly_div_exact(den, g)
        k = int(np.gcd(_content(num), _content(den)))
        if den[-1] < 0:
            k = -k
        num = tuple(c // k for c in num)
        den = tuple(c // k for c in den)
        return RationalFunctionOfN(num, den)

    def __add__(self, other: "RationalFunctionOfN") -> "RationalFunctionOfN":
        if self.denominator == other.denominator:
            return RationalFunctionOfN(poly_add(self.numerator, other.numerator), self.denominator)
        num = poly_add(
            poly_mul(self.numerator, other.denominator),
            poly_mul(other.numerator, self.denominator),
        )
        return RationalFunctionOfN(num, poly_mul(self.denominator, other.denominator))

    def __sub__(self, other: "RationalFunctionOfN") -> "RationalFunctionOfN":
        return self + other.scale(-1)

    def scale(self, k: int) -> "RationalFunctionOfN":
        return RationalFunctionOfN(poly_scale(self.numerator, k), self.denominator)

    def mul_poly(self, p: tuple) -> "RationalFunctionOfN":
        return RationalFunctionOfN(poly_mul(self.numerator, p), self.denominator)

    def poles(self) -> list[int]:
        """Integer poles of the reduced form."""
        red = self.reduce()
        return [r for r in _integer_roots(red.denominator) if poly_eval(red.numerator, r) != 0]

    def evaluate(self, n: int) -> Fraction:
        red = self.reduce()
        den = poly_eval(red.denominator, n)
        if den == 0:
            raise PoleEvaluation(f"rational function has a pole at N = {n}")
        return Fraction(poly_eval(red.numerator, n), den)

    def __call__(self, n: int) -> Fraction:
        return self.evaluate(n)


# ---------------------------------------------------------------------------
# Permutations of four elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Perm4:
    """Permutation of {1,2,3,4} stored as its image tuple: maps a -> images[a-1]."""

    images: tuple

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != [1, 2, 3, 4]:
            raise InvalidParameter(f"not a permutation of 1..4: {images}")
        object.__setattr__(self, "images", images)

    def __call__(self, a: int) -> int:
        return self.images[a - 1]

    def compose(self, other: "Perm4") -> "Perm4":
        """self after other: (self.compose(other))(a) = self(other(a))."""
        return Perm4(tuple(self(other(a)) for a in (1, 2, 3, 4)))

    def inverse(self) -> "Perm4":
        inv = [0] * 4
        for a in (1, 2, 3, 4):
            inv[self(a) - 1] = a
        return Perm4(tuple(inv))

    def cycle_class(self) -> tuple:
        """Sorted cycle lengths, e.g. (1,3) for a 3-cycle plus a fixed point."""
        seen = [False] * 4
        lengths = []
        for a in (1, 2, 3, 4):
            if seen[a - 1]:
                continue
            length = 0
            b = a
            while not seen[b - 1]:
                seen[b - 1] = True
                b = self(b)
                length += 1
            lengths.append(length)
        return tuple(sorted(lengths))


ALL_PERM4 = tuple(Perm4(p) for p in permutations((1, 2, 3, 4)))
FOUR_CYCLES = tuple(p for p in ALL_PERM4 if p.cycle_class() == (4,))
DOUBLE_TRANSPOSITIONS = tuple(p for p in ALL_PERM4 if p.cycle_class() == (2, 2))

CLASS_LABELS = {
    (4,): "[4]",
    (1, 3): "[1,3]",
    (2, 2): "[2^2]",
    (1, 1, 2): "[1^2,2]",
    (1, 1, 1, 1): "[1^4]",
}

_D7 = poly_from_roots([3, 2, 1, 0, -1, -2, -3])       # (N-3)...(N+3)
_D8 = poly_mul(_D7, (0, 1))                            # N * (N-3)...(N+3)

# As-printed tabulation of the order-4 coefficients (what `weingarten4`
# reports): all rows over (N-3)(N-2)(N-1)N(N+1)(N+2)(N+3) except [1^2,2].
WEINGARTEN4_TABLE = {
    (4,): RationalFunctionOfN((-5,), _D7),
    (1, 3): RationalFunctionOfN((-3, 0, 2), _D7),
    (2, 2): RationalFunctionOfN((6, 0, 1), _D7),
    (1, 1, 2): RationalFunctionOfN((1,), poly_from_roots([3, 1, 0, -1, -3])),
    (1, 1, 1, 1): RationalFunctionOfN((6, 0, -8, 0, 1), _D7),
}

# Coefficients actually entering the order-4 moment expansion.  The
# normalization and signs are pinned by the moment identity
# sum_{sigma in S4} wg(sigma, N) = 1/(N(N+1)(N+2)(N+3)) and by Monte Carlo
# checks of explicit (4,4) moments (see tests); they differ from the rows of
# WEINGARTEN4_TABLE by factors of N on three classes and by the sign of the
# transposition class.
_MOMENT4_TABLE = {
    (4,): RationalFunctionOfN((0, -5), _D8),
    (1, 3): RationalFunctionOfN((-3, 0, 2), _D8),
    (2, 2): RationalFunctionOfN((6, 0, 1), _D8),
    (1, 1, 2): RationalFunctionOfN((0, 4, 0, -1), _D8),
    (1, 1, 1, 1): RationalFunctionOfN((6, 0, -8, 0, 1), _D8),
}


def _as_class(sigma) -> tuple:
    if isinstance(sigma, Perm4):
        return sigma.cycle_class()
    key = tuple(sorted(int(i) for i in sigma))
    if key in WEINGARTEN4_TABLE:
        return key
    if sorted(key) == [1, 2, 3, 4]:
        return Perm4(tuple(sigma)).cycle_class()
    raise InvalidParameter(f"not a permutation or cycle class of 4 elements: {sigma!r}")


def weingarten4(sigma, n: Optional[int] = None) -> Union[RationalFunctionOfN, Fraction]:
    """Order-4 coefficient table lookup by permutation or cycle class.

    With n=None the exact rational function of N is returned; with a numeric
    n the value is evaluated exactly, raising PoleEvaluation at the poles of
    the reduced form (every class diverges for n < 4 except [1^2,2], which
    stays finite at n = 2).
    """
    rf = WEINGARTEN4_TABLE[_as_class(sigma)]
    if n is None:
        return rf
    return rf.evaluate(int(n))


def moment4_coefficient(sigma, n: Optional[int] = None) -> Union[RationalFunctionOfN, Fraction]:
    """Weingarten coefficient wg(sigma, N) used in the (4,4) moment formula."""
    rf = _MOMENT4_TABLE[_as_class(sigma)]
    if n is None:
        return rf
    return rf.evaluate(int(n))


def haar_moment4(i_row, j_row, k_row, l_row, n: int) -> Fraction:
    """Exact (4,4) Haar moment E[prod_a U_{i_a j_a} prod_a (U^dag)_{k_a l_a}]
    on U(n), n >= 4.

    Index pairing: the term (sigma, tau) contributes when i_a = l_{tau(a)} and
    j_a = k_{(tau o sigma)(a)} for all a, with weight wg(sigma, n).
    """
    if n < 4:
        raise PoleEvaluation("the rational order-4 moment formula needs n >= 4")
    total = Fraction(0)
    for sigma in ALL_PERM4:
        weight = moment4_coefficient(sigma, n)
        if weight == 0:
            continue
        for tau in ALL_PERM4:
            ts = tau.compose(sigma)
            ok = all(i_row[a - 1] == l_row[tau(a) - 1] for a in (1, 2, 3, 4)) and all(
                j_row[a - 1] == k_row[ts(a) - 1] for a in (1, 2, 3, 4)
            )
            if ok:
                total += weight
    return total


# ---------------------------------------------------------------------------
# Order-2 twirling channel
# ---------------------------------------------------------------------------

def twirl2(theta: np.ndarray, n: int) -> np.ndarray:
    """Average of (U (x) U) Theta (U (x) U)^dag over Haar U on U(n):
    a combination of the identity and the swap fixed by Tr[Theta], Tr[S Theta]."""
    theta = np.asarray(theta, dtype=complex)
    if theta.shape != (n * n, n * n):
        raise DimensionMismatch(f"twirl2 needs an {n * n}x{n * n} operator, got {theta.shape}")
    s = swap_operator(n)
    tr = np.trace(theta)
    tr_s = np.trace(s @ theta)
    denom = n * (n * n - 1)
    eye = np.eye(n * n, dtype=complex)
    return ((n * tr - tr_s) / denom) * eye + ((n * tr_s - tr) / denom) * s


# ---------------------------------------------------------------------------
# Spectrum function F and the state letters
# ---------------------------------------------------------------------------

def f_lambda(cls, spec: Spectrum) -> float:
    """Spectrum factor of the fourth moment: product of Tr[L^len] over the
    cycles of the permutation class, with L taken traceless.

    Any 1-cycle kills the product, leaving Tr[L^4] for class [4] and
    Tr[L^2]^2 for [2^2], zero otherwise.
    """
    lam = spec.traceless
    out = 1.0
    for length in _as_class(cls):
        out *= float(np.sum(lam ** length))
    return out


@dataclass(frozen=True)
class LetterValues:
    """The eight state-dependent scalars of the fourth-moment contraction."""

    one: float
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    g: float

    def __post_init__(self):
        if abs(self.c - self.a * self.a) > 1e-10:
            raise InvalidParameter(f"letter C must equal A^2: {self.c} vs {self.a ** 2}")

    def get(self, name: str) -> float:
        return getattr(self, name)


def letters(rho: DensityMatrix, sqrt_rho: Optional[np.ndarray] = None) -> LetterValues:
    """Evaluate the eight contraction letters of a bipartite state.

    With R = sqrt(rho) reshaped as T[a,b,a',b']:

        A = Tr_B[(Tr_A R)^2]                   B = Tr_A[(Tr_B rho)^2]
        C = A^2                                E = Tr[R (rho_A (x) Tr_A R)]
        F = Tr_A[(Tr_B[R (I_A (x) Tr_A R)])^2]
        D = Tr_AA'[M^2],  G = Tr_AA'[M^2 S_AA']

    where M on A (x) A' is the B-contraction of two copies of R sharing the B
    leg: M[(a,a'),(c,c')] = sum_{b,b''} T[a,b,c,b''] T[a',b'',c',b].
    """
    na, nb = rho.dim_a, rho.dim_b
    root = rho.sqrt() if sqrt_rho is None else sqrt_rho
    t = root.reshape(na, nb, na, nb)
    qb = np.einsum("abad->bd", t)
    rho_a = rho.marginal_a()

    a_val = np.trace(qb @ qb).real
    b_val = np.trace(rho_a @ rho_a).real
    e_val = np.einsum("abcd,ca,db->", t, rho_a, qb).real
    z = np.einsum("abce,eb->ac", t, qb)
    f_val = np.trace(z @ z).real
    m = np.einsum("abcd,edfb->aecf", t, t).reshape(na * na, na * na)
    m2 = m @ m
    d_val = np.trace(m2).real
    g_val = np.trace(m2 @ swap_operator(na)).real
    return LetterValues(
        one=1.0,
        a=float(a_val),
        b=float(b_val),
        c=float(a_val) ** 2,
        d=float(d_val),
        e=float(e_val),
        f=float(f_val),
        g=float(g_val),
    )


# Contraction tables of the fourth moment, keyed by the image tuple of tau.
# G3 multipliers marked "n" carry one free subsystem-A index sum and scale
# with N_A; the printed two-qubit table shows them as factors of 2.
G2_TABLE = {
    (1, 2, 3, 4): "one",
    (1, 2, 4, 3): "a",
    (1, 3, 2, 4): "b",
    (1, 3, 4, 2): "e",
    (1, 4, 2, 3): "e",
    (1, 4, 3, 2): "b",
    (2, 1, 3, 4): "a",
    (2, 1, 4, 3): "c",
    (2, 3, 1, 4): "e",
    (2, 3, 4, 1): "f",
    (2, 4, 1, 3): "f",
    (2, 4, 3, 1): "e",
    (3, 1, 2, 4): "e",
    (3, 1, 4, 2): "f",
    (3, 2, 1, 4): "b",
    (3, 2, 4, 1): "e",
    (3, 4, 1, 2): "d",
    (3, 4, 2, 1): "g",
    (4, 1, 2, 3): "f",
    (4, 1, 3, 2): "e",
    (4, 2, 1, 3): "e",
    (4, 2, 3, 1): "b",
    (4, 3, 1, 2): "g",
    (4, 3, 2, 1): "d",
}

G3_TABLE = {
    (1, 2, 3, 4): (1, "one"),
    (1, 2, 4, 3): (1, "a"),
    (1, 3, 2, 4): (1, "b"),
    (1, 3, 4, 2): (1, "e"),
    (1, 4, 2, 3): (1, "e"),
    (1, 4, 3, 2): (1, "b"),
    (2, 1, 3, 4): ("n", "one"),
    (2, 1, 4, 3): ("n", "a"),
    (2, 3, 1, 4): (1, "one"),
    (2, 3, 4, 1): (1, "a"),
    (2, 4, 1, 3): (1, "a"),
    # The (2,4,3,1) contraction closes both trace loops: its deltas force
    # m2=m1, p1=m3=p4, p2=p3, giving Tr[rho_A]*Tr[rho] = 1.  Deriving the
    # delta pattern row by row (and Monte Carlo on the assembled moment)
    # confirms the constant row; see tests/test_moments.py.
    (2, 4, 3, 1): (1, "one"),
    (3, 1, 2, 4): ("n", "b"),
    (3, 1, 4, 2): ("n", "e"),
    (3, 2, 1, 4): (1, "b"),
    (3, 2, 4, 1): (1, "e"),
    (3, 4, 1, 2): (1, "e"),
    (3, 4, 2, 1): (1, "b"),
    (4, 1, 2, 3): ("n", "e"),
    (4, 1, 3, 2): ("n", "b"),
    (4, 2, 1, 3): (1, "e"),
    (4, 2, 3, 1): (1, "b"),
    (4, 3, 1, 2): (1, "b"),
    (4, 3, 2, 1): (1, "e"),
}

LETTER_NAMES = ("one", "a", "b", "c", "d", "e", "f", "g")


def g2_value(tau: Perm4, lv: LetterValues) -> float:
    """Table lookup for the squared-cross-term contraction."""
    return lv.get(G2_TABLE[tau.images])


def g3_value(tau: Perm4, lv: LetterValues, n_a: int = 2) -> float:
    """Table lookup for the mixed-term contraction (two-qubit multipliers by
    default; the factor-2 rows scale with N_A in general)."""
    mult, name = G3_TABLE[tau.images]
    factor = float(n_a) if mult == "n" else 1.0
    return factor * lv.get(name)


# Exact linear identities among the letters: for every bipartite state with
# the given N_A (any N_B), sum_L vec[L] * letter_L = 0.  These are the
# dimension-N_A trace identities (Cayley-Hamilton polarizations) that make
# the divergent pieces of the Weingarten sum drop out; they are validated
# numerically on random states of several N_B in the test suite.
LETTER_IDENTITIES = {
    2: (
        (-1, 1, 2, 0, 0, -2, 0, 0),     # 2E = A + 2B - 1
        (-1, 0, 2, 1, 0, 0, -2, 0),     # 2F = 2B + C - 1
        (-1, 2, 0, -1, 2, 0, 0, -2),    # 2G = 2D + 2A - C - 1
    ),
    3: (
        (1, -2, -4, 1, 2, 8, -4, -2),   # 2G = 1 - 2A - 4B + C + 2D + 8E - 4F
    ),
}


@lru_cache(maxsize=1)
def _letter_coefficients() -> dict:
    """Exact rational coefficient functions of N for the letter-basis form of
    the 576-term double sum.

    For each letter L the sum contributes
        Tr[L^4] * p_L(N) + Tr[L^2]^2 * q_L(N).
    Individual p_L, q_L keep poles at N = 2, 3; the singular parts cancel
    against LETTER_IDENTITIES when the full linear form is evaluated on an
    actual state (asserted exactly in _finite_coefficients_at).
    """
    zero = RationalFunctionOfN.from_int(0)
    p = {name: zero for name in LETTER_NAMES}
    q = {name: zero for name in LETTER_NAMES}
    n_poly = (0, 1)
    for tau in ALL_PERM4:
        inv = tau.inverse()
        w4 = zero
        for g in FOUR_CYCLES:
            w4 = w4 + _MOMENT4_TABLE[inv.compose(g).cycle_class()]
        w22 = zero
        for g in DOUBLE_TRANSPOSITIONS:
            w22 = w22 + _MOMENT4_TABLE[inv.compose(g).cycle_class()]

        name2 = G2_TABLE[tau.images]
        p[name2] = p[name2] + w4
        q[name2] = q[name2] + w22

        mult, name3 = G3_TABLE[tau.images]
        t4, t22 = w4.scale(-2), w22.scale(-2)
        if mult == "n":
            t4, t22 = t4.mul_poly(n_poly), t22.mul_poly(n_poly)
        p[name3] = p[name3] + t4
        q[name3] = q[name3] + t22

    return {name: (p[name].reduce(), q[name].reduce()) for name in LETTER_NAMES}


def _poly_taylor_shift(p: tuple, n0: int) -> tuple:
    """Coefficients of p(t + n0) in powers of t (exact integers)."""
    from math import comb

    out = [0] * len(p)
    for i, c in enumerate(p):
        if c:
            for k in range(i + 1):
                out[k] += c * comb(i, k) * n0 ** (i - k)
    return poly_strip(tuple(out))


def _laurent_at(rf: RationalFunctionOfN, n0: int) -> tuple[list[Fraction], Fraction]:
    """Singular Laurent coefficients [c_{-m}, ..., c_{-1}] and the finite part
    of a reduced rational function at N = n0, all exact."""
    red = rf.reduce()
    num, den = red.numerator, red.denominator
    order = 0
    while poly_eval(den, n0) == 0:
        den = poly_div_linear(den, n0)
        order += 1
    if order == 0:
        return [], Fraction(poly_eval(num, n0), poly_eval(den, n0))
    a = _poly_taylor_shift(num, n0)
    c = _poly_taylor_shift(den, n0)
    series: list[Fraction] = []
    c0 = Fraction(c[0])
    for k in range(order + 1):
        acc = Fraction(a[k]) if k < len(a) else Fraction(0)
        for i in range(k):
            if k - i < len(c):
                acc -= series[i] * c[k - i]
        series.append(acc / c0)
    return series[:order], series[order]


def _in_identity_span(vec: list[Fraction], n_a: int) -> bool:
    """Exact check that a letter-indexed vector is a rational combination of
    the letter identities for this N_A (all-zero vectors count)."""
    if all(v == 0 for v in vec):
        return True
    idents = LETTER_IDENTITIES.get(n_a, ())
    if not idents:
        return False
    # Row-reduce the identity rows over Q, then eliminate vec against them.
    rows = [[Fraction(x) for x in ident] for ident in idents]
    pivots: list[tuple[int, list[Fraction]]] = []
    for row in rows:
        for col, prow in pivots:
            if row[col] != 0:
                factor = row[col] / prow[col]
                row = [a - factor * b for a, b in zip(row, prow)]
        pivot = next((j for j, x in enumerate(row) if x != 0), None)
        if pivot is not None:
            pivots.append((pivot, row))
    target = [Fraction(v) for v in vec]
    for col, prow in pivots:
        if target[col] != 0:
            factor = target[col] / prow[col]
            target = [a - factor * b for a, b in zip(target, prow)]
    return all(v == 0 for v in target)


@lru_cache(maxsize=32)
def _finite_coefficients_at(n_a: int) -> dict:
    """Letter coefficients evaluated at N = n_a with exact pole cancellation.

    At N in {2, 3} the coefficient functions have genuine poles; evaluation
    keeps only the Laurent finite part and asserts, in exact rational
    arithmetic, that every singular-order coefficient vector lies in the span
    of LETTER_IDENTITIES (so the dropped pieces annihilate every admissible
    letter vector)."""
    coeffs = _letter_coefficients()
    finite: dict = {}
    max_order = 0
    singular_p: dict[int, list[Fraction]] = {}
    singular_q: dict[int, list[Fraction]] = {}
    for idx, name in enumerate(LETTER_NAMES):
        pr, qr = coeffs[name]
        sing_p, fin_p = _laurent_at(pr, n_a)
        sing_q, fin_q = _laurent_at(qr, n_a)
        finite[name] = (float(fin_p), float(fin_q))
        for sing, store in ((sing_p, singular_p), (sing_q, singular_q)):
            m = len(sing)
            max_order = max(max_order, m)
            for j, coeff in enumerate(sing):
                order = m - j  # coefficient of (N - n_a)^{-order}
                store.setdefault(order, [Fraction(0)] * len(LETTER_NAMES))[idx] = coeff
    for store in (singular_p, singular_q):
        for order, vec in store.items():
            assert _in_identity_span(vec, n_a), (
                f"residual pole of order {order} at N={n_a} not cancelled by letter identities: {vec}"
            )
    return finite


def second_moment(rho: DensityMatrix, spec: Spectrum, sqrt_rho: Optional[np.ndarray] = None) -> float:
    """Haar average of I^2(rho, U L U^dag (x) I) in closed form.

    The first (twirl-integrable) piece uses only Tr[L^2], Tr[L^4] and the
    marginal purity; the remaining double sum is evaluated in the cached
    letter basis.  The spectrum is shifted to traceless form first.
    """
    if spec.dim != rho.dim_a:
        raise DimensionMismatch(f"spectrum length {spec.dim} != N_A {rho.dim_a}")
    n = rho.dim_a
    lam = spec.traceless
    t2 = float(np.sum(lam ** 2))
    t4 = float(np.sum(lam ** 4))
    t2sq = t2 * t2

    lv = letters(rho, sqrt_rho)
    denom = n * (n * n - 1)
    first = (n * t2sq - t4) / denom + (n * t4 - t2sq) / denom * lv.b

    coeffs = _finite_coefficients_at(n)
    total = first
    for name in LETTER_NAMES:
        p_val, q_val = coeffs[name]
        total += (t4 * p_val + t2sq * q_val) * lv.get(name)
    return float(total)


# The second moment and the squared mean cancel to the last float digits on
# zero-variance states; anything below this floor is indistinguishable from 0
# in double precision (and would pollute sqrt(variance) at the 1e-8 scale).
VARIANCE_NOISE_FLOOR = 1e-14


def variance(rho: DensityMatrix, spec: Spectrum, sqrt_rho: Optional[np.ndarray] = None) -> float:
    """Haar variance of the skew information: second moment minus avsk^2."""
    mean = avsk(rho, spec, sqrt_rho)
    value = second_moment(rho, spec, sqrt_rho) - mean * mean
    if value < -NEGATIVE_CLAMP:
        raise InvalidParameter(f"variance evaluated to {value:.3e}; inputs are inconsistent")
    return value if value > VARIANCE_NOISE_FLOOR else 0.0


def variance_monte_carlo(
    rho: DensityMatrix, spec: Spectrum, samples: int, seed
) -> tuple[float, float, float, float]:
    """Sampled mean and variance of the skew-information integrand.

    Returns (mean, variance, stderr_mean, stderr_variance); the variance
    standard error uses the usual fourth-central-moment estimate.
    """
    if samples < 2:
        raise InvalidParameter("need at least 2 samples")
    values = skew_samples(rho, spec, samples, seed)
    mean = float(values.mean())
    centered = values - mean
    var = float(np.sum(centered ** 2) / (samples - 1))
    m4 = float(np.mean(centered ** 4))
    se_mean = float(np.sqrt(var / samples))
    se_var = float(np.sqrt(max(m4 - var * var, 0.0) / samples))
    return mean, var, se_mean, se_var


def lqu_bounds(avsk_value: float, variance_value: float) -> tuple[float, float]:
    """Two-sided bounds on the two-qubit LQU from its Haar mean and variance.

    lower = max(0, avsk - sqrt(5 var)); the upper branch switches at
    var = 1/45 from the separable boundary line to the inverted
    (pure quantum)-classical boundary curve.
    """
    if avsk_value < -NEGATIVE_CLAMP or variance_value < -NEGATIVE_CLAMP:
        raise InvalidParameter("avsk and variance must be nonnegative")
    avsk_value = max(avsk_value, 0.0)
    variance_value = max(variance_value, 0.0)
    lower = max(0.0, avsk_value - np.sqrt(5.0 * variance_value))
    if variance_value <= 1.0 / 45.0:
        upper = avsk_value - 0.5 * np.sqrt(5.0 * variance_value)
    else:
        upper = avsk_value - 1.0 / 6.0 - 0.5 * np.sqrt(15.0 * variance_value - 1.0 / 3.0)
    return float(lower), float(upper)


# ---------------------------------------------------------------------------
# Monte Carlo oracles
# ---------------------------------------------------------------------------

def twirl2_monte_carlo(theta: np.ndarray, n: int, samples: int, seed) -> np.ndarray:
    """Direct Haar-sampled estimate of the order-2 twirl, for validation."""
    theta = np.asarray(theta, dtype=complex)
    us = haar_unitaries(n, samples, seed)
    uu = np.einsum("bij,bkl->bikjl", us, us).reshape(samples, n * n, n * n)
    acc = np.einsum("bij,jk,blk->il", uu, theta, uu.conj())
    return acc / samples


def haar_moment4_monte_carlo(i_row, j_row, k_row, l_row, n: int, samples: int, seed) -> tuple[complex, float]:
    """Monte Carlo estimate of a (4,4) moment with its standard error."""
    us = haar_unitaries(n, samples, seed)
    vals = np.ones(samples, dtype=complex)
    for a in range(4):
        vals = vals * us[:, i_row[a] - 1, j_row[a] - 1]
    for a in range(4):
        vals = vals * us[:, l_row[a] - 1, k_row[a] - 1].conj()
    mean = vals.mean()
    se = float(np.sqrt(((np.abs(vals - mean) ** 2).mean()) / samples))
    return complex(mean), se


def second_moment_monte_carlo(rho: DensityMatrix, spec: Spectrum, samples: int, seed) -> tuple[float, float]:
    """Sampled Haar mean of I^2 with standard error."""
    values = skew_samples(rho, spec, samples, seed) ** 2
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(samples))
