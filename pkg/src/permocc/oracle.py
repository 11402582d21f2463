"""Independent ground truth for occurrence counts.

Brute-force enumeration, the closed forms known for the patterns 123 and 132,
and exact expansion of the algebraic generating functions of the 123 class.
Nothing here touches the decision-diagram code.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Sequence

import numpy as np

BRUTE_FORCE_CAP = 9


def count_occurrences(p: Sequence[int], pattern: Sequence[int]) -> int:
    """Number of subsequences of ``p`` order-isomorphic to ``pattern``."""
    k = len(pattern)
    target = tuple(pattern)
    count = 0
    for idx in itertools.combinations(range(len(p)), k):
        vals = [p[i] for i in idx]
        order = sorted(vals)
        if tuple(order.index(v) + 1 for v in vals) == target:
            count += 1
    return count


def _all_permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int8).reshape(-1, n)


def occurrence_counts(perms: np.ndarray, pattern: Sequence[int]) -> np.ndarray:
    """Vectorised :func:`count_occurrences` over the rows of ``perms``."""
    n = perms.shape[1]
    k = len(pattern)
    counts = np.zeros(len(perms), dtype=np.int64)
    # pattern[a] < pattern[b] must agree with the sampled values
    pairs = [(a, b, pattern[a] < pattern[b]) for a in range(k) for b in range(a + 1, k)]
    less = {}
    for a in range(n):
        for b in range(a + 1, n):
            less[a, b] = perms[:, a] < perms[:, b]
    for idx in itertools.combinations(range(n), k):
        hit = np.ones(len(perms), dtype=bool)
        for a, b, want in pairs:
            cmp = less[idx[a], idx[b]]
            hit &= cmp if want else ~cmp
        counts += hit
    return counts


def brute_histogram(n: int, pattern: Sequence[int], cap: int = BRUTE_FORCE_CAP) -> Dict[int, int]:
    """``{r: psi_r(n)}`` by enumerating all ``n!`` permutations."""
    if n > cap:
        raise ValueError(f"brute force limited to n <= {cap}")
    if len(pattern) > n:
        return {0: factorial(n)}
    counts = occurrence_counts(_all_permutations(n), pattern)
    values, tallies = np.unique(counts, return_counts=True)
    return {int(r): int(c) for r, c in zip(values, tallies)}


def catalan(n: int) -> int:
    if n < 0:
        raise ValueError("n must be non-negative")
    return comb(2 * n, n) // (n + 1)


def avoiders_1234(n: int) -> int:
    """psi_0(n) for the pattern 1234, by the binomial sum for increasing-subsequence avoiders."""
    s = sum(
        Fraction(
            2 * comb(2 * k, k) * comb(n, k) ** 2 * (3 * k * k + 2 * k + 1 - n - 2 * n * k),
            (k + 1) ** 2 * (k + 2) * (n - k + 1),
        )
        for k in range(n + 1)
    )
    return int(s)


def _poly(coeffs: Sequence[int], x):
    """Evaluate ``sum coeffs[i] * x**i``."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _ratio(num: int, den: int) -> int:
    q, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"closed form produced a non-integer {num}/{den}")
    return q


# Polynomial numerators for the 123 class, lowest degree first.
P8 = [3 * c for c in [-13063680, 8761152, 1840192, 876878, -219697, 4128, -15602, 1042, 1187]]
P10 = [2 * c for c in [
    -16445721600, 1805846400, 1400051832, 803816948, 190602806,
    35652267, -4824225, 11262, -57936, 68323, 13123,
]]
P12 = [3 * c for c in [
    -9392423040000, -2303171015040, 427865125056, 341897564488,
    104336894932, 20001951630, 4778554443, 963184194, 135476931,
    31717010, 4345001, 783318, 64437,
]]


def _psi123_formula(r: int, n: int) -> int:
    f = factorial
    if r == 0:
        return _ratio(f(2 * n), f(n + 1) * f(n))
    if r == 1:
        return _ratio(6 * f(2 * n - 1), f(n + 3) * f(n - 3))
    if r == 2:
        return _ratio((59 * n * n + 117 * n + 100) * f(2 * n - 2), f(n + 5) * f(n - 4))
    if r == 3:
        num = 4 * n * (113 * n**3 + 506 * n**2 + 937 * n + 1804) * f(2 * n - 3)
        return _ratio(num, f(n + 7) * f(n - 5))
    if r == 4:
        return _ratio(_poly(P8, n) * f(2 * n - 4), f(n + 9) * f(n - 4))
    if r == 5:
        return _ratio(_poly(P10, n) * f(2 * n - 5), f(n + 11) * f(n - 5))
    if r == 6:
        return _ratio(_poly(P12, n) * f(2 * n - 6), f(n + 13) * f(n - 6))
    raise ValueError(f"r={r} unsupported for pattern 123 (r <= 6)")


def _psi132_formula(r: int, n: int) -> int:
    f = factorial
    if r == 0:
        return catalan(n)
    if r == 1:
        return _ratio(f(2 * n - 3), f(n) * f(n - 3))
    if r == 2:
        return _ratio((n**3 + 17 * n**2 - 80 * n + 80) * f(2 * n - 6), f(n) * 2 * f(n - 4))
    if r == 3:
        q = _poly([20160, -22416, 7750, -99, -407, 51, 1], n)
        return _ratio(q * f(2 * n - 9), f(n) * 6 * f(n - 5))
    raise ValueError(f"r={r} unsupported for pattern 132 (r <= 3)")


# First n at which each closed form is valid.  Below it the true value is
# taken from SMALL_N (brute force, frozen); missing entries are 0.
PSI123_VALID_FROM = {0: 0, 1: 3, 2: 4, 3: 5, 4: 4, 5: 5, 6: 6}
PSI132_VALID_FROM = {0: 0, 1: 3, 2: 4, 3: 5}
SMALL_N_123: Dict[tuple, int] = {}
SMALL_N_132: Dict[tuple, int] = {(3, 4): 1}


def psi123_exact(r: int, n: int) -> int:
    """Number of permutations of length ``n`` with exactly ``r`` occurrences of 123."""
    if r not in PSI123_VALID_FROM:
        raise ValueError(f"r={r} unsupported for pattern 123 (r <= 6)")
    if n < PSI123_VALID_FROM[r]:
        return SMALL_N_123.get((r, n), 0)
    return _psi123_formula(r, n)


def psi132_exact(r: int, n: int) -> int:
    """Number of permutations of length ``n`` with exactly ``r`` occurrences of 132."""
    if r not in PSI132_VALID_FROM:
        raise ValueError(f"r={r} unsupported for pattern 132 (r <= 3)")
    if n < PSI132_VALID_FROM[r]:
        return SMALL_N_132.get((r, n), 0)
    return _psi132_formula(r, n)


class RationalSeries(list):
    """Power-series coefficients as exact fractions; index is the power of x."""

    def __init__(self, coeffs=()):
        super().__init__(Fraction(c) for c in coeffs)

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        n = max(len(self), len(other))
        a = list(self) + [Fraction(0)] * (n - len(self))
        for i, c in enumerate(other):
            a[i] += c
        return RationalSeries(a)

    def scaled(self, c) -> "RationalSeries":
        return RationalSeries(c * x for x in self)

    def times(self, poly: Sequence[int], length: int) -> "RationalSeries":
        out = [Fraction(0)] * length
        for i, a in enumerate(poly):
            if a:
                for j in range(min(len(self), length - i)):
                    out[i + j] += a * self[j]
        return RationalSeries(out)

    def shifted_down(self, m: int) -> "RationalSeries":
        """Divide by ``x**m``; the dropped coefficients must vanish."""
        if any(self[:m]):
            raise ArithmeticError(f"series is not divisible by x^{m}")
        return RationalSeries(self[m:])


def binomial_series(alpha: Fraction, length: int) -> RationalSeries:
    """Coefficients of ``(1 - 4x)**alpha``."""
    alpha = Fraction(alpha)
    out = [Fraction(1)]
    for n in range(1, length):
        out.append(out[-1] * (alpha - n + 1) / n * -4)
    return RationalSeries(out)


# 123 class: Psi_r(x) = (P1(x) + sign * P2(x) * sqrt(1 - 4x)) / (2 x^(2r+1)),
# both polynomials lowest degree first.
GF123 = {
    0: ([1], [1], -1),
    1: ([1, -6, 9, -2], [1, -4, 3], -1),
    2: ([1, -8, 20, -17, 7, -5], [1, -6, 10, -5, 3, -1], -1),
    3: ([1, -10, 33, -32, -31, 70, -35, 0, 2], [1, -8, 19, -6, -27, 28, -7, -2], -1),
    4: (
        [1, -12, 50, -65, -107, 437, -588, 492, -314, 108, -3],
        [1, -10, 32, -17, -107, 245, -256, 192, -102, 18, 1],
        -1,
    ),
    5: (
        [1, -14, 71, -126, -176, 1160, -2167, 2282, -1976, 1902, -1608, 824, -153, -2],
        [1, -12, 49, -48, -212, 744, -1057, 956, -860, 838, -600, 212, -13],
        -1,
    ),
    6: (
        [1, -16, 96, -223, -192, 2295, -5493, 6299, -3491, 1098, -2070, 4777, -6187,
         4525, -1486, 93],
        [-1, 14, -70, 107, 312, -1625, 2903, -2473, 925, -436, 1398, -2581, 2687,
         -1439, 260, 1],
        1,
    ),
}


def gf123_series(r: int, N: int) -> RationalSeries:
    """First ``N + 1`` coefficients of the generating function of psi_r(n) for 123."""
    if r not in GF123:
        raise ValueError(f"r={r} unsupported for pattern 123 (r <= 6)")
    if N < 0:
        raise ValueError("N must be non-negative")
    p1, p2, sign = GF123[r]
    shift = 2 * r + 1
    length = N + 1 + shift
    root = binomial_series(Fraction(1, 2), length)
    num = RationalSeries(p1) + root.times(p2, length).scaled(sign)
    return RationalSeries(num.shifted_down(shift)[: N + 1]).scaled(Fraction(1, 2))


def _solve_exact(rows: List[List[Fraction]], rhs: List[Fraction]):
    """Least-effort exact solve of a square or overdetermined consistent system.

    Returns the solution or ``None`` if the system is inconsistent.
    """
    m = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    row = 0
    for col in range(m):
        piv = next((i for i in range(row, len(aug)) if aug[i][col] != 0), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for i in range(len(aug)):
            if i != row and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[row])]
        pivots.append(col)
        row += 1
    if any(all(x == 0 for x in r[:m]) and r[m] != 0 for r in aug):
        return None
    sol = [Fraction(0)] * m
    for i, col in enumerate(pivots):
        sol[col] = aug[i][m]
    return sol


class InsufficientData(ValueError):
    pass


def mv132_fit(r: int, values: Sequence[int]):
    """Fit ``Psi_r(x) = (P1(x) + P2(x) (1-4x)^(1/2-r)) / 2`` with deg P1 = r and
    deg P2 = 2r + 1 to ``values[n] = psi_r(n)``, n = 0, 1, ...

    Returns ``(P1, P2)`` as exact coefficient lists, or ``None`` when no such
    polynomials reproduce every supplied coefficient.
    """
    if not 1 <= r <= 5:
        raise ValueError("the ansatz is fitted for 1 <= r <= 5")
    unknowns = (r + 1) + (2 * r + 2)
    if len(values) <= unknowns:
        raise InsufficientData(
            f"need more than {unknowns} coefficients for r={r}, got {len(values)}"
        )
    N = len(values)
    s = binomial_series(Fraction(1, 2) - r, N)
    rows, rhs = [], []
    for n in range(N):
        row = [Fraction(int(n == i)) for i in range(r + 1)]
        row += [s[n - i] if n >= i else Fraction(0) for i in range(2 * r + 2)]
        rows.append(row)
        rhs.append(Fraction(2 * values[n]))
    sol = _solve_exact(rows, rhs)
    if sol is None:
        return None
    return sol[: r + 1], sol[r + 1:]


def mv132_structure_check(r: int, N: int, values: Sequence[int] | None = None) -> bool:
    """Whether psi_r(0..N) for 132 fits the algebraic ansatz of the 132 class.

    ``values`` defaults to :func:`psi132_exact`.  For ``r == 0`` the check is
    the Catalan identity.
    """
    if values is None:
        values = [psi132_exact(r, n) for n in range(N + 1)]
    values = list(values)[: N + 1]
    if r == 0:
        return all(v == catalan(n) for n, v in enumerate(values))
    return mv132_fit(r, values) is not None
