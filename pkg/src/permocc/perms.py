"""Sets and multisets of permutations on top of an MZDD.

Permutations are tuples in one-line notation, ``p[t-1] = p(t)``.
``compose(a, b)(t) = a(b(t))``.

Encoding.  A universe for length ``n`` has one variable per pair ``(i, j)``,
``1 <= i < j <= n``, standing for a basis element ``beta(i, j)`` at *level*
``j``.  Every permutation factors uniquely as

    p = beta(i_2, 2) o beta(i_3, 3) o ... o beta(i_n, n)

with at most one factor per level: the factor at the top level ``n`` is fixed
by the position ``i_n = p^-1(n)`` of the largest value (no factor when
``i_n == n``), and the rest is the factorisation of ``p o beta(i_n, n)^-1``,
which fixes ``n``.  Two bases are supported:

* ``"transposition"`` -- ``beta(i, j)`` swaps positions ``i`` and ``j``.
* ``"rotation"`` -- ``beta(i, j)`` moves the entry at position ``j`` to
  position ``i`` and shifts positions ``i..j-1`` one place right.

Variables are ordered by level, highest level at the top of the diagram, and
within a level by ``i`` descending.  A diagram node at level ``j`` with HI
child ``X_hi`` therefore stands for the elements ``x o beta(i, j)``,
``x in X_hi``.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

from .mdd import EMPTY_EDGE, TRUE, Edge, Mode, Multiset, Universe, UniverseMismatch

Permutation = Tuple[int, ...]

BASES = ("transposition", "rotation")


# -- plain permutations -------------------------------------------------------


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(1, len(p) + 1))


def check_permutation(p: Sequence[int]) -> Permutation:
    p = tuple(int(x) for x in p)
    if not is_permutation(p):
        raise ValueError(f"{p} is not a permutation of 1..{len(p)}")
    return p


def identity(n: int) -> Permutation:
    return tuple(range(1, n + 1))


def compose(a: Sequence[int], b: Sequence[int]) -> Permutation:
    """``compose(a, b)(t) = a(b(t))``."""
    if len(a) != len(b):
        raise ValueError(f"cannot compose lengths {len(a)} and {len(b)}")
    return tuple(a[x - 1] for x in b)


def invert(p: Sequence[int]) -> Permutation:
    inv = [0] * len(p)
    for pos, val in enumerate(p, 1):
        inv[val - 1] = pos
    return tuple(inv)


def reverse(p: Sequence[int]) -> Permutation:
    return tuple(reversed(p))


def complement(p: Sequence[int]) -> Permutation:
    n = len(p)
    return tuple(n + 1 - x for x in p)


def extend(p: Sequence[int], n: int) -> Permutation:
    """``p`` followed by the fixed points ``len(p)+1 .. n``."""
    return tuple(p) + tuple(range(len(p) + 1, n + 1))


def trim(p: Sequence[int]) -> Permutation:
    """Drop trailing fixed points."""
    k = len(p)
    while k and p[k - 1] == k:
        k -= 1
    return tuple(p[:k])


def parse_permutation(text: str) -> Permutation:
    """Parse one-line digit form (``1324``) or comma-separated form (``1,3,2,4``)."""
    text = text.strip()
    if "," in text:
        p = [int(x) for x in text.split(",")]
    elif text.isdigit():
        p = [int(c) for c in text]
    else:
        raise ValueError(f"cannot parse permutation {text!r}")
    return check_permutation(p)


def format_permutation(p: Sequence[int]) -> str:
    if len(p) <= 9:
        return "".join(str(x) for x in p)
    return ",".join(str(x) for x in p)


def basis_permutation(kind: str, i: int, j: int, n: int) -> Permutation:
    """One-line form of ``beta(i, j)`` in ``S_n``."""
    if not 1 <= i <= j <= n:
        raise ValueError(f"invalid basis pair ({i}, {j}) for n={n}")
    if kind == "transposition":
        p = list(range(1, n + 1))
        p[i - 1], p[j - 1] = j, i
        return tuple(p)
    if kind == "rotation":
        # p o beta places p(j) at position i and shifts i..j-1 right.
        p = list(range(1, n + 1))
        p[i - 1] = j
        for t in range(i + 1, j + 1):
            p[t - 1] = t - 1
        return tuple(p)
    raise ValueError(f"unknown basis {kind!r}")


# -- the universe -------------------------------------------------------------


class PermUniverse(Universe):
    """MZDD universe whose elements are permutations of ``1..n``."""

    def __init__(self, n: int, basis: str = "transposition", **kwargs):
        if n < 1:
            raise ValueError("n must be at least 1")
        if basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}")
        super().__init__(n * (n - 1) // 2, mode=Mode.MZDD, **kwargs)
        self.n = n
        self.basis = basis
        self._pair: List[Tuple[int, int]] = []
        self._var_of: Dict[Tuple[int, int], int] = {}
        for j in range(n, 1, -1):
            for i in range(j - 1, 0, -1):
                self._var_of[(i, j)] = len(self._pair)
                self._pair.append((i, j))
        # beta[j][i] and its inverse, as permutations of length j; i == j is the identity.
        self._beta: Dict[int, List[Permutation]] = {}
        self._beta_inv: Dict[int, List[Permutation]] = {}
        for j in range(1, n + 1):
            row = [()] + [basis_permutation(basis, i, j, j) for i in range(1, j + 1)]
            self._beta[j] = row
            self._beta_inv[j] = [()] + [invert(b) for b in row[1:]]
        self._compose_cache: Dict[tuple, Edge] = {}
        self._cross_cache: Dict[tuple, Edge] = {}
        self._stats.update(compose_hits=0, compose_misses=0, cross_hits=0, cross_misses=0)

    # -- variables ------------------------------------------------------

    def var_of(self, i: int, j: int) -> int:
        return self._var_of[(i, j)]

    def pair_of(self, var: int) -> Tuple[int, int]:
        return self._pair[var]

    def level(self, node: int) -> int:
        """Level of a node's top variable; terminals sit at level 1."""
        v = self._var[node]
        return self._pair[v][1] if v < self.num_vars else 1

    def clear_caches(self) -> None:
        super().clear_caches()
        self._compose_cache.clear()
        self._cross_cache.clear()

    def cache_stats(self) -> Dict[str, int]:
        stats = super().cache_stats()
        stats["compose_entries"] = len(self._compose_cache)
        stats["cross_entries"] = len(self._cross_cache)
        return stats

    # -- encoding -------------------------------------------------------

    def factors(self, p: Sequence[int]) -> List[Tuple[int, int]]:
        """Canonical factor pairs ``(i, j)`` of ``p``, top level first."""
        p = list(check_permutation(p))
        if len(p) != self.n:
            raise ValueError(f"expected a permutation of length {self.n}")
        out = []
        for m in range(self.n, 1, -1):
            i = p.index(m) + 1
            if i != m:
                out.append((i, m))
                binv = self._beta_inv[m][i]
                p = [p[x - 1] for x in binv] + p[m:]
        return out

    def encode(self, p: Sequence[int]) -> frozenset:
        return frozenset(self._var_of[f] for f in self.factors(p))

    def decode(self, variables: Iterable[int]) -> Permutation:
        by_level: Dict[int, int] = {}
        for v in variables:
            if not 0 <= v < self.num_vars:
                raise ValueError(f"variable {v} outside the universe")
            i, j = self._pair[v]
            if j in by_level:
                raise ValueError(
                    f"not a canonical encoding: two factors at level {j}"
                )
            by_level[j] = i
        p = identity(self.n)
        for j in sorted(by_level):
            p = compose(p, extend(self._beta[j][by_level[j]], self.n))
        return p

    def assignment(self, p: Sequence[int]) -> List[bool]:
        vs = self.encode(p)
        return [v in vs for v in range(self.num_vars)]

    # -- construction ---------------------------------------------------

    def singleton_edge(self, p: Sequence[int]) -> Edge:
        e: Edge = (TRUE, 1)
        for f in reversed(self.factors(p)):
            e = self.make_edge(self._var_of[f], EMPTY_EDGE, e)
        return e

    def _slices(self, e: Edge, level: int) -> List[Edge]:
        """Split ``e`` into ``slices[i]``, the elements carrying factor
        ``beta(i, level)``; ``slices[level]`` holds those without a factor."""
        out = [EMPTY_EDGE] * (level + 1)
        n, m = e
        var, pair = self._var, self._pair
        V = self.num_vars
        while m:
            v = var[n]
            if v >= V or pair[v][1] != level:
                break
            hn, hm = self._hi[n]
            out[pair[v][0]] = (hn, hm * m)
            n, lm = self._lo[n]
            m *= lm
        out[level] = (n, m) if m else EMPTY_EDGE
        return out

    def _level_edge(self, level: int, slices: Sequence[Edge]) -> Edge:
        e = slices[level]
        var_of = self._var_of
        for i in range(1, level):
            s = slices[i]
            if s[1]:
                e = self.make_edge(var_of[(i, level)], e, s)
        return e

    # -- composition with a fixed permutation on the right -----------------

    def compose_right_edge(self, e: Edge, g: Permutation) -> Edge:
        """Edge for ``{x o g : x in e}``; ``g`` is given trimmed of trailing
        fixed points."""
        n, m = e
        if m == 0 or not g:
            return e
        key = (n, g)
        r = self._compose_cache.get(key)
        if r is None:
            self._stats["compose_misses"] += 1
            r = self._compose_right(n, g)
            self._maybe_flush(self._compose_cache)
            self._compose_cache[key] = r
        else:
            self._stats["compose_hits"] += 1
        return (r[0], self._check_mult(r[1] * m))

    def _compose_right(self, node: int, g: Permutation) -> Edge:
        L = max(self.level(node), len(g))
        slices = self._slices((node, 1), L)
        gg = g + tuple(range(len(g) + 1, L + 1))
        ginv = invert(gg)
        beta, beta_inv = self._beta[L], self._beta_inv[L]
        new = [EMPTY_EDGE] * (L + 1)
        for i in range(1, L + 1):
            s = slices[i]
            if not s[1]:
                continue
            iq = ginv[i - 1]
            # x o beta_i o g = (x o sigma) o beta_iq with sigma fixing L
            b = beta[i]
            bi = beta_inv[iq]
            sigma = tuple(b[gg[bi[t] - 1] - 1] for t in range(L))
            new[iq] = self.compose_right_edge(s, trim(sigma))
        return self._level_edge(L, new)

    def compose_right_basis_edge(self, e: Edge, var: int) -> Edge:
        i, j = self._pair[var]
        return self.compose_right_edge(e, trim(self._beta[j][i]))

    # -- products -------------------------------------------------------

    def cross_edge(self, x: Edge, y: Edge) -> Edge:
        """Edge for ``{compose(b, a) : a in x, b in y}``, multiplicities multiplied."""
        xn, xm = x
        yn, ym = y
        if xm == 0 or ym == 0:
            return EMPTY_EDGE
        if xn == TRUE:
            return (yn, self._check_mult(xm * ym))
        key = (xn, yn)
        r = self._cross_cache.get(key)
        if r is None:
            self._stats["cross_misses"] += 1
            v = self._var[xn]
            lo = self.cross_edge(self._lo[xn], (yn, 1))
            hi = self.cross_edge(self._hi[xn], (yn, 1))
            r = self.union_edges(lo, self.compose_right_basis_edge(hi, v))
            self._maybe_flush(self._cross_cache)
            self._cross_cache[key] = r
        else:
            self._stats["cross_hits"] += 1
        return (r[0], self._check_mult(r[1] * xm * ym))

    # -- enumeration ----------------------------------------------------

    def iter_elements(self, e: Edge) -> Iterator[Tuple[Permutation, int]]:
        """Yield ``(permutation, multiplicity)`` for every element of ``e``."""

        def walk(edge: Edge, chosen: List[int]) -> Iterator[Tuple[List[int], int]]:
            n, m = edge
            if m == 0:
                return
            if n == TRUE:
                yield chosen, m
                return
            lo_n, lo_m = self._lo[n]
            hi_n, hi_m = self._hi[n]
            yield from walk((lo_n, lo_m * m), chosen)
            yield from walk((hi_n, hi_m * m), chosen + [self._var[n]])

        for vars_, m in walk(e, []):
            yield self.decode(vars_), m


class ElementCapExceeded(RuntimeError):
    pass


def _universe(x: Multiset) -> PermUniverse:
    u = x.universe
    if not isinstance(u, PermUniverse):
        raise UniverseMismatch("not a permutation universe")
    return u


def singleton(p: Sequence[int], universe: PermUniverse) -> Multiset:
    return Multiset(universe.singleton_edge(p), universe)


def from_permutations(perms: Iterable[Sequence[int]], universe: PermUniverse) -> Multiset:
    """Multiset sum of singletons; repeated permutations accumulate."""
    e = EMPTY_EDGE
    for p in perms:
        e = universe.union_edges(e, universe.singleton_edge(p))
    return Multiset(e, universe)


def compose_right(x: Multiset, g: Sequence[int]) -> Multiset:
    """``{compose(a, g) : a in x}`` for an arbitrary permutation ``g``."""
    u = _universe(x)
    g = check_permutation(g)
    if len(g) > u.n:
        raise ValueError(f"permutation {g} is longer than n={u.n}")
    return Multiset(u.compose_right_edge(x.root, trim(g)), u)


def compose_right_basis(x: Multiset, i: int, j: int) -> Multiset:
    """``{compose(a, beta(i, j)) : a in x}`` for the universe's basis."""
    u = _universe(x)
    return Multiset(u.compose_right_basis_edge(x.root, u.var_of(i, j)), u)


def cross(x: Multiset, y: Multiset) -> Multiset:
    """Product ``x * y = {compose(b, a) : a in x, b in y}``."""
    x._same(y)
    u = _universe(x)
    return Multiset(u.cross_edge(x.root, y.root), u)


def perm_elements(x: Multiset, cap: int = 100_000) -> List[Tuple[Permutation, int]]:
    """All ``(permutation, multiplicity)`` pairs, sorted by permutation."""
    u = _universe(x)
    out = []
    for item in u.iter_elements(x.root):
        if len(out) >= cap:
            raise ElementCapExceeded(f"more than {cap} elements")
        out.append(item)
    return sorted(out)

