"""Multiset decision diagrams.

A diagram maps assignments of ``V`` Boolean variables to non-negative integer
multiplicities.  Every reference to a node is an *edge* ``(node, multiplier)``;
evaluating an assignment multiplies the multipliers along the decision path.
Two reduction modes share one engine:

* ``Mode.MZDD`` -- zero-suppressed: a node whose HI edge goes to FALSE is
  never stored, and a skipped variable that is set true yields multiplicity 0.
* ``Mode.MBDD`` -- ordinary reduction: a node whose two edges are identical is
  never stored, and skipped variables are don't-cares.

Nodes are hash-consed in an append-only store, so children always have
smaller ids than their parents and the id order is a topological order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

FALSE = 0
TRUE = 1

Edge = Tuple[int, int]
EMPTY_EDGE: Edge = (FALSE, 0)

MAX_MULTIPLIER = 2**63 - 1


class Mode(enum.Enum):
    MBDD = "mbdd"
    MZDD = "mzdd"


class NodeBudgetExceeded(MemoryError):
    """Raised when a universe would grow beyond its configured node budget."""

    def __init__(self, budget: int, node_count: int):
        super().__init__(
            f"node budget of {budget} exceeded ({node_count} nodes stored)"
        )
        self.budget = budget
        self.node_count = node_count


class UniverseMismatch(ValueError):
    pass


class Universe:
    """Node store, unique table and operation caches for one variable set.

    A universe is not thread safe; run independent universes in parallel
    instead.
    """

    def __init__(
        self,
        num_vars: int,
        mode: Mode | str = Mode.MZDD,
        max_multiplier: int = MAX_MULTIPLIER,
        node_budget: int | None = None,
        cache_limit: int = 4_000_000,
    ):
        if num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        self.num_vars = num_vars
        self.mode = Mode(mode)
        self.max_multiplier = max_multiplier
        self.node_budget = node_budget
        self.cache_limit = cache_limit
        # rows 0 and 1 are the terminals; their variable is V.
        self._var: List[int] = [num_vars, num_vars]
        self._lo: List[Edge] = [EMPTY_EDGE, EMPTY_EDGE]
        self._hi: List[Edge] = [EMPTY_EDGE, EMPTY_EDGE]
        self._unique: Dict[tuple, int] = {}
        self._union_cache: Dict[tuple, Edge] = {}
        self._stats = {"union_hits": 0, "union_misses": 0, "flushes": 0}

    # -- primitive access -------------------------------------------------

    def var(self, node: int) -> int:
        return self._var[node]

    def lo(self, node: int) -> Edge:
        return self._lo[node]

    def hi(self, node: int) -> Edge:
        return self._hi[node]

    @property
    def size(self) -> int:
        """Number of stored non-terminal nodes."""
        return len(self._var) - 2

    def _check_mult(self, m: int) -> int:
        if m > self.max_multiplier:
            raise OverflowError(
                f"edge multiplier {m} exceeds the configured maximum "
                f"{self.max_multiplier}"
            )
        return m

    def make_edge(self, var: int, lo: Edge, hi: Edge) -> Edge:
        """Return the canonical edge for the row ``(var, lo, hi)``."""
        lo_n, lo_m = lo
        hi_n, hi_m = hi
        if self.mode is Mode.MZDD:
            if hi_m == 0:
                return lo
        elif lo_n == hi_n and lo_m == hi_m:
            return lo
        g = gcd(lo_m, hi_m)
        if g != 1:
            lo_m //= g
            hi_m //= g
        key = (var, lo_n, lo_m, hi_n, hi_m)
        node = self._unique.get(key)
        if node is None:
            if not (var < self._var[lo_n] and var < self._var[hi_n]):
                raise ValueError(
                    f"variable order violated: {var} above "
                    f"{self._var[lo_n]}/{self._var[hi_n]}"
                )
            node = len(self._var)
            if self.node_budget is not None and node - 2 >= self.node_budget:
                raise NodeBudgetExceeded(self.node_budget, node - 2)
            self._var.append(var)
            self._lo.append((lo_n, lo_m))
            self._hi.append((hi_n, hi_m))
            self._unique[key] = node
        return (node, g)

    def cofactors(self, edge: Edge, var: int) -> Tuple[Edge, Edge]:
        """LO and HI restrictions of ``edge`` with respect to ``var``.

        ``var`` must not lie below the edge's top variable.
        """
        n, m = edge
        if self._var[n] == var:
            lo_n, lo_m = self._lo[n]
            hi_n, hi_m = self._hi[n]
            return (lo_n, lo_m * m), (hi_n, hi_m * m)
        if self.mode is Mode.MZDD:
            return edge, EMPTY_EDGE
        return edge, edge

    # -- caches -----------------------------------------------------------

    def _maybe_flush(self, cache: dict) -> None:
        if len(cache) >= self.cache_limit:
            cache.clear()
            self._stats["flushes"] += 1

    def clear_caches(self) -> None:
        self._union_cache.clear()

    def cache_stats(self) -> Dict[str, int]:
        stats = dict(self._stats)
        stats["union_entries"] = len(self._union_cache)
        stats["nodes"] = self.size
        return stats

    # -- set algebra on edges ----------------------------------------------

    def union_edges(self, a: Edge, b: Edge) -> Edge:
        an, am = a
        bn, bm = b
        if am == 0:
            return b
        if bm == 0:
            return a
        if an == bn:
            return (an, self._check_mult(am + bm))
        g = gcd(am, bm)
        if g != 1:
            am //= g
            bm //= g
        if an > bn:
            an, am, bn, bm = bn, bm, an, am
        key = (an, am, bn, bm)
        r = self._union_cache.get(key)
        if r is None:
            self._stats["union_misses"] += 1
            v = min(self._var[an], self._var[bn])
            alo, ahi = self.cofactors((an, am), v)
            blo, bhi = self.cofactors((bn, bm), v)
            r = self.make_edge(v, self.union_edges(alo, blo), self.union_edges(ahi, bhi))
            self._maybe_flush(self._union_cache)
            self._union_cache[key] = r
        else:
            self._stats["union_hits"] += 1
        return (r[0], self._check_mult(r[1] * g))

    def scale_edge(self, e: Edge, c: int) -> Edge:
        if c < 1:
            raise ValueError("scale factor must be a positive integer")
        if e[1] == 0:
            return e
        return (e[0], self._check_mult(e[1] * c))

    # -- traversal --------------------------------------------------------

    def reachable(self, roots: Iterable[Edge]) -> List[int]:
        """Non-terminal nodes reachable from ``roots``, in ascending id order."""
        seen = set()
        stack = [n for n, m in roots if n > TRUE and m != 0]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            for c, _ in (self._lo[n], self._hi[n]):
                if c > TRUE and c not in seen:
                    stack.append(c)
        return sorted(seen)

    def evaluate_edge(self, e: Edge, assignment: Sequence[bool]) -> int:
        if len(assignment) != self.num_vars:
            raise ValueError(
                f"assignment has {len(assignment)} values, expected {self.num_vars}"
            )
        n, m = e
        i = 0
        zdd = self.mode is Mode.MZDD
        while m and n > TRUE:
            v = self._var[n]
            if zdd and any(assignment[i:v]):
                return 0
            nn, mm = self._hi[n] if assignment[v] else self._lo[n]
            n, m, i = nn, m * mm, v + 1
        if n == FALSE:
            return 0
        if zdd and any(assignment[i:]):
            return 0
        return m

    def cardinality_edge(self, e: Edge) -> int:
        """Sum of multiplicities over all assignments."""
        zdd = self.mode is Mode.MZDD
        count: Dict[int, int] = {FALSE: 0, TRUE: 1}

        def child(edge: Edge, below: int) -> int:
            c, cm = edge
            val = cm * count[c]
            if not zdd:
                val <<= self._var[c] - below
            return val

        for n in self.reachable([e]):
            v = self._var[n]
            count[n] = child(self._lo[n], v + 1) + child(self._hi[n], v + 1)
        return child(e, 0)

    def histogram_edge(self, e: Edge, check: bool = False) -> Dict[int, int]:
        """Number of assignments having each multiplicity.

        Bottom-up pass over the node table computing, per row, the array
        ``G`` of counts by multiplicity for the variables at and below the
        row.  The multiplicity-zero bucket is not carried during the pass;
        it is reconstructed from the total ``2**V`` at the end.  With
        ``check`` the conservation of every ``G`` and ``H`` is asserted.
        """
        V = self.num_vars
        zdd = self.mode is Mode.MZDD
        dtype = np.int64 if V < 62 else object
        order = self.reachable([e])
        # parents outstanding, so G arrays can be released early
        pending: Dict[int, int] = {}
        for n in order:
            for c, _ in (self._lo[n], self._hi[n]):
                if c > TRUE:
                    pending[c] = pending.get(c, 0) + 1
        G: Dict[int, np.ndarray] = {
            FALSE: np.zeros(1, dtype=dtype),
            TRUE: np.array([0, 1], dtype=dtype),
        }

        def H(edge: Edge, i: int) -> np.ndarray:
            r, m = edge
            g = G[r]
            if m == 0 or len(g) == 1:
                return np.zeros(1, dtype=dtype)
            out = np.zeros(m * (len(g) - 1) + 1, dtype=dtype)
            out[::m] = g
            out[0] = 0
            if not zdd:
                shift = self._var[r] - i
                out *= 2**shift if dtype is object else np.int64(1 << shift)
            if check:
                total = int(out.sum())
                assert total <= 2 ** (V - i), "H exceeds its assignment space"
            return out

        def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
            if len(a) < len(b):
                a, b = b, a
            a = a.copy()
            a[: len(b)] += b
            return a

        for n in order:
            v = self._var[n]
            lo, hi = self._lo[n], self._hi[n]
            G[n] = add(H(lo, v + 1), H(hi, v + 1))
            if check:
                assert int(G[n].sum()) <= 2 ** (V - v), "G exceeds its assignment space"
            for c, _ in (lo, hi):
                if c > TRUE:
                    pending[c] -= 1
                    if pending[c] == 0 and c != e[0]:
                        del G[c]
        top = H(e, 0)
        hist = {j: int(c) for j, c in enumerate(top) if c and j}
        zero = 2**V - sum(hist.values())
        if check:
            assert zero >= 0
        if zero:
            hist[0] = zero
        return dict(sorted(hist.items()))

    # -- debugging --------------------------------------------------------

    def dump_edge(self, e: Edge) -> str:
        """Row table in the ``row <id>: var=<v> lo=(<ref>,<m>) hi=(<ref>,<m>)`` layout."""

        def ref(n: int) -> str:
            return {FALSE: "F", TRUE: "T"}.get(n, str(n))

        lines = []
        for n in reversed(self.reachable([e])):
            (ln, lm), (hn, hm) = self._lo[n], self._hi[n]
            lines.append(
                f"row {n}: var={self._var[n]} lo=({ref(ln)},{lm}) hi=({ref(hn)},{hm})"
            )
        lines.append(f"root=({ref(e[0])},{e[1]})")
        return "\n".join(lines)

    def check_canonical(self, e: Edge) -> None:
        """Assert the storage rules on every node reachable from ``e``."""
        zdd = self.mode is Mode.MZDD
        for n in self.reachable([e]):
            v = self._var[n]
            (ln, lm), (hn, hm) = self._lo[n], self._hi[n]
            assert gcd(lm, hm) == 1, f"row {n} violates the gcd rule"
            for c, cm in ((ln, lm), (hn, hm)):
                assert (c == FALSE) == (cm == 0), f"row {n} has a bad FALSE edge"
                assert self._var[c] > v, f"row {n} violates the variable order"
            if zdd:
                assert hn != FALSE, f"row {n} should have been zero-suppressed"
            else:
                assert (ln, lm) != (hn, hm), f"row {n} is redundant"
        n, m = e
        assert (n == FALSE) == (m == 0)


@dataclass(frozen=True)
class Multiset:
    """Handle to a multiset: a root edge inside a universe."""

    root: Edge
    universe: Universe

    def _same(self, other: "Multiset") -> None:
        if other.universe is not self.universe:
            raise UniverseMismatch("operands belong to different universes")

    def __add__(self, other: "Multiset") -> "Multiset":
        return union(self, other)

    def __mul__(self, c: int) -> "Multiset":
        return scale(self, c)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self.universe is other.universe and self.root == other.root

    def __hash__(self) -> int:
        return hash((id(self.universe), self.root))

    def __call__(self, assignment: Sequence[bool]) -> int:
        return evaluate(self, assignment)

    def __repr__(self) -> str:
        return f"Multiset(root={self.root}, nodes={node_count(self)})"


def make_base(universe: Universe) -> Multiset:
    """The multiset whose only element is the all-false assignment."""
    return Multiset((TRUE, 1), universe)


def make_empty(universe: Universe) -> Multiset:
    return Multiset(EMPTY_EDGE, universe)


def make_edge(universe: Universe, var: int, lo: Edge, hi: Edge) -> Edge:
    return universe.make_edge(var, lo, hi)


def union(x: Multiset, y: Multiset) -> Multiset:
    """Multiset sum: multiplicities add."""
    x._same(y)
    return Multiset(x.universe.union_edges(x.root, y.root), x.universe)


def scale(x: Multiset, c: int) -> Multiset:
    return Multiset(x.universe.scale_edge(x.root, c), x.universe)


def evaluate(x: Multiset, assignment: Sequence[bool]) -> int:
    return x.universe.evaluate_edge(x.root, assignment)


def cardinality_sum(x: Multiset) -> int:
    return x.universe.cardinality_edge(x.root)


def multiplicity_histogram(x: Multiset, check: bool = False) -> Dict[int, int]:
    return x.universe.histogram_edge(x.root, check=check)


def node_count(x: Multiset) -> int:
    return len(x.universe.reachable([x.root]))


def cache_stats(universe: Universe) -> Dict[str, int]:
    return universe.cache_stats()


def dump(x: Multiset) -> str:
    return x.universe.dump_edge(x.root)


def from_rows(
    universe: Universe,
    rows: Sequence[Tuple[int, Edge, Edge]],
    root: Edge,
) -> Multiset:
    """Build a diagram from an explicit row table.

    ``rows`` lists ``(var, lo, hi)`` with edges whose references are either
    terminals (0, 1) or ``2 + index`` into ``rows``; rows must be given
    children first, as in a topologically sorted table.  Rows are passed
    through :meth:`Universe.make_edge`, so the result is canonical even if the
    table is not.
    """
    built: List[Edge] = []

    def resolve(e: Edge) -> Edge:
        r, m = e
        if m == 0 or r == FALSE:
            return EMPTY_EDGE
        if r == TRUE:
            return (r, m)
        n, k = built[r - 2]
        return (n, k * m) if m else EMPTY_EDGE

    for var, lo, hi in rows:
        built.append(universe.make_edge(var, resolve(lo), resolve(hi)))
    return Multiset(resolve(root), universe)


def from_assignments(
    universe: Universe,
    items: Iterable[Tuple[Sequence[bool], int]],
) -> Multiset:
    """Sum of point multisets, one per ``(assignment, multiplicity)`` pair."""
    u = universe
    acc = EMPTY_EDGE
    for bits, m in items:
        if len(bits) != u.num_vars:
            raise ValueError(f"assignment has {len(bits)} values, expected {u.num_vars}")
        if m == 0:
            continue
        e: Edge = (TRUE, u._check_mult(m))
        for v in reversed(range(u.num_vars)):
            if bits[v]:
                e = u.make_edge(v, EMPTY_EDGE, e)
            elif u.mode is Mode.MBDD:
                e = u.make_edge(v, e, EMPTY_EDGE)
        acc = u.union_edges(acc, e)
    return Multiset(acc, u)
