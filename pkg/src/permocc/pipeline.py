"""Occurrence counting by multiset products of permutation sets.

For a pattern ``tau`` of length ``k`` and length ``n`` three sets are built:

* ``A`` -- permutations whose first ``k`` entries increase (``n!/k!`` of them);
* ``B`` -- the single permutation ``tau`` followed by ``k+1 .. n``;
* ``C`` -- for every ``k``-subset ``S`` of positions, the permutation carrying
  values ``1..k`` to the positions of ``S`` in order and ``k+1..n`` to the
  remaining positions in order.

In the multiset product ``C x B x A`` every permutation appears once per
occurrence of ``tau``, so the histogram of multiplicities gives ``psi_r(n)``
for ``r >= 1``; ``psi_0(n)`` is what is left of ``n!``.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Dict, Iterable, List, Sequence, Tuple

from .mdd import TRUE, Multiset, NodeBudgetExceeded, multiplicity_histogram, node_count
from .perms import (
    Permutation,
    PermUniverse,
    check_permutation,
    cross,
    extend,
    format_permutation,
    from_permutations,
    invert,
    parse_permutation,
)

log = logging.getLogger(__name__)

# Rough resident cost of one stored node including unique-table and cache
# entries, used to turn a byte budget into a node budget.
BYTES_PER_NODE = 450

WILF_CLASSES_3 = (
    ("123", "321"),
    ("132", "213", "231", "312"),
)

WILF_CLASSES_4 = (
    ("1234", "4321"),
    ("1243", "2134", "3421", "4312"),
    ("1432", "2341", "3214", "4123"),
    ("2143", "3412"),
    ("1324", "4231"),
    ("1342", "1423", "2314", "2431", "3124", "3241", "4132", "4213"),
    ("2413", "3142"),
)


class IdentityViolation(AssertionError):
    pass


@dataclass(frozen=True)
class PatternJob:
    n: int
    pattern: Permutation

    def __post_init__(self):
        pattern = check_permutation(self.pattern)
        object.__setattr__(self, "pattern", pattern)
        if not 1 <= len(pattern) <= self.n:
            raise ValueError(
                f"pattern length {len(pattern)} must lie in 1..n (n={self.n})"
            )

    @property
    def k(self) -> int:
        return len(self.pattern)


@dataclass
class PsiTable:
    n: int
    pattern: Permutation
    psi: Dict[int, int] = field(default_factory=dict)
    node_count: int = 0

    def __getitem__(self, r: int) -> int:
        return self.psi.get(r, 0)

    def check(self) -> None:
        """Raise :class:`IdentityViolation` unless both counting identities hold."""
        n, k = self.n, len(self.pattern)
        total = sum(self.psi.values())
        if total != factorial(n):
            raise IdentityViolation(f"sum of psi_r({n}) is {total}, expected {n}!")
        if any(v < 0 for v in self.psi.values()):
            raise IdentityViolation("negative count in psi table")
        if k <= n:
            weighted = sum(r * v for r, v in self.psi.items())
            expected = factorial(n) * comb(n, k) // factorial(k)
            if weighted != expected:
                raise IdentityViolation(
                    f"sum of r*psi_r({n}) is {weighted}, expected {expected}"
                )
        if any(r > comb(n, k) and v for r, v in self.psi.items()):
            raise IdentityViolation("occurrence count beyond C(n, k)")

    def rows(self) -> List[Tuple[int, str, int, int]]:
        pat = format_permutation(self.pattern)
        return [(self.n, pat, r, v) for r, v in sorted(self.psi.items())]

    def to_csv(self, header: bool = True) -> str:
        return tables_to_csv([self], header=header)


def tables_to_csv(tables: Iterable[PsiTable], header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(["n", "pattern", "r", "psi"])
    for t in tables:
        w.writerows(t.rows())
    return buf.getvalue()


def read_psi_csv(text: str) -> List[PsiTable]:
    tables: Dict[Tuple[int, Permutation], PsiTable] = {}
    for row in csv.DictReader(io.StringIO(text)):
        n, pat = int(row["n"]), parse_permutation(row["pattern"])
        t = tables.setdefault((n, pat), PsiTable(n, pat))
        t.psi[int(row["r"])] = int(row["psi"])
    return list(tables.values())


# -- the three sets -------------------------------------------------------------


def _shuffle_inverse(n: int, S: Sequence[int]) -> Permutation:
    """The element of C for the position set ``S``."""
    k = len(S)
    c = [0] * n
    rest = [x for x in range(1, n + 1) if x not in set(S)]
    for v, pos in enumerate(S, 1):
        c[pos - 1] = v
    for v, pos in enumerate(rest, k + 1):
        c[pos - 1] = v
    return tuple(c)


def build_C(n: int, k: int, universe: PermUniverse) -> Multiset:
    return from_permutations(
        (_shuffle_inverse(n, S) for S in itertools.combinations(range(1, n + 1), k)),
        universe,
    )


def build_shuffles(n: int, k: int, universe: PermUniverse) -> Multiset:
    """Permutations whose first ``k`` and last ``n - k`` entries both increase."""
    return from_permutations(
        (invert(_shuffle_inverse(n, S)) for S in itertools.combinations(range(1, n + 1), k)),
        universe,
    )


def build_tail(n: int, k: int, universe: PermUniverse) -> Multiset:
    """All permutations fixing positions ``1..k``: one union of basis compositions
    per level."""
    u = universe
    t = (TRUE, 1)
    for j in range(k + 2, n + 1):
        acc = t
        for i in range(k + 1, j):
            acc = u.union_edges(acc, u.compose_right_basis_edge(t, u.var_of(i, j)))
        t = acc
    return Multiset(t, u)


def build_A(n: int, k: int, universe: PermUniverse) -> Multiset:
    """Permutations whose first ``k`` entries increase.

    Every such permutation is uniquely ``shuffle o tail`` with ``tail``
    rearranging positions ``k+1..n``.
    """
    return cross(build_tail(n, k, universe), build_shuffles(n, k, universe))


def build_B(n: int, k: int, pattern: Sequence[int], universe: PermUniverse) -> Multiset:
    pattern = check_permutation(pattern)
    if len(pattern) != k:
        raise ValueError(f"pattern {pattern} does not have length {k}")
    return from_permutations([extend(pattern, n)], universe)


def occurrence_diagram(
    job: PatternJob,
    basis: str = "transposition",
    node_budget: int | None = None,
    universe: PermUniverse | None = None,
) -> Multiset:
    """``C x (B x A)``: each permutation with multiplicity equal to its number
    of occurrences of the pattern."""
    u = universe or PermUniverse(job.n, basis, node_budget=node_budget)
    try:
        A = build_A(job.n, job.k, u)
        BA = cross(build_B(job.n, job.k, job.pattern, u), A)
        C = build_C(job.n, job.k, u)
        result = cross(C, BA)
    except NodeBudgetExceeded as exc:
        log.error(
            "n=%d pattern=%s aborted: %s; caches %s",
            job.n, format_permutation(job.pattern), exc, u.cache_stats(),
        )
        raise
    u.clear_caches()
    return result


def psi_table(
    job: PatternJob,
    basis: str = "transposition",
    node_budget: int | None = None,
) -> PsiTable:
    diagram = occurrence_diagram(job, basis=basis, node_budget=node_budget)
    hist = multiplicity_histogram(diagram)
    psi = {r: c for r, c in hist.items() if r >= 1 and c}
    # the 0-bucket also counts assignments that encode no permutation
    psi[0] = factorial(job.n) - sum(psi.values())
    table = PsiTable(job.n, job.pattern, dict(sorted(psi.items())), node_count(diagram))
    table.check()
    return table


def count(n: int, pattern: Sequence[int], **kwargs) -> PsiTable:
    """:func:`psi_table` that also accepts patterns longer than ``n``."""
    pattern = check_permutation(pattern)
    if len(pattern) > n:
        table = PsiTable(n, pattern, {0: factorial(n)})
        table.check()
        return table
    return psi_table(PatternJob(n, pattern), **kwargs)


def _run(args) -> PsiTable:
    n, pattern, kwargs = args
    return count(n, pattern, **kwargs)


def run_jobs(
    jobs: Sequence[Tuple[int, Sequence[int]]],
    workers: int = 1,
    **kwargs,
) -> List[PsiTable]:
    """Compute many ``(n, pattern)`` tables, optionally in worker processes.

    Each job owns its own universe; with ``workers > 1`` any ``node_budget``
    applies per worker.
    """
    payload = [(n, tuple(p), kwargs) for n, p in jobs]
    if workers <= 1 or len(payload) <= 1:
        return [_run(a) for a in payload]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run, payload))


def wilf_classes(
    k: int,
    n_max: int,
    workers: int = 1,
    **kwargs,
) -> List[Tuple[str, ...]]:
    """Group the patterns of length ``k`` by their psi tables for all ``n <= n_max``.

    Classes are sorted internally and by first member.
    """
    patterns = list(itertools.permutations(range(1, k + 1)))
    ns = list(range(k, n_max + 1))
    jobs = [(n, p) for p in patterns for n in ns]
    tables = run_jobs(jobs, workers=workers, **kwargs)
    signature: Dict[Permutation, List] = {p: [] for p in patterns}
    for t in tables:
        signature[t.pattern].append((t.n, tuple(sorted(t.psi.items()))))
    groups: Dict[tuple, List[str]] = {}
    for p in patterns:
        groups.setdefault(tuple(sorted(signature[p])), []).append(format_permutation(p))
    return sorted(tuple(sorted(g)) for g in groups.values())


def reference_classes(k: int) -> List[Tuple[str, ...]]:
    """The reference partitions for ``k`` in {3, 4}, normalised like :func:`wilf_classes`."""
    ref = {3: WILF_CLASSES_3, 4: WILF_CLASSES_4}[k]
    return sorted(tuple(sorted(c)) for c in ref)
