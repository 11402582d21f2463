"""Ratio-method estimators for counting sequences.

Inputs stay exact integers; derived columns are :class:`decimal.Decimal`
computed with 50 significant digits and printed with 20.  Undefined entries
(division by zero, missing neighbours) are ``None`` and are never filled in.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

PRECISION = 50
OUTPUT_DIGITS = 20

Number = Union[int, Decimal]


class FixtureError(ValueError):
    pass


@dataclass
class SeriesTable:
    name: str
    offset: int
    values: List[Optional[Number]] = field(default_factory=list)

    @property
    def end(self) -> int:
        """One past the last index."""
        return self.offset + len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, n: int) -> bool:
        return self.offset <= n < self.end and self.values[n - self.offset] is not None

    def __getitem__(self, n: int) -> Optional[Number]:
        if not self.offset <= n < self.end:
            return None
        return self.values[n - self.offset]

    def indices(self) -> range:
        return range(self.offset, self.end)

    def defined(self) -> Iterator[Tuple[int, Number]]:
        for n, v in zip(self.indices(), self.values):
            if v is not None:
                yield n, v

    def tail(self, count: int) -> List[Tuple[int, Number]]:
        return list(self.defined())[-count:]

    def as_dict(self) -> Dict[int, Number]:
        return dict(self.defined())


def _dec(x) -> Decimal:
    if isinstance(x, Decimal):
        return x
    if isinstance(x, float):
        return Decimal(repr(x))
    return Decimal(x)


def _build(name: str, lo: int, hi: int, fn) -> SeriesTable:
    with localcontext() as ctx:
        ctx.prec = PRECISION
        values = [fn(n) for n in range(lo, hi)]
    # trim leading gaps so the table starts where data does
    start = 0
    while start < len(values) and values[start] is None:
        start += 1
    if start == len(values):
        return SeriesTable(name, lo, [])
    return SeriesTable(name, lo + start, values[start:])


def ratios(s: SeriesTable) -> SeriesTable:
    """``r_n = s(n) / s(n-1)``."""

    def r(n):
        a, b = s[n], s[n - 1]
        if a is None or b is None or b == 0:
            return None
        return _dec(a) / _dec(b)

    return _build(f"r[{s.name}]", s.offset + 1, s.end, r)


def exponent_estimators(s: SeriesTable, mu) -> SeriesTable:
    """``g_n = (r_n / mu - 1) n``; for ``s(n) ~ mu^n n^g`` this tends to ``g``."""
    if _dec(mu) <= 0:
        raise ValueError("mu must be positive")
    rs = ratios(s)
    with localcontext() as ctx:
        ctx.prec = PRECISION
        m = _dec(mu)

    def g(n):
        rn = rs[n]
        return None if rn is None else (rn / m - 1) * n

    return _build(f"g[{s.name}]", rs.offset, rs.end, g)


def quadratic_estimators(g: SeriesTable) -> SeriesTable:
    """``q_n = n g_n - (n-1) g_{n-1}``, cancelling the ``1/n`` correction."""

    def q(n):
        a, b = g[n], g[n - 1]
        if a is None or b is None:
            return None
        return n * _dec(a) - (n - 1) * _dec(b)

    return _build(f"q[{g.name}]", g.offset + 1, g.end, q)


def amplitude_ratios(num: SeriesTable, den: SeriesTable, a=0) -> SeriesTable:
    """``num(n) / (n^a den(n))`` on the common index range."""
    lo, hi = max(num.offset, den.offset), min(num.end, den.end)
    power = _dec(a)

    def amp(n):
        x, y = num[n], den[n]
        if x is None or y is None or y == 0 or (n == 0 and power != 0):
            return None
        scale = Decimal(n) ** power if power else Decimal(1)
        return _dec(x) / (scale * _dec(y))

    return _build(f"{num.name}/(n^{a}*{den.name})", lo, max(lo, hi), amp)


def from_function(name: str, fn, lo: int, hi: int) -> SeriesTable:
    """Tabulate ``fn(n)`` for ``lo <= n <= hi``."""
    return SeriesTable(name, lo, [fn(n) for n in range(lo, hi + 1)])


# -- text formats ----------------------------------------------------------------


def format_value(v: Optional[Number]) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    with localcontext() as ctx:
        ctx.prec = OUTPUT_DIGITS
        return format(+v, f".{OUTPUT_DIGITS}g")


def parse_value(text: str) -> Optional[Number]:
    text = text.strip()
    if not text:
        return None
    try:
        return int(text)
    except ValueError:
        return Decimal(text)


def emit_table(*columns: SeriesTable) -> str:
    """CSV with an ``n`` column and one column per table; gaps are empty cells.

    Only rows where at least one column is defined are written.
    """
    if not columns:
        return "n\n"
    lo = min(c.offset for c in columns)
    hi = max(c.end for c in columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n"] + [c.name for c in columns])
    for n in range(lo, hi):
        cells = [c[n] for c in columns]
        if all(v is None for v in cells):
            continue
        w.writerow([n] + [format_value(v) for v in cells])
    return buf.getvalue()


def parse_table(text: str) -> List[SeriesTable]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][0] != "n":
        raise FixtureError("table must start with an 'n' header")
    names = rows[0][1:]
    data = {int(r[0]): [parse_value(x) for x in r[1:]] for r in rows[1:] if r}
    if not data:
        return [SeriesTable(name, 0, []) for name in names]
    lo, hi = min(data), max(data) + 1
    out = []
    for j, name in enumerate(names):
        vals = [data[n][j] if n in data else None for n in range(lo, hi)]
        out.append(_build(name, lo, hi, lambda n, v=vals: v[n - lo]))
    return out


def read_sequence(path: Union[str, os.PathLike], name: Optional[str] = None) -> SeriesTable:
    with open(path) as fh:
        text = fh.read()
    return parse_sequence(text, name or os.path.splitext(os.path.basename(os.fspath(path)))[0])


def parse_sequence(text: str, name: str = "series") -> SeriesTable:
    """Parse a sequence fixture.

    One decimal integer per line, ``#`` comments, and a ``# offset=<n0>``
    header giving the index of the first value.
    """
    offset = None
    values: List[Optional[Number]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("offset="):
                if offset is not None:
                    raise FixtureError(f"line {lineno}: duplicate offset header")
                try:
                    offset = int(body[len("offset="):])
                except ValueError:
                    raise FixtureError(f"line {lineno}: bad offset {body!r}") from None
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise FixtureError(f"line {lineno}: not an integer: {line!r}") from None
    if offset is None:
        raise FixtureError("missing '# offset=<n0>' header")
    if any(v < 0 for v in values):
        raise FixtureError("count sequences must be non-negative")
    return SeriesTable(name, offset, values)


def write_sequence(s: SeriesTable, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"# offset={s.offset}")
    for v in s.values:
        if v is None or not isinstance(v, int):
            raise ValueError("only fully defined integer sequences can be written")
        lines.append(str(v))
    return "\n".join(lines) + "\n"


def estimator_table(
    s: SeriesTable,
    mu,
    reference: Optional[SeriesTable] = None,
    power=0,
) -> str:
    """The standard analysis: ratios, ``g_n``, ``q_n``, and optionally the
    amplitude ratio against ``reference``."""
    g = exponent_estimators(s, mu)
    cols: List[SeriesTable] = [s, ratios(s), g, quadratic_estimators(g)]
    if reference is not None:
        cols.append(amplitude_ratios(s, reference, power))
    return emit_table(*cols)


def power_law(mu, g0, lo: int, hi: int) -> SeriesTable:
    """``mu^n n^-g0`` as high-precision values, for testing estimators."""
    with localcontext() as ctx:
        ctx.prec = PRECISION
        m, e = _dec(mu), _dec(g0)
        vals = [m ** n * Decimal(n) ** (-e) for n in range(lo, hi + 1)]
    return SeriesTable(f"{mu}^n*n^-{g0}", lo, vals)
