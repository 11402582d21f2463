"""Command-line front end: ``permocc {count,verify,wilf,analyze,formulas}``."""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import re
import sys
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import fixtures, oracle, pipeline, series
from .mdd import NodeBudgetExceeded
from .perms import BASES, Permutation, format_permutation, parse_permutation

log = logging.getLogger("permocc")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

MEM_FLOOR = 64 * 2**20
CLASS_V_MU = "11.598"
ROMAN = ("I", "II", "III", "IV", "V", "VI", "VII")


class UsageError(ValueError):
    pass


def parse_size(text: str) -> int:
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([kKmMgGtT]?)i?[bB]?\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad size {text!r}")
    scale = {"": 1, "k": 2**10, "m": 2**20, "g": 2**30, "t": 2**40}[m.group(2).lower()]
    return int(float(m.group(1)) * scale)


def _pattern(text: str) -> Permutation:
    try:
        return parse_permutation(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


@dataclass
class RunConfig:
    command: str
    patterns: List[Permutation] = field(default_factory=list)
    n: Optional[int] = None
    max_n: Optional[int] = None
    r: Optional[int] = None
    mu: str = CLASS_V_MU
    power: str = "0"
    mem_cap: Optional[int] = None
    threads: int = 1
    out: Optional[str] = None
    fixtures: Optional[str] = None
    basis: str = "transposition"
    k: int = 4
    sequence: Optional[str] = None
    reference: Optional[str] = None

    def __post_init__(self):
        if self.mem_cap is not None and self.mem_cap < MEM_FLOOR:
            raise UsageError(f"--mem-cap must be at least {MEM_FLOOR} bytes")
        for name in ("n", "max_n"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be >= 1")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        kw = {k: v for k, v in vars(ns).items() if k in cls.__dataclass_fields__ and v is not None}
        if getattr(ns, "pattern", None):
            kw["patterns"] = list(ns.pattern)
        return cls(command=ns.command, **{k: v for k, v in kw.items() if k != "command"})

    def node_budget(self) -> Optional[int]:
        """Per-worker node budget derived from the global memory cap."""
        if self.mem_cap is None:
            return None
        return max(1, self.mem_cap // (pipeline.BYTES_PER_NODE * self.threads))

    def n_range(self) -> List[int]:
        if self.max_n is not None:
            return list(range(self.n or 1, self.max_n + 1))
        if self.n is None:
            raise UsageError("give --n or --max-n")
        return [self.n]

    def pipeline_kwargs(self) -> dict:
        return {"basis": self.basis, "node_budget": self.node_budget()}


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out and cfg.out != "-":
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_count(cfg: RunConfig) -> int:
    if not cfg.patterns:
        raise UsageError("count needs --pattern")
    jobs = [(n, p) for p in cfg.patterns for n in cfg.n_range()]
    try:
        tables = pipeline.run_jobs(jobs, workers=cfg.threads, **cfg.pipeline_kwargs())
    except NodeBudgetExceeded as exc:
        print(f"error: resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    _emit(cfg, pipeline.tables_to_csv(tables))
    return EXIT_OK


# -- verify ---------------------------------------------------------------------


class _Tables:
    """Memoised pipeline runs shared between verification checks."""

    def __init__(self, kwargs: dict):
        self.kwargs = kwargs
        self._cache: Dict[Tuple[int, Permutation], pipeline.PsiTable] = {}

    def __call__(self, n: int, pattern: Sequence[int]) -> pipeline.PsiTable:
        key = (n, tuple(pattern))
        if key not in self._cache:
            self._cache[key] = pipeline.count(n, pattern, **self.kwargs)
        return self._cache[key]


def verification_checks(cfg: RunConfig) -> List[Tuple[str, Callable[[], str]]]:
    """Named checks; each returns a detail string or raises ``AssertionError``."""
    d = cfg.fixtures
    max_n = cfg.max_n or 8
    tables = _Tables(cfg.pipeline_kwargs())
    checks: List[Tuple[str, Callable[[], str]]] = []

    def integrity():
        bad = [f"{name}: {why}" for name, ok, why in fixtures.integrity(d) if not ok]
        assert not bad, "; ".join(bad)
        return f"{len(fixtures.manifest(d))} files"

    checks.append(("fixture integrity", integrity))

    def avoiders():
        s = fixtures.load("A005802_prefix", d)
        bad = [n for n, v in s.defined() if v != oracle.avoiders_1234(n)]
        assert not bad, f"differs from closed form at n={bad}"
        return f"n={s.offset}..{s.end - 1}"

    checks.append(("A005802 fixture vs closed form", avoiders))

    def extension_column():
        s = fixtures.load("ext_1234_r1_exact", d)
        rs = [v for _, v in series.ratios(s).defined()]
        assert all(7 < x < 9 for x in rs), "ratios outside (7, 9)"
        assert all(a < b for a, b in zip(rs, rs[1:])), "ratios not increasing"
        amp = series.amplitude_ratios(s, fixtures.load("A005802_prefix", d))
        vals = [float(v) for _, v in amp.defined()]
        assert all(0.5 < v < 1 for v in vals), "psi_1/psi_0 outside (0.5, 1)"
        return f"{len(s)} terms, ratio {float(rs[-1]):.4f} at n={s.end - 1}"

    checks.append(("1234 r=1 extension column plausibility", extension_column))

    def sweep():
        runs = 0
        for k in (3, 4):
            for p in itertools.permutations(range(1, k + 1)):
                for n in range(1, min(max_n, oracle.BRUTE_FORCE_CAP) + 1):
                    got = {r: c for r, c in tables(n, p).psi.items() if c}
                    want = {r: c for r, c in oracle.brute_histogram(n, p).items() if c}
                    assert got == want, f"{format_permutation(p)} n={n}"
                    runs += 1
        return f"{runs} tables, identities held on each"

    checks.append((f"oracle sweep n<={min(max_n, oracle.BRUTE_FORCE_CAP)}", sweep))

    def closed_forms():
        for pat, fn, rmax in (((1, 2, 3), oracle.psi123_exact, 6), ((1, 3, 2), oracle.psi132_exact, 3)):
            for n in range(1, max_n + 1):
                t = tables(n, pat)
                for r in range(rmax + 1):
                    assert t[r] == fn(r, n), f"{format_permutation(pat)} r={r} n={n}"
        return f"123 r<=6, 132 r<=3, n<={max_n}"

    checks.append(("closed forms", closed_forms))

    for name, info in sorted(fixtures.manifest(d).items()):
        if info.pattern is None or info.name.startswith("ext_"):
            continue

        def match(info=info):
            s = fixtures.load(info.name, d)
            pat = parse_permutation(info.pattern)
            hi = min(max_n, s.end - 1)
            for n in range(max(1, s.offset), hi + 1):
                got = tables(n, pat)[info.r]
                assert got == s[n], f"n={n}: pipeline {got}, fixture {s[n]}"
            return f"n<={hi}"

        checks.append((f"fixture {name} ({info.pattern}, r={info.r})", match))

    def wilf3():
        got = pipeline.wilf_classes(3, max(max_n, 6), **cfg.pipeline_kwargs())
        assert got == pipeline.reference_classes(3), f"got {got}"
        return f"{len(got)} classes"

    checks.append(("Wilf classes k=3", wilf3))
    return checks


def cmd_verify(cfg: RunConfig) -> int:
    try:
        checks = verification_checks(cfg)
    except fixtures.MissingFixtures as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failed = 0
    lines = []
    for name, fn in checks:
        try:
            detail = fn()
            lines.append(f"PASS {name}: {detail}")
        except (AssertionError, NodeBudgetExceeded) as exc:
            failed += 1
            lines.append(f"FAIL {name}: {exc}")
        print(lines[-1], file=sys.stderr if cfg.out in (None, "-") else sys.stdout, flush=True)
    summary = f"{len(checks) - failed}/{len(checks)} checks passed"
    lines.append(summary)
    if cfg.out and cfg.out != "-":
        _emit(cfg, "\n".join(lines) + "\n")
    print(summary, file=sys.stderr)
    return EXIT_OK if not failed else EXIT_FAIL


# -- wilf, analyze, formulas ----------------------------------------------------


def cmd_wilf(cfg: RunConfig) -> int:
    if cfg.k not in (3, 4):
        raise UsageError("--k must be 3 or 4")
    max_n = cfg.max_n or cfg.k + 5
    try:
        classes = pipeline.wilf_classes(cfg.k, max_n, workers=cfg.threads, **cfg.pipeline_kwargs())
    except NodeBudgetExceeded as exc:
        print(f"error: resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    ref = pipeline.reference_classes(cfg.k)
    label = {}
    if cfg.k == 4:
        for numeral, cls in zip(ROMAN, pipeline.WILF_CLASSES_4):
            label[tuple(sorted(cls))] = numeral
    lines = [f"{label.get(c, '-')}\t{' '.join(c)}" for c in classes]
    _emit(cfg, "\n".join(lines) + "\n")
    if classes != ref:
        print(f"note: {len(classes)} classes, reference has {len(ref)}", file=sys.stderr)
        if cfg.k == 4 and max_n >= 9:
            return EXIT_FAIL
    return EXIT_OK


def load_sequence(path: str) -> series.SeriesTable:
    """A sequence fixture, or ``n,pattern,r,psi`` CSV holding a single (pattern, r)."""
    with open(path) as fh:
        text = fh.read()
    if not text.startswith("n,pattern,r,psi"):
        return series.parse_sequence(text, os.path.splitext(os.path.basename(path))[0])
    tables = pipeline.read_psi_csv(text)
    rs = {r for t in tables for r in t.psi}
    pats = {t.pattern for t in tables}
    if len(rs) != 1 or len(pats) != 1:
        raise series.FixtureError("CSV input must hold one pattern and one r")
    (r,), (pat,) = rs, pats
    values = {t.n: t.psi[r] for t in tables}
    lo, hi = min(values), max(values)
    if sorted(values) != list(range(lo, hi + 1)):
        raise series.FixtureError("CSV input must cover a contiguous range of n")
    return series.SeriesTable(f"psi{r}({format_permutation(pat)})", lo, [values[n] for n in range(lo, hi + 1)])


def cmd_analyze(cfg: RunConfig) -> int:
    if not cfg.sequence:
        raise UsageError("analyze needs a sequence file")

    def load(path):
        try:
            return load_sequence(path)
        except (OSError, ValueError) as exc:
            raise UsageError(f"{path}: {exc}") from None

    s = load(cfg.sequence)
    ref = load(cfg.reference) if cfg.reference else None
    _emit(cfg, series.estimator_table(s, cfg.mu, ref, cfg.power))
    return EXIT_OK


FORMULAS = {
    (1, 2, 3): (oracle.psi123_exact, 6),
    (1, 3, 2): (oracle.psi132_exact, 3),
}


def cmd_formulas(cfg: RunConfig) -> int:
    if len(cfg.patterns) != 1 or cfg.patterns[0] not in FORMULAS:
        raise UsageError("formulas supports --pattern 123 or 132")
    pat = cfg.patterns[0]
    fn, rmax = FORMULAS[pat]
    r = 0 if cfg.r is None else cfg.r
    if not 0 <= r <= rmax:
        print(f"error: unsupported r={r} for pattern {format_permutation(pat)} (0..{rmax})",
              file=sys.stderr)
        return EXIT_USAGE
    hi = cfg.max_n if cfg.max_n is not None else (cfg.n or 20)
    name = format_permutation(pat)
    rows = ["n,pattern,r,psi"] + [f"{n},{name},{r},{fn(r, n)}" for n in range(0, hi + 1)]
    _emit(cfg, "\n".join(rows) + "\n")
    return EXIT_OK


COMMANDS = {
    "count": cmd_count,
    "verify": cmd_verify,
    "wilf": cmd_wilf,
    "analyze": cmd_analyze,
    "formulas": cmd_formulas,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="permutation length (start of range with --max-n)")
    common.add_argument("--max-n", type=int, help="largest length")
    common.add_argument("--mem-cap", type=parse_size, help="memory cap, e.g. 4G; shared by workers")
    common.add_argument("--threads", type=int, default=1, help="worker processes")
    common.add_argument("--basis", choices=BASES, default="transposition")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="permocc", description="Count pattern occurrences in permutations.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[common], help="psi_r(n) tables as CSV")
    c.add_argument("--pattern", type=_pattern, action="append", help="repeatable")

    v = sub.add_parser("verify", parents=[common], help="run the verification checks")
    v.add_argument("--fixtures", help="fixture directory (default: bundled)")

    w = sub.add_parser("wilf", parents=[common], help="group patterns into Wilf classes")
    w.add_argument("--k", type=int, default=4)

    a = sub.add_parser("analyze", parents=[common], help="ratio-method estimators as CSV")
    a.add_argument("sequence", help="sequence fixture file")
    a.add_argument("--mu", default=CLASS_V_MU, help=f"growth constant (default {CLASS_V_MU})")
    a.add_argument("--power", default="0", help="power a in num/(n^a den)")
    a.add_argument("--reference", help="denominator sequence for amplitude ratios")

    f = sub.add_parser("formulas", parents=[common], help="closed forms for 123 and 132")
    f.add_argument("--pattern", type=_pattern, action="append")
    f.add_argument("--r", type=int, default=0)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
