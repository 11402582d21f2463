"""Regenerate the sequence fixtures shipped in ``permocc/data/fixtures``.

Printed sequences are transcribed verbatim.  The 1234 prefixes are computed
here by exhaustive enumeration with a dynamic program over increasing
subsequences, which shares no code with the package's counting paths.
The result is written together with a manifest of sha256 digests.
"""

import hashlib
import itertools
import json
import sys
import time
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "permocc" / "data" / "fixtures"

PRINTED = {
    "class3_1432_r2": ("1432", 2, [0, 0, 0, 0, 5, 68, 626, 5038, 38541, 289785, 2172387,
                                   16339840, 123650958, 942437531, 7236542705]),
    "class4_2143_r1": ("2143", 1, [0, 0, 0, 1, 11, 88, 642, 4567, 32443, 232189, 1679295,
                                   12282794, 90834993, 678779256, 5121534664, 38988595387,
                                   299244027539, 2314045427659]),
    "class4_2143_r2": ("2143", 2, [0, 0, 0, 0, 4, 53, 495, 4099, 32345, 250371, 1926145,
                                   14820037, 114394941, 887176357, 6917420887, 54237535517]),
    "class5_1324_r2": ("1324", 2, [0, 0, 0, 0, 6, 74, 645, 5023, 37549, 277089, 2043416,
                                   15146147, 113147663, 852978562, 6492322934]),
    "class6_1342_r1": ("1342", 1, [0, 0, 0, 1, 10, 77, 548, 3799, 26165, 180512, 1251832,
                                   8738589, 61427007, 434771094, 3097485378, 22203860315,
                                   160077190385]),
    "class6_1342_r2": ("1342", 2, [0, 0, 0, 0, 6, 69, 598, 4686, 35148, 258390, 1882813,
                                   13677083, 99350385, 722871146, 5272996671]),
    "class7_2413_r1": ("2413", 1, [0, 0, 0, 1, 9, 62, 402, 2593, 16921, 112196, 755920,
                                   5168174, 35796046, 250765372, 1774228404, 12662584870,
                                   91064282806]),
    "class7_2413_r2": ("2413", 2, [0, 0, 0, 0, 8, 82, 612, 4187, 28065, 188514, 1278590,
                                   8774123, 60914835, 427488844, 3029373540]),
}

# exact column of the 12-term extension table for 1234, r=1
TABLE_1234_R1 = [
    2056218941678, 15358296210724, 115469557503753, 873561194459596,
    6647760790457218, 50871527629923754, 391345137795371013,
    3025568471613091692, 23501724670464335914, 183370520135071994536,
    1436795093911521996331, 11303188383039278887124,
]


def increasing_counts(perms: np.ndarray, k: int) -> np.ndarray:
    """Number of increasing length-``k`` subsequences of each row."""
    m, n = perms.shape
    ends = [np.ones((m, n), dtype=np.int64)]
    for _ in range(1, k):
        prev, cur = ends[-1], np.zeros((m, n), dtype=np.int64)
        for j in range(n):
            for i in range(j):
                cur[:, j] += prev[:, i] * (perms[:, i] < perms[:, j])
        ends.append(cur)
    return ends[-1].sum(axis=1)


def histogram_1234(n: int, upto: int = 2) -> list:
    """``[psi_0, .., psi_upto]`` for the pattern 1234 by enumerating all of S_n."""
    tally = np.zeros(upto + 1, dtype=np.int64)
    lead = min(2, n)
    for head in itertools.permutations(range(1, n + 1), lead):
        rest = [x for x in range(1, n + 1) if x not in head]
        block = np.array([head + t for t in itertools.permutations(rest)], dtype=np.int8)
        c = increasing_counts(block, 4)
        tally += np.bincount(c[c <= upto], minlength=upto + 1)[: upto + 1]
    return [int(x) for x in tally]


def avoiders_1234(n: int) -> int:
    """Number of 1234-avoiders of length ``n``."""
    s = sum(
        Fraction(2 * comb(2 * k, k) * comb(n, k) ** 2 * (3 * k * k + 2 * k + 1 - n - 2 * n * k),
                 (k + 1) ** 2 * (k + 2) * (n - k + 1))
        for k in range(n + 1)
    )
    assert s.denominator == 1
    return int(s)


def write(name: str, offset: int, values, comments, manifest, pattern=None, r=None):
    lines = [f"# {c}" for c in comments] + [f"# offset={offset}"] + [str(v) for v in values]
    text = "\n".join(lines) + "\n"
    (OUT / f"{name}.txt").write_text(text)
    manifest[name] = {
        "file": f"{name}.txt",
        "offset": offset,
        "terms": len(values),
        "sha256": hashlib.sha256(text.encode()).hexdigest(),
        "source": comments[0],
        "pattern": pattern,
        "r": r,
    }


def main(n_max: int = 11):
    OUT.mkdir(parents=True, exist_ok=True)
    manifest = {}
    for name, (pattern, r, values) in PRINTED.items():
        write(name, 1, values,
              [f"printed enumeration, pattern {pattern}, r={r}", "psi_r(n) for n = 1, 2, ..."],
              manifest, pattern, r)
    write("ext_1234_r1_exact", 18, TABLE_1234_R1,
          ["printed exact column of the 1234 r=1 extension table",
           "psi_1(n) for n = 18..29; integrity data only"], manifest, "1234", 1)

    psi0, psi1 = [], []
    for n in range(1, n_max + 1):
        t = time.time()
        h = histogram_1234(n)
        psi0.append(h[0])
        psi1.append(h[1])
        print(f"n={n}: psi0={h[0]} psi1={h[1]} ({time.time() - t:.1f}s)", file=sys.stderr)
    avoiders = [avoiders_1234(n) for n in range(0, 61)]
    assert avoiders[1:n_max + 1] == psi0, "closed form disagrees with enumeration"

    write("A217057_prefix", 1, psi1,
          ["A217057 prefix (1234, r=1) recomputed offline by exhaustive enumeration",
           f"psi_1(n) for n = 1..{n_max}; network access unavailable when generated"],
          manifest, "1234", 1)
    write("A005802_prefix", 0, avoiders,
          ["A005802 (1234-avoiders) from the closed-form sum over binomials",
           f"psi_0(n) for n = 0..60; matched exhaustive enumeration for n <= {n_max}"],
          manifest, "1234", 0)
    (OUT / "MANIFEST.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 11)
