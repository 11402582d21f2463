"""Access to the sequence fixtures shipped with the package."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .series import SeriesTable, parse_sequence

MANIFEST = "MANIFEST.json"


class MissingFixtures(FileNotFoundError):
    pass


@dataclass(frozen=True)
class FixtureInfo:
    name: str
    file: str
    offset: int
    terms: int
    sha256: str
    source: str
    pattern: Optional[str]
    r: Optional[int]


def default_dir() -> Path:
    return Path(str(resources.files("permocc") / "data" / "fixtures"))


def _dir(directory) -> Path:
    d = Path(directory) if directory is not None else default_dir()
    if not (d / MANIFEST).is_file():
        raise MissingFixtures(f"no {MANIFEST} in {d}")
    return d


def manifest(directory=None) -> Dict[str, FixtureInfo]:
    d = _dir(directory)
    raw = json.loads((d / MANIFEST).read_text())
    return {name: FixtureInfo(name=name, **entry) for name, entry in raw.items()}


def load(name: str, directory=None) -> SeriesTable:
    d = _dir(directory)
    info = manifest(d)[name]
    return parse_sequence((d / info.file).read_text(), name)


def integrity(directory=None) -> List[Tuple[str, bool, str]]:
    """Digest, offset and length check for every manifest entry."""
    d = _dir(directory)
    out = []
    for name, info in sorted(manifest(d).items()):
        path = d / info.file
        if not path.is_file():
            out.append((name, False, "file missing"))
            continue
        text = path.read_text()
        digest = hashlib.sha256(text.encode()).hexdigest()
        if digest != info.sha256:
            out.append((name, False, "sha256 mismatch"))
            continue
        s = parse_sequence(text, name)
        if (s.offset, len(s)) != (info.offset, info.terms):
            out.append((name, False, "offset or length disagrees with manifest"))
            continue
        out.append((name, True, f"{info.terms} terms from n={info.offset}"))
    return out
