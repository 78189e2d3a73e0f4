"""Bundled example semigroups (``.sgp``) and automata (``.dfa``)."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

SEMIGROUPS = ("z2", "z3", "z4", "v4", "z6", "s3", "rz2", "lz2", "null2", "b2", "t2")
GROUPS = ("z2", "z3", "z4", "v4", "z6", "s3")
AUTOMATA = ("aa_plus", "a_aa_star", "ab_plus", "ba_plus", "a_only")


def path(name: str) -> Path:
    """Location of a bundled file; ``name`` may omit the extension."""
    root = resources.files(__name__)
    for cand in (name, f"{name}.sgp", f"{name}.dfa"):
        p = root / cand
        if p.is_file():
            return Path(str(p))
    raise FileNotFoundError(f"no bundled corpus entry {name!r}")


def semigroup(name: str):
    from ..semigroup import load_semigroup
    return load_semigroup(path(name))


def dfa(name: str):
    from ..languages import load_dfa
    return load_dfa(path(name))
