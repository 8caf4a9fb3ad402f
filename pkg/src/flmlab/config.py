"""Flat key=value configuration.

A config file holds one ``key=value`` pair per line; ``#`` starts a comment.
The file named by ``$FLMLAB_CONFIG`` is read on first use, and CLI flags
override individual keys through :func:`override`.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import InvalidParameter

ENV_VAR = "FLMLAB_CONFIG"


@dataclass(frozen=True)
class Config:
    enum_max_dim: int = 8
    enum_max_points: int = 4096
    enum_brute_max_subsets: int = 2_000_000
    enum_lp_max_points: int = 256
    mc_samples: int = 100_000
    mc_margin: float = 3.0
    mc_workers: int = 1
    seed_master: int = 20240601


# config key -> dataclass field
KEYS = {
    "enum.max_dim": "enum_max_dim",
    "enum.max_points": "enum_max_points",
    "enum.max_normals": "enum_max_points",
    "enum.brute_max_subsets": "enum_brute_max_subsets",
    "enum.lp_max_points": "enum_lp_max_points",
    "mc.samples": "mc_samples",
    "mc.margin": "mc_margin",
    "mc.workers": "mc_workers",
    "seed.master": "seed_master",
}

_current: Config | None = None


def parse(text: str, base: Config | None = None) -> Config:
    cfg = base or Config()
    types = {f.name: f.type for f in fields(Config)}
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameter(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise InvalidParameter(f"config line {lineno}: unknown key {key!r}")
        name = KEYS[key]
        conv = float if types[name] in (float, "float") else int
        try:
            updates[name] = conv(value)
        except ValueError:
            raise InvalidParameter(f"config line {lineno}: bad value for {key}: {value!r}") from None
    return replace(cfg, **updates)


def load(path: str | os.PathLike | None = None) -> Config:
    if path is None:
        path = os.environ.get(ENV_VAR)
    if not path:
        return Config()
    return parse(Path(path).read_text())


def current() -> Config:
    global _current
    if _current is None:
        _current = load()
    return _current


def set_current(cfg: Config | None) -> None:
    global _current
    _current = cfg


def override(pairs: dict[str, object], base: Config | None = None) -> Config:
    """Return ``base`` (default: current) with dotted keys like ``enum.max_dim`` replaced."""
    text = "\n".join(f"{k}={v}" for k, v in pairs.items())
    return parse(text, base or current())
