"""Text descriptions of standard bodies and the factory that builds them.

Grammar (one body per string)::

    cube:4   cross:5   simplex:6   ball:3
    hanner:a=0.5,dim=8
    geom:c=0.6,beta=0.4,n=64

Any form may end with ``,scale=R``. ``str(BodySpec.parse(s))`` gives the
canonical text, and parsing the canonical text returns an equal spec.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import polytope as pc
from .counts import FCount
from .errors import InvalidParameter

_DIM_KINDS = ("cube", "cross", "simplex", "ball")
_PARAMS = {
    "hanner": (("a", float), ("dim", int)),
    "geom": (("c", float), ("beta", float), ("n", int)),
}


def _fmt(x) -> str:
    return str(x) if isinstance(x, int) else repr(float(x))


@dataclass(frozen=True)
class BodySpec:
    kind: str
    params: tuple[tuple[str, float | int], ...]
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in _DIM_KINDS and self.kind not in _PARAMS:
            raise InvalidParameter(f"unknown body kind {self.kind!r}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise InvalidParameter("scale must be a positive finite number")
        p = dict(self.params)
        if self.kind in _DIM_KINDS:
            if set(p) != {"n"} or int(p["n"]) < 1:
                raise InvalidParameter(f"{self.kind} needs one positive dimension")
        else:
            names = [name for name, _ in _PARAMS[self.kind]]
            if sorted(p) != sorted(names):
                raise InvalidParameter(f"{self.kind} needs parameters {names}")
        if self.kind == "hanner" and not (0 < p["a"] < 1 and p["dim"] >= 1):
            raise InvalidParameter("hanner needs 0 < a < 1 and dim >= 1")
        if self.kind == "geom":
            c, beta, n = p["c"], p["beta"], p["n"]
            if not (0 < c < 1 and c - 0.5 < beta < c and n >= 2):
                raise InvalidParameter("geom needs 0 < c < 1, c - 1/2 < beta < c, n >= 2")

    def __getitem__(self, key):
        return dict(self.params)[key]

    @property
    def dim(self) -> int:
        p = dict(self.params)
        return int(p.get("n", p.get("dim", 0)))

    @classmethod
    def parse(cls, text: str) -> "BodySpec":
        text = text.strip()
        if ":" not in text:
            raise InvalidParameter(f"body spec {text!r} lacks 'kind:'")
        kind, rest = text.split(":", 1)
        kind = kind.strip().lower()
        tokens = [t.strip() for t in rest.split(",") if t.strip()]
        params: dict[str, float | int] = {}
        scale = 1.0
        for i, tok in enumerate(tokens):
            if "=" not in tok:
                if i != 0 or kind not in _DIM_KINDS:
                    raise InvalidParameter(f"unexpected token {tok!r} in {text!r}")
                key, val = "n", tok
            else:
                key, val = (s.strip() for s in tok.split("=", 1))
            try:
                if key == "scale":
                    scale = float(val)
                    continue
                if kind in _DIM_KINDS:
                    conv = int
                else:
                    conv = dict(_PARAMS.get(kind, ())).get(key)
                    if conv is None:
                        raise InvalidParameter(f"unknown parameter {key!r} for {kind}")
                params[key] = conv(val)
            except ValueError:
                raise InvalidParameter(f"bad value {val!r} for {key}") from None
        order = ["n"] if kind in _DIM_KINDS else [name for name, _ in _PARAMS.get(kind, ())]
        ordered = tuple((k, params[k]) for k in order if k in params)
        if len(ordered) != len(params):
            raise InvalidParameter(f"unknown parameters in {text!r}")
        return cls(kind, ordered, scale)

    def __str__(self):
        if self.kind in _DIM_KINDS:
            body = f"{self.kind}:{self['n']}"
        else:
            body = f"{self.kind}:" + ",".join(f"{k}={_fmt(v)}" for k, v in self.params)
        if self.scale != 1.0:
            body += f",scale={_fmt(self.scale)}"
        return body


class StandardBody:
    """A polytope with exact counts and radii plus lazily built representations."""

    def __init__(self, spec: BodySpec, dim: int, counts: FCount, r: float, R: float,
                 make_v, make_h, support_fn=None, gauge_fn=None, tree=None):
        self.spec = spec
        self.dim = dim
        self.counts = counts
        self.inradius = r
        self.circumradius = R
        self._make_v, self._make_h = make_v, make_h
        self._support, self._gauge = support_fn, gauge_fn
        self.tree = tree

    @cached_property
    def v(self) -> pc.VPolytope:
        return self._make_v()

    @cached_property
    def h(self) -> pc.HPolytope:
        return self._make_h()

    def support(self, x):
        return self._support(x) if self._support else pc.support(self.v, x)

    def gauge(self, x):
        return self._gauge(x) if self._gauge else pc.gauge(self.h, x)

    def __repr__(self):
        return f"StandardBody({self.spec})"


class EuclideanBall:
    def __init__(self, dim: int, radius: float = 1.0):
        self.dim = dim
        self.radius = radius
        self.inradius = self.circumradius = radius

    def support(self, x):
        return self.radius * np.linalg.norm(x, axis=-1)

    def gauge(self, x):
        return np.linalg.norm(x, axis=-1) / self.radius

    def __repr__(self):
        return f"EuclideanBall({self.dim})"


def make_standard(spec: BodySpec | str):
    """Build the body a spec describes (StandardBody, EuclideanBall or GeomBody)."""
    if isinstance(spec, str):
        spec = BodySpec.parse(spec)
    s = spec.scale
    kind = spec.kind
    if kind == "ball":
        return EuclideanBall(spec["n"], s)
    if kind == "geom":
        from .geomflm import GeomBody

        return GeomBody(spec["n"], spec["c"], spec["beta"], scale=s)
    if kind == "cube":
        n = spec["n"]
        return StandardBody(
            spec, n, FCount(2**n, 2 * n, n), s, s * math.sqrt(n),
            lambda: pc.scale(pc.cube_v(n), s), lambda: pc.scale(pc.cube_h(n), s),
            lambda x: s * np.abs(x).sum(axis=-1), lambda x: np.abs(x).max(axis=-1) / s,
        )
    if kind == "cross":
        n = spec["n"]
        return StandardBody(
            spec, n, FCount(2 * n, 2**n, n), s / math.sqrt(n), s,
            lambda: pc.scale(pc.cross_v(n), s), lambda: pc.scale(pc.cross_h(n), s),
            lambda x: s * np.abs(x).max(axis=-1), lambda x: np.abs(x).sum(axis=-1) / s,
        )
    if kind == "simplex":
        n = spec["n"]
        return StandardBody(
            spec, n, FCount(n + 1, n + 1, n), s, s * n,
            lambda: pc.scale(pc.simplex_v(n), s), lambda: pc.scale(pc.simplex_h(n), s),
        )
    if kind == "hanner":
        from . import hanner

        tree = hanner.build_general_n(spec["dim"], spec["a"])
        r, R = tree.radii()
        return StandardBody(
            spec, tree.dim, tree.counts, s * r, s * R,
            lambda: pc.scale(hanner.materialize_v(tree), s),
            lambda: pc.scale(hanner.materialize_h(tree), s),
            tree=tree,
        )
    raise InvalidParameter(f"unsupported body {spec}")
