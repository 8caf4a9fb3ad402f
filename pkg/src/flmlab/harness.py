"""Experiment registry, deterministic CSV/JSON emission and summary reports.

Every experiment is a pure function of its parameters and seed. A run
writes ``<out>.csv`` (header row, '\\n' line endings, floats at 17
significant digits) and ``<out>.summary.json`` with the parameters, seed,
version string, wall time, pass flags and the CSV's sha256.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import subprocess
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from . import config as _config
from . import enumeration as en
from . import geomflm, hanner, sections, sphere
from . import polytope as pc
from .bodies import BodySpec, make_standard
from .errors import ChecksumMismatch, InvalidParameter, UnknownExperiment
from .fitting import fit_loglog
from .rng import derive_seed


# -- parameter schema ------------------------------------------------------------


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _str_list(text) -> list[str]:
    if isinstance(text, (list, tuple)):
        return [str(v) for v in text]
    return [v.strip() for v in str(text).split(";") if v.strip()]


def parse_growth(text) -> hanner.GrowthFn:
    """``log``, ``power:0.5``, ``const_log:0.5`` or a plain number (constant)."""
    if isinstance(text, hanner.GrowthFn):
        return text
    s = str(text).strip()
    kind, _, arg = s.partition(":")
    if kind == "log" and not arg:
        return hanner.GrowthFn.log()
    if kind in ("power", "const_log") and arg:
        return hanner.GrowthFn(kind, float(arg))
    try:
        return hanner.GrowthFn.const(float(s))
    except ValueError:
        raise InvalidParameter(f"bad growth function {text!r}") from None


def _optional_float(text):
    if text is None or str(text).lower() in ("", "none"):
        return None
    return float(text)


@dataclass(frozen=True)
class Param:
    name: str
    conv: Callable
    default: object
    help: str = ""


@dataclass(frozen=True)
class Experiment:
    name: str
    module: str
    criterion: int | None
    params: tuple[Param, ...]
    runner: Callable
    help: str = ""

    def resolve(self, given: dict) -> dict:
        known = {p.name: p for p in self.params}
        out = {}
        for key, value in given.items():
            k = key.replace("_", "-")
            if k not in known:
                raise InvalidParameter(f"{self.name}: unknown parameter {key!r}")
            try:
                out[k] = known[k].conv(value)
            except (TypeError, ValueError) as exc:
                raise InvalidParameter(f"{self.name}: bad value for {k}: {value!r} ({exc})") from None
        for p in self.params:
            if p.name not in out:
                out[p.name] = p.conv(p.default) if p.default is not None else None
        return out


@dataclass
class Result:
    columns: tuple[str, ...]
    rows: list[tuple]
    flags: dict[str, bool] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())


REGISTRY: dict[str, Experiment] = {}


def register(name, module, criterion, params, help=""):
    def deco(fn):
        REGISTRY[name] = Experiment(name, module, criterion, tuple(params), fn, help)
        return fn

    return deco


def get(name: str) -> Experiment:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownExperiment(f"unknown experiment {name!r}") from None


# -- hanner ------------------------------------------------------------------------

A_HALF_TABLE = [(2, 2), (4, 4), (16, 8), (32, 64), (1024, 128)]


def tree_label(e: hanner.HannerExpr) -> str:
    if isinstance(e, hanner.Leaf):
        return "I"
    op = "x" if isinstance(e, hanner.Product) else "+"
    return f"({tree_label(e.left)}{op}{tree_label(e.right)})"


@register("hanner-exact", "hanner", 1, [
    Param("max-dim", int, 4, "enumerate every construction tree up to this dimension"),
    Param("big-dim", int, 8, "dimension of the dual-product facet checks"),
], "recursion counts against brute-force enumeration")
def _hanner_exact(p, seed, cfg):
    rows = []
    ok = True
    for dim in range(1, p["max-dim"] + 1):
        for tree in hanner.all_trees(dim):
            c = tree.counts
            V = en.canonicalize_v(hanner.materialize_v(tree, cfg=cfg), cfg)
            F = en.facet_enum(V, cfg)
            Fh = en.canonicalize_h(hanner.materialize_h(tree, cfg=cfg), cfg)
            match = int(c.num_vertices) == len(V) and int(c.num_facets) == len(F) == len(Fh)
            ok &= match
            rows.append((tree_label(tree), dim, int(c.num_vertices), int(c.num_facets), len(V), len(F), match))
    big = p["big-dim"]
    trees = [hanner.build_general_n(big, Fraction(k, 4)) for k in (1, 2, 3)]
    trees += [hanner.cube_tree(big), hanner.cross_tree(big)]
    big_ok = True
    for tree in trees:
        c = tree.counts
        nv = len(en.extreme_indices(hanner.materialize_v(tree, cfg=cfg).vertices, cfg))
        # facets of T are the vertices of its dual tree
        nf = len(en.extreme_indices(hanner.materialize_v(hanner.dual(tree), cfg=cfg).vertices, cfg))
        match = int(c.num_vertices) == nv and int(c.num_facets) == nf
        big_ok &= match
        rows.append((tree_label(tree), big, int(c.num_vertices), int(c.num_facets), nv, nf, match))
    dyadic = [hanner.build_dyadic(Fraction(1, 2), m) for m in range(len(A_HALF_TABLE))]
    got = [(int(e.counts.num_vertices), int(e.counts.num_facets)) for e in dyadic]
    table_ok = got == A_HALF_TABLE
    return Result(
        ("tree", "dim", "V_rec", "F_rec", "V_enum", "F_enum", "match"), rows,
        {"small_trees_match": ok, "dual_product_facets_match": big_ok, "a_half_table": table_ok},
        {"trees": len(rows), "a_half_table": got},
    )


@register("hanner-family", "hanner", 2, [
    Param("a", Fraction, "1/2", "product density"),
    Param("max-exp", int, 40, "largest exponent m (dimension 2^m)"),
    Param("fit-from", int, 10, "smallest m used in the slope fits"),
    Param("tol", float, 0.1, "slope tolerance"),
], "exact counts of the dyadic family and their growth exponents")
def _hanner_family(p, seed, cfg):
    a = p["a"]
    fam = hanner.dyadic_family(a, p["max-exp"])
    rows = [(m, dim, lv, lf) for m, dim, lv, lf in fam.rows]
    pts = [r for r in rows if r[0] >= p["fit-from"]]
    flags, summary = {}, {}
    if len(pts) >= 3:
        v_fit = fit_loglog((r[1], r[2]) for r in pts)
        f_fit = fit_loglog((r[1], r[3]) for r in pts)
        flags = {"v_slope": v_fit.within(float(a), p["tol"]), "f_slope": f_fit.within(1 - float(a), p["tol"])}
        summary = {"v_slope": v_fit.slope, "f_slope": f_fit.slope, "v_r2": v_fit.r_squared, "f_r2": f_fit.r_squared}
    return Result(fam.columns, rows, flags, summary)


@register("hanner-padded", "hanner", 3, [
    Param("f", parse_growth, "log", "growth function: log, power:D, const_log:E or a constant"),
    Param("emin", int, 8, "smallest N = 2^emin"),
    Param("emax", int, 16, "largest N = 2^emax"),
    Param("lo", float, 0.05, "lower end of the ratio bracket"),
    Param("hi", float, 20.0, "upper end of the ratio bracket"),
], "padded products of P_n and the ratio logV logF / (k (1 + log k / f(k)))")
def _hanner_padded(p, seed, cfg):
    Ns = [2**e for e in range(p["emin"], p["emax"] + 1)]
    fam = hanner.padded_family(p["f"], Ns)
    ratios = [r[-1] for r in fam.rows]
    ok = all(p["lo"] <= x <= p["hi"] for x in ratios)
    return Result(fam.columns, list(fam.rows), {"ratio_bracket": ok},
                  {"ratio_min": min(ratios), "ratio_max": max(ratios)})


# -- sphere statistics ---------------------------------------------------------------


@register("lemma21", "sphere-stats", 4, [
    Param("nmin", int, 2), Param("nmax", int, 50),
], "exact cap measure against exp(-n eps^2 / 2)")
def _lemma21(p, seed, cfg):
    eps_grid = [round(0.05 * k, 2) for k in range(1, 20)]
    rows = []
    for n in range(p["nmin"], p["nmax"] + 1):
        for eps in eps_grid:
            cap = sphere.cap_measure_exact(n, eps)
            bound = math.exp(-n * eps * eps / 2.0)
            rows.append((n, eps, cap, bound, cap <= bound))
    bad = sphere.concentration_violations(range(p["nmin"], p["nmax"] + 1), eps_grid)
    ok = not bad and all(r[-1] for r in rows)
    return Result(("n", "eps", "cap", "bound", "pass"), rows, {"zero_violations": ok}, {"violations": len(bad)})


def _spherical_polytope(n, count, seed):
    return pc.VPolytope(sphere.sample_sphere(n, seed, count))


@register("lemma22", "sphere-stats", 5, [
    Param("samples", int, 100_000),
    Param("random-bodies", int, 20),
    Param("random-n", int, 12),
    Param("random-v", int, 24),
    Param("bodies", _str_list, "cross:16;simplex:8;simplex:16;cube:2,scale=0.5", "';'-separated body specs"),
], "Monte Carlo mean width against R (sqrt(3 log|V| / n) + 1/sqrt|V|)")
def _lemma22(p, seed, cfg):
    cases = []
    for spec in p["bodies"]:
        cases.append((spec, make_standard(spec).v))
    for i in range(p["random-bodies"]):
        cases.append((f"sphere:{p['random-n']}x{p['random-v']}#{i}",
                      _spherical_polytope(p["random-n"], p["random-v"], derive_seed(seed, "lemma22-body", i))))
    rows = []
    ok = True
    for label, P in cases:
        res = sphere.lemma22_check(P, p["samples"], derive_seed(seed, "lemma22", label), margin=cfg.mc_margin)
        lhs = res.lhs.mean if res.lhs else None
        err = res.lhs.stderr if res.lhs else None
        rows.append((label, P.dim, len(P), pc.circumradius(P), lhs, err, res.rhs, res.hypothesis, res.passed))
        ok &= res.passed
    checked = sum(1 for r in rows if r[7])
    return Result(("body", "n", "V", "R", "Mstar", "Mstar_err", "rhs", "hypothesis", "pass"), rows,
                  {"all_pass": ok}, {"checked": checked, "skipped": len(rows) - checked})


FLM_SUITE = (
    "cube:2;cube:4;cube:8;cross:2;cross:4;cross:8;simplex:2;simplex:4;simplex:8;"
    "hanner:a=0.5,dim=2;hanner:a=0.5,dim=3;hanner:a=0.5,dim=5;hanner:a=0.5,dim=8;"
    "hanner:a=0.25,dim=8;hanner:a=0.75,dim=8;hanner:a=0.75,dim=6;"
    "geom:c=0.6,beta=0.4,n=16;geom:c=0.6,beta=0.4,n=64;geom:c=0.6,beta=0.4,n=256;"
    "geom:c=0.4,beta=0.3,n=128"
)


@register("flm-suite", "sphere-stats", 6, [
    Param("samples", int, 100_000),
    Param("bodies", _str_list, FLM_SUITE, "';'-separated body specs"),
], "FLM certificate, M M* >= 1 and the (M M*)^2 identity per test body")
def _flm_suite(p, seed, cfg):
    rows = []
    cert_ok = mm_ok = eq4_ok = True
    for spec in p["bodies"]:
        K = make_standard(spec)
        dv = geomflm.dv_report(K, p["samples"], derive_seed(seed, "flm-suite", spec))
        mm_pass = dv.mm >= 1.0 - cfg.mc_margin * dv.mm_err
        ident = dv.eq4_identity_ok()
        cert = refined = None
        if K.counts is not None:
            rep = sphere.flm_certificate(K.counts, K.inradius, K.circumradius)
            cert = rep.certificate
            cert_ok &= cert >= 1.0 / 9.0
            if K.circumradius / K.inradius <= math.sqrt(K.dim) * (1 + 1e-9):
                refined = sphere.refined_flm_check(K.counts, K.inradius, K.circumradius).ratio
        mm_ok &= mm_pass
        eq4_ok &= ident and dv.eq4_lower_ok(cfg.mc_margin)
        rows.append((spec, K.dim, K.inradius, K.circumradius, cert, refined, dv.M.mean, dv.M.stderr,
                     dv.Mstar.mean, dv.Mstar.stderr, dv.mm, dv.mm_err, dv.eq4, mm_pass))
    cols = ("body", "n", "r", "R", "certificate", "refined", "M", "M_err", "Mstar", "Mstar_err",
            "MMstar", "MMstar_err", "eq4", "mm_pass")
    return Result(cols, rows, {"certificate_ge_1_9": cert_ok, "mm_ge_1": mm_ok, "eq4": eq4_ok})


# -- geometric FLM bodies ---------------------------------------------------------------


def _pow2_range(nmin, nmax):
    out, n = [], nmin
    while n <= nmax:
        out.append(n)
        n *= 2
    return out


@register("geom-sweep", "geomflm", 7, [
    Param("c", float, 0.6), Param("beta", float, 0.4),
    Param("nmin", int, 16), Param("nmax", int, 256),
    Param("samples", int, 1_000_000),
    Param("tol", float, 0.1),
], "M and M* growth exponents of K_n^{c,beta}")
def _geom_sweep(p, seed, cfg):
    sw = geomflm.geom_sweep(p["c"], p["beta"], _pow2_range(p["nmin"], p["nmax"]), p["samples"], seed,
                            cfg.mc_workers)
    flags = {
        "eq4": all(d.eq4_identity_ok() and d.eq4_lower_ok(cfg.mc_margin) for d in sw.dv),
    }
    summary = {"slow_convergence": sw.flags["slow_convergence"]}
    if sw.mstar_fit is not None:
        flags["mstar_slope"] = sw.mstar_fit.within(p["beta"], p["tol"])
        flags["m_slope"] = sw.m_fit.within(-p["beta"], p["tol"])
        summary.update(mstar_slope=sw.mstar_fit.slope, m_slope=sw.m_fit.slope)
    return Result(sw.report.columns, list(sw.report.rows), flags, summary)


@register("geom-flm", "geomflm", 7, [
    Param("a", float, 0.8), Param("b", float, 0.4), Param("c", float, 0.4),
    Param("nmin", int, 32), Param("nmax", int, 512),
    Param("samples", int, 1_000_000),
    Param("tol", float, 0.15),
], "dv_P ~ n^a, dv_S ~ n^b and (R/r)^2 = n^2c for K_n^{c,beta}")
def _geom_flm(p, seed, cfg):
    rep = geomflm.prop_geometric_flm(p["a"], p["b"], p["c"], _pow2_range(p["nmin"], p["nmax"]), p["samples"],
                                     seed, cfg.mc_workers)
    sw = rep.sweep
    flags = {"eq4": all(d.eq4_identity_ok() and d.eq4_lower_ok(cfg.mc_margin) for d in sw.dv)}
    summary = {"beta": rep.beta}
    if rep.dvP_fit is not None:
        flags["dvP_slope"] = rep.dvP_fit.within(p["a"], p["tol"])
        flags["dvS_slope"] = rep.dvS_fit.within(p["b"], p["tol"])
        summary.update(dvP_slope=rep.dvP_fit.slope, dvS_slope=rep.dvS_fit.slope)
    ratio_ok = all(math.isclose(rs, d.n ** (2 * p["c"]), rel_tol=1e-12) for rs, d in zip(rep.ratio_sq, sw.dv))
    flags["ratio_sq"] = ratio_ok
    return Result(sw.report.columns, list(sw.report.rows), flags, summary)


THM43_BODIES = "cube:4;cube:16;cube:64;cross:4;cross:16;cross:64;simplex:4;simplex:16;simplex:64"


@register("thm43", "geomflm", None, [
    Param("bodies", _str_list, THM43_BODIES),
    Param("max-exp", int, 6, "Hanner families up to dimension 2^max-exp"),
    Param("floor", float, 0.2),
], "log|V| and log|F| against n (r/R)^2")
def _thm43(p, seed, cfg):
    cases = [(s, make_standard(s)) for s in p["bodies"]]
    for a in ("0.25", "0.5", "0.75"):
        for m in range(1, p["max-exp"] + 1):
            spec = f"hanner:a={a},dim={2**m}"
            cases.append((spec, make_standard(spec)))
    rows = []
    for label, K in cases:
        rep = geomflm.thm43_check(K.counts, K.inradius, K.circumradius, p["floor"])
        rows.append((label, rep.n, rep.v_ratio, rep.f_ratio, not rep.flagged))
    return Result(("body", "n", "v_ratio", "f_ratio", "pass"), rows, {"above_floor": all(r[-1] for r in rows)})


@register("slab-cap", "geomflm", None, [
    Param("ns", _int_list, "16,32,64,100,128,256"),
    Param("betas", _float_list, "0.05,0.1,0.25,0.3,0.4,0.45"),
], "exact slab measure against 1 - exp(-n^(1-2 beta)/2)")
def _slab_cap(p, seed, cfg):
    rows = []
    for n in p["ns"]:
        for beta in p["betas"]:
            s = geomflm.slab_cap_measure(geomflm.GeomBody(n, 0.5 + beta / 2, beta))
            rows.append((n, beta, s.threshold, s.measure, s.bound, s.holds))
    return Result(("n", "beta", "threshold", "measure", "bound", "pass"), rows,
                  {"bound_holds": all(r[-1] for r in rows)})


# -- sections ---------------------------------------------------------------------------


def _section_result(stats: sections.SectionStats, flags: dict) -> Result:
    flags = {"all_pass": stats.all_pass, "invariants": stats.invariants_ok(), **flags}
    return Result(stats.columns, stats.rows(), flags, dict(stats.summary))


@register("cross-section", "sections", 8, [
    Param("n", int, 3), Param("trials", int, 20),
], "n-dimensional random sections of B_1^{2n}")
def _cross_section(p, seed, cfg):
    st = sections.cross_section_experiment(p["n"], p["trials"], seed, cfg)
    flags = {"median_r_floor": st.summary["median_r_ok"]} if p["n"] == 5 else {}
    return _section_result(st, flags)


@register("simplex-mstar", "sections", 8, [
    Param("ns", _int_list, "4,8,16,32,64"),
    Param("samples", int, 100_000),
    Param("lo", float, 0.5), Param("hi", float, 3.0),
], "M*(S_n) / sqrt(n log n) for the regular simplex")
def _simplex_mstar(p, seed, cfg):
    rows = []
    for n in p["ns"]:
        est = sections.simplex_mstar(n, p["samples"], derive_seed(seed, "simplex-mstar", n))
        ratio = est.mean / math.sqrt(n * math.log(n))
        rows.append((n, est.mean, est.stderr, ratio, p["lo"] <= ratio <= p["hi"]))
    return Result(("n", "Mstar", "Mstar_err", "ratio", "pass"), rows, {"ratio_bracket": all(r[-1] for r in rows)})


@register("simplex-section", "sections", None, [
    Param("n", int, 8), Param("f", parse_growth, "2"), Param("trials", int, 10),
    Param("samples", int, 100_000),
], "sections of the regular simplex by random (n - f(n))-spaces")
def _simplex_section(p, seed, cfg):
    return _section_result(
        sections.simplex_section_experiment(p["n"], p["f"], p["trials"], seed, p["samples"], cfg), {})


@register("hanner-section", "sections", None, [
    Param("a", Fraction, "1/2"), Param("n", int, 4),
    Param("mode", str, "full-half", "full-half or delta"),
    Param("delta", _optional_float, None),
    Param("trials", int, 10), Param("samples", int, 100_000),
], "random sections of the normalized Hanner body")
def _hanner_section(p, seed, cfg):
    st = sections.hanner_section_experiment(p["a"], p["n"], p["mode"], p["trials"], seed, p["delta"],
                                            p["samples"], cfg)
    return _section_result(st, {"high_probability": st.summary["high_prob_ok"]})


@register("low-mstar", "sections", None, [
    Param("body", str, "cross:6"), Param("lam", float, 0.5), Param("trials", int, 20),
    Param("samples", int, 100_000), Param("max-constant", float, 10.0),
], "diam(K ∩ E) sqrt(1 - lambda) / M*(K) over random sections")
def _low_mstar(p, seed, cfg):
    st = sections.low_mstar_check(make_standard(p["body"]), p["lam"], p["trials"], seed, p["samples"], cfg)
    consts = st.values("constant")
    return _section_result(st, {"constant_bounded": bool(np.all(consts <= p["max-constant"]))})


@register("example4-sweep", "sections", None, [
    Param("ns", _int_list, "8,12,16"), Param("deltas", _float_list, "0.5,0.75"), Param("trials", int, 3),
], "records R/r against n/log n for simplex sections; claims nothing")
def _example4(p, seed, cfg):
    st = sections.example4_sweep(p["ns"], p["deltas"], p["trials"], seed, cfg)
    return Result(st.columns, st.rows(), {}, {})


# -- duality properties --------------------------------------------------------------------

DUALITY_BODIES = "cube:3;cross:3;simplex:3;cube:4;cross:4;simplex:5;hanner:a=0.5,dim=4;hanner:a=0.25,dim=5"


def _same_rows(a: np.ndarray, b: np.ndarray) -> float:
    """Largest distance from a row of one set to the nearest row of the other."""
    if a.shape != b.shape:
        return math.inf
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@register("duality-suite", "poly-core", 9, [
    Param("bodies", _str_list, DUALITY_BODIES),
    Param("directions", int, 100),
    Param("tol", float, 1e-9),
], "involution, count swaps, gauge-support duality, section-projection duality")
def _duality(p, seed, cfg):
    rows = []
    tol = p["tol"]
    for spec in p["bodies"]:
        K = make_standard(spec)
        V = en.canonicalize_v(K.v, cfg)
        H = en.facet_enum(V, cfg)
        Vd = pc.dualize(H)
        Hd = pc.dualize(V)
        rows.append((spec, "involution", _same_rows(pc.dualize(Vd).normals, H.normals)))
        Vdd = en.vertex_enum(Hd, cfg)
        rows.append((spec, "involution_v", _same_rows(pc.dualize(pc.dualize(Vdd)).vertices, Vdd.vertices)))
        rows.append((spec, "count_swap", float(abs(len(Vd) - len(H)) + abs(len(en.facet_enum(Vd, cfg)) - len(V)))))
        x = sphere.sample_sphere(K.dim, derive_seed(seed, "duality", spec), p["directions"])
        rows.append((spec, "gauge_support", float(np.max(np.abs(pc.gauge(Hd, x) - pc.support(V, x))))))
        rows.append((spec, "gauge_rep", float(np.max(np.abs(pc.gauge(H, x) - K.gauge(x))))))
        if K.dim >= 3:
            B = sections.random_subspace(K.dim, K.dim - 1, derive_seed(seed, "duality-subspace", spec))
            sec = sections.section_h(H, B, cfg)
            proj = sections.project_v(Vd, B, cfg)
            rows.append((spec, "section_projection", _same_rows(sec.normals, proj.vertices)))
            # the projection contains the section: its gauge is never larger
            pv = en.facet_enum(sections.project_v(V, B, cfg), cfg)
            y = sphere.sample_sphere(K.dim - 1, derive_seed(seed, "duality-y", spec), p["directions"])
            excess = float(np.max(np.maximum(pc.gauge(pv, y) - pc.gauge(sec, y), 0.0)))
            rows.append((spec, "projection_contains_section", excess))
    out = [(b, check, err, err <= tol) for b, check, err in rows]
    return Result(("body", "check", "max_err", "pass"), out, {"zero_failures": all(r[-1] for r in out)})


# -- running ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    out: str | None = None


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else str(float(v))
    if v is None or isinstance(v, str):
        return v
    if isinstance(v, hanner.GrowthFn):
        return {"kind": v.kind, "param": v.param}
    return str(v)


def version_string() -> str:
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"], cwd=here, capture_output=True, text=True,
            timeout=10,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def summary_path(csv_path: str | os.PathLike) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".summary.json")


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


@dataclass
class RunOutcome:
    spec: ExperimentSpec
    result: Result
    csv_path: Path | None
    summary: dict

    @property
    def passed(self) -> bool:
        return self.result.passed


def execute(spec: ExperimentSpec, cfg=None) -> tuple[Experiment, dict, int, Result]:
    exp = get(spec.name)
    cfg = cfg or _config.current()
    params = exp.resolve(spec.params)
    seed = cfg.seed_master if spec.seed is None else int(spec.seed)
    return exp, params, seed, exp.runner(params, seed, cfg)


def run(spec: ExperimentSpec, cfg=None) -> RunOutcome:
    """Run one experiment; with ``spec.out`` write its CSV and JSON summary."""
    cfg = cfg or _config.current()
    t0 = time.perf_counter()
    exp, params, seed, res = execute(spec, cfg)
    wall = time.perf_counter() - t0
    text = csv_text(res.columns, res.rows)
    summary = {
        "experiment": exp.name,
        "module": exp.module,
        "criterion": exp.criterion,
        "params": _jsonable(params),
        "seed": seed,
        "version": version_string(),
        "wall_time_s": wall,
        "flags": _jsonable(res.flags),
        "passed": res.passed,
        "summary": _jsonable(res.summary),
        "rows": len(res.rows),
    }
    path = None
    if spec.out:
        path = Path(spec.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write(path, text)
        summary["csv"] = path.name
        summary["csv_sha256"] = hashlib.sha256(text.encode()).hexdigest()
        _atomic_write(summary_path(path), json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return RunOutcome(spec, res, path, summary)


# -- the full suite and reports ---------------------------------------------------------------

SUITE: tuple[tuple[str, str, dict], ...] = (
    ("hanner-exact", "hanner-exact", {}),
    ("hanner-family-a0.25", "hanner-family", {"a": "1/4"}),
    ("hanner-family-a0.5", "hanner-family", {"a": "1/2"}),
    ("hanner-family-a0.75", "hanner-family", {"a": "3/4"}),
    ("hanner-padded", "hanner-padded", {}),
    ("lemma21", "lemma21", {}),
    ("lemma22", "lemma22", {}),
    ("flm-suite", "flm-suite", {}),
    ("geom-sweep", "geom-sweep", {}),
    ("geom-flm", "geom-flm", {}),
    ("cross-section-n3", "cross-section", {"n": 3}),
    ("cross-section-n4", "cross-section", {"n": 4}),
    ("cross-section-n5", "cross-section", {"n": 5}),
    ("simplex-mstar", "simplex-mstar", {}),
    ("duality-suite", "duality-suite", {}),
)


def run_suite(out_dir, seed: int | None = None, cfg=None, only=None) -> list[RunOutcome]:
    out_dir = Path(out_dir)
    outcomes = []
    for tag, name, params in SUITE:
        if only is not None and tag not in only:
            continue
        outcomes.append(run(ExperimentSpec(name, params, seed, str(out_dir / f"{tag}.csv")), cfg))
    return outcomes


@dataclass
class ReportTable:
    rows: list[tuple]

    @property
    def passed(self) -> bool:
        return all(r[-1] for r in self.rows)

    def text(self) -> str:
        lines = ["criterion  experiment                flag                        status"]
        for crit, name, flag, ok in self.rows:
            c = "-" if crit is None else str(crit)
            lines.append(f"{c:<10} {name:<25} {flag:<27} {'PASS' if ok else 'FAIL'}")
        return "\n".join(lines)


def _summary_files(paths) -> list[Path]:
    out = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            out.extend(sorted(p.glob("*.summary.json")))
        elif p.suffix == ".csv":
            out.append(summary_path(p))
        else:
            out.append(p)
    return out


def report(paths) -> ReportTable:
    """Merge run summaries into one pass/fail table, verifying CSV checksums."""
    rows = []
    for sp in _summary_files(paths):
        try:
            data = json.loads(Path(sp).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParameter(f"missing or corrupt summary {sp}: {exc}") from None
        csv_file = Path(sp).with_name(data["csv"])
        try:
            digest = hashlib.sha256(csv_file.read_bytes()).hexdigest()
        except OSError as exc:
            raise InvalidParameter(f"cannot read {csv_file}: {exc}") from None
        if digest != data["csv_sha256"]:
            raise ChecksumMismatch(f"{csv_file} does not match the checksum in {sp}")
        label = Path(sp).name[: -len(".summary.json")]
        flags = data.get("flags", {})
        if not flags:
            rows.append((data.get("criterion"), label, "(recorded)", True))
        for flag, ok in sorted(flags.items()):
            rows.append((data.get("criterion"), label, flag, bool(ok)))
    rows.sort(key=lambda r: (r[0] is None, r[0] or 0, r[1], r[2]))
    return ReportTable(rows)


def compare_dirs(a, b) -> list[str]:
    """CSV files whose bytes differ between two suite output directories."""
    a, b = Path(a), Path(b)
    names = sorted({p.name for p in a.glob("*.csv")} | {p.name for p in b.glob("*.csv")})
    bad = []
    for name in names:
        pa, pb = a / name, b / name
        if not (pa.exists() and pb.exists()) or pa.read_bytes() != pb.read_bytes():
            bad.append(name)
    return bad


def body_summary(spec: str, cfg=None, method: str = "auto") -> dict:
    """Counts and radii of a standard body by enumeration."""
    K = make_standard(BodySpec.parse(spec))
    if not hasattr(K, "v"):
        raise InvalidParameter(f"{spec} is not a polytope")
    V = en.canonicalize_v(K.v, cfg)
    H = en.facet_enum(V, cfg, method)
    return {
        "body": str(BodySpec.parse(spec)),
        "dim": V.dim,
        "vertices": len(V),
        "facets": len(H),
        "inradius": pc.inradius(H),
        "circumradius": pc.circumradius(V),
    }
