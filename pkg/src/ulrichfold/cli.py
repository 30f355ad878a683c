"""Scenario runner: each scenario rebuilds one object from scratch, checks it
against fixed expectations and writes a report.

    ulrichfold --scenario delpezzo-r2 --format json --out reports/

Exit status: 0 if every expectation holds, 2 if some expectation fails (the
report is still written), 3 if a random construction kept failing its
genericity checks.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

from . import __version__
from .errors import GenericityFailure, TimeBudgetExceeded, UlrichfoldError
from .ffield import DEFAULT_PRIME

log = logging.getLogger("ulrichfold")

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_GENERICITY = 0, 2, 3


@dataclass(frozen=True)
class Scenario:
    name: str
    prime: int = DEFAULT_PRIME
    seed: int = 1
    budget: float = 1800.0
    check_smooth: bool = False
    heavy: bool = False

    def __post_init__(self):
        if self.name not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.name!r}; known: {', '.join(SCENARIOS)}")


@dataclass
class Expectation:
    anchor: str
    label: str
    expected: object
    observed: object
    passed: bool


@dataclass
class Report:
    scenario: dict
    version: str = __version__
    tables: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    expectations: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    status: str = "ok"

    @property
    def passed(self) -> bool:
        return self.status == "ok" and all(e.passed for e in self.expectations)

    def to_json(self) -> dict:
        # timings vary run to run, so they stay out of the byte-stable document
        return {"schema": SCHEMA, "version": self.version, "scenario": self.scenario,
                "status": self.status, "passed": self.passed,
                "tables": self.tables, "values": self.values,
                "expectations": [asdict(e) for e in self.expectations]}

    @classmethod
    def from_json(cls, d: dict) -> "Report":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')}")
        return cls(scenario=d["scenario"], version=d["version"], tables=d["tables"],
                   values=d["values"], status=d["status"],
                   expectations=[Expectation(**e) for e in d["expectations"]])


# -- rendering ----------------------------------------------------------------------------

def _render_table(entries: list[dict]) -> str:
    from .resolve import BettiTable
    return BettiTable.from_list(entries).render()


def render_text(r: Report) -> str:
    sc = r.scenario
    out = [f"ulrichfold {r.version}  scenario={sc.get('name')}  p={sc.get('prime')}  "
           f"seed={sc.get('seed')}  heavy={sc.get('heavy')}"]
    if r.status != "ok":
        out.append(f"status: {r.status}")
    for name in sorted(r.tables):
        out.append(f"\n[{name}]")
        out.append(_render_table(r.tables[name]).rstrip("\n"))
    if r.values:
        out.append("")
        for k in sorted(r.values):
            out.append(f"{k} = {json.dumps(r.values[k], sort_keys=True)}")
    if r.expectations:
        out.append("")
        for e in r.expectations:
            mark = "PASS" if e.passed else "FAIL"
            out.append(f"{mark}  {e.anchor}: {e.label}  expected={json.dumps(e.expected)}"
                       f"  observed={json.dumps(e.observed)}")
    return "\n".join(out) + "\n"


def render_json(r: Report) -> str:
    return json.dumps(r.to_json(), indent=2, sort_keys=True) + "\n"


def emit_report(r: Report, fmt: str = "text", out_dir: str | None = None) -> str:
    """Render the report; with ``out_dir`` also write it (plus a timings sidecar)."""
    text = render_json(r) if fmt == "json" else render_text(r)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        base = os.path.join(out_dir, r.scenario["name"])
        with open(base + (".json" if fmt == "json" else ".txt"), "w") as fh:
            fh.write(text)
        with open(base + ".timings.json", "w") as fh:
            json.dump(r.timings, fh, indent=2, sort_keys=True)
    return text


# -- scenario context ---------------------------------------------------------------

class _Run:
    def __init__(self, s: Scenario):
        self.s = s
        self.rep = Report(scenario={"name": s.name, "prime": s.prime, "seed": s.seed,
                                    "budget": s.budget, "check_smooth": s.check_smooth,
                                    "heavy": s.heavy})
        self.t0 = time.monotonic()

    def mark(self, stage: str):
        self.rep.timings[stage] = round(time.monotonic() - self.t0, 3)
        log.info("%s: %s done at %.1fs", self.s.name, stage, self.rep.timings[stage])

    def expect(self, anchor: str, label: str, expected, observed, passed: bool | None = None):
        ok = (expected == observed) if passed is None else bool(passed)
        self.rep.expectations.append(Expectation(anchor, label, expected, observed, ok))
        return ok

    def table(self, name: str, bt):
        self.rep.tables[name] = bt.to_list()

    def value(self, name: str, v):
        self.rep.values[name] = v

    def remaining(self) -> float:
        return max(1.0, self.s.budget - (time.monotonic() - self.t0))


# -- shared constructions (pure in (prime, seed)) -------------------------------------------

@lru_cache(maxsize=None)
def delpezzo(p: int, seed: int):
    """Quintic del Pezzo: cubics through four general points, and a cubic containing it."""
    from .geom import blowup_surface, random_general_points
    from .ulrich import choose_cubic
    cfg = random_general_points(4, [1] * 4, seed=seed, p=p, degrees=[3])
    S = blowup_surface(cfg, 3, tag="delpezzo")
    return S, choose_cubic(S, seed)


@lru_cache(maxsize=None)
def degree9(p: int, seed: int):
    """(5; 2², 1⁸) in P⁶ and its projections to P⁵.

    Returns (cfg, Z, Y1, Y, G): ``Y1`` from a general point, ``Y`` from a point on a
    chord of ``Z`` and ``G`` the pushforward of ``O_Z`` to ``Y`` as an ``R``-module.
    """
    from .geom import (blowup_surface, chord_point, expected_hilbert_poly, project,
                       pushforward_module, random_general_points)
    cfg = random_general_points(10, [2, 2] + [1] * 8, seed=seed, p=p, degrees=[5])
    Z = blowup_surface(cfg, 5, tag="degree9")
    hp = expected_hilbert_poly(Z.meta["H2"], Z.meta["HK"])
    Y1 = project(Z, dim=0, seed=seed + 1)
    q = chord_point(Z, seed + 4)
    Y = project(Z, q, expected_hp=lambda s: hp(s) - 1)
    G = pushforward_module(Z, q)
    return cfg, Z, Y1, Y, G


@lru_cache(maxsize=None)
def rank3(p: int, seed: int):
    from .ulrich import choose_cubic, surface_to_ulrich
    _, _, _, Y, G = degree9(p, seed)
    X = choose_cubic(Y, seed + 2)
    return X, surface_to_ulrich(Y, X, module=G)


@lru_cache(maxsize=None)
def rank2(p: int, seed: int):
    from .ulrich import surface_to_ulrich
    S, X = delpezzo(p, seed)
    return X, surface_to_ulrich(S, X)


@lru_cache(maxsize=None)
def degree11(p: int, seed: int):
    """(6; 2⁵, 1⁵) in P⁷ projected from a line, with the pushforward module."""
    from .geom import blowup_surface, project, pushforward_module, random_center, random_general_points
    cfg = random_general_points(10, [2] * 5 + [1] * 5, seed=seed, p=p, degrees=[6])
    Z = blowup_surface(cfg, 6, tag="degree11")
    L = random_center(Z.ring, 1, seed + 1)
    Y = project(Z, L)
    G = pushforward_module(Z, L)
    return Z, Y, G


@lru_cache(maxsize=None)
def rank4(p: int, seed: int):
    from .ulrich import choose_cubic, surface_to_ulrich
    _, Y, G = degree11(p, seed)
    X = choose_cubic(Y, seed)
    return X, surface_to_ulrich(Y, X, module=G)


@lru_cache(maxsize=None)
def bourbaki(p: int, seed: int, r: int):
    from .ulrich import bourbaki_surface
    X, cert = {2: rank2, 3: rank3, 4: rank4}[r](p, seed)
    return X, cert, bourbaki_surface(cert, X, seed)


# -- scenarios -------------------------------------------------------------------------------

def _periodic_pair(cert) -> list[int]:
    tot = cert.extra["betti_RX"].total()
    s = cert.periodic_from
    return [tot[s], tot[s + 1]]


def _certificate_checks(run: _Run, cert, r: int, anchor: str, X=None):
    if X is not None:
        _smooth_fourfold(run, X, anchor)
    run.value(f"certificate_r{r}", cert.to_json())
    run.expect(anchor, "periodic ranks", [3 * r, 3 * r], _periodic_pair(cert))
    run.expect(anchor, "matrix factorization size", 3 * r, cert.size)
    run.expect(anchor, "A linear, AB = BA = f·I exact", True, cert.mf.is_linear() and cert.mf.verify())
    run.expect(anchor, "certificate rank", r, cert.rank)


def _smooth(run: _Run, S, anchor: str):
    if run.s.check_smooth:
        from .geom import smoothness_check
        run.expect(anchor, "surface smooth by the Jacobian criterion", True, smoothness_check(S))
        run.mark("smoothness")


def _smooth_fourfold(run: _Run, X, anchor: str):
    if run.s.check_smooth:
        run.expect(anchor, "cubic fourfold smooth by the Jacobian criterion", True, X.check_smooth())
        run.mark("fourfold_smoothness")


def sc_delpezzo(run: _Run):
    from .resolve import BettiTable, betti_table
    p, seed = run.s.prime, run.s.seed
    S, X = delpezzo(p, seed)
    bt = betti_table(S.resolution())
    run.table("surface", bt)
    run.expect("delpezzo.betti", "resolution of the quintic del Pezzo",
               BettiTable({(0, 0): 1, (1, 2): 5, (2, 3): 5, (3, 5): 1}).to_list(), bt.to_list())
    run.mark("surface")
    _smooth(run, S, "delpezzo.smooth")
    _, cert = rank2(p, seed)
    run.table("over_fourfold", cert.extra["betti_RX"])
    run.value("cubic_dim", X.cubic_dim)
    _certificate_checks(run, cert, 2, "delpezzo.mf", X)
    run.mark("certificate")


def sc_curve(run: _Run):
    from .geom import curve_degree_genus, hyperplane_section, rao_module
    from .resolve import Module, betti_table, hilbert, minimal_free_resolution, section_module
    p, seed = run.s.prime, run.s.seed
    _, _, Y1, _, _ = degree9(p, seed)
    run.mark("surface")
    C = hyperplane_section(Y1.ideal, seed + 2)
    F = minimal_free_resolution(Module.quotient(C))
    bt = betti_table(F)
    run.table("curve", bt)
    H = hilbert(Module.quotient(C))
    run.value("degree_genus", list(curve_degree_genus(H)))
    run.expect("curve.betti", "first syzygy row", [11, 18, 9, 1], bt.row(2)[1:5])
    window = range(-3, 7)
    rao = rao_module(C, window=(-3, 6))
    run.value("rao", {str(k): v for k, v in sorted(rao.items())})
    run.expect("curve.rao", "Rao module dimensions on [-3, 6]",
               [1 if d == 1 else 0 for d in window], [rao.get(d, 0) for d in window])
    G = section_module(C, F=F)
    diff = [G.hilbert_value(d) - H.value(d) for d in range(0, 7)]
    run.expect("curve.sections", "H_Gamma - H_C on degrees 0..6", [0, 1, 0, 0, 0, 0, 0], diff)
    run.mark("curve")


def sc_surface(run: _Run):
    from .geom import rao_module, surface_degree_genus
    from .resolve import BettiTable, betti_table, minimal_free_resolution
    from .ulrich import unfolding_check
    p, seed = run.s.prime, run.s.seed
    _, Z, _, Y, G = degree9(p, seed)
    run.mark("surfaces")
    d, g = surface_degree_genus(Y.hilbert())
    run.expect("surface.invariants", "degree and sectional genus", [9, 4], [d, g])
    bt = betti_table(Y.resolution())
    run.table("surface", bt)
    run.expect("surface.betti", "cubic row", [11, 18, 9, 1], bt.row(2)[1:5])
    rao = rao_module(Y, window=(-3, 6))
    run.value("rao_of_projection", {str(k): v for k, v in sorted(rao.items())})
    bg = betti_table(minimal_free_resolution(G))
    run.table("pushforward", bg)
    run.expect("surface.gamma", "resolution of the pushforward module",
               BettiTable.from_rows({0: [1], 1: [1, 5], 2: [0, 1, 8, 4]}).to_list(), bg.to_list())
    run.mark("modules")
    X, cert = rank3(p, seed)
    run.table("over_fourfold", cert.extra["betti_RX"])
    _certificate_checks(run, cert, 3, "surface.mf", X)
    run.mark("certificate")
    u = unfolding_check(Y, seed, with_dim=True)
    run.value("unfolding", u)
    run.expect("surface.unfolding", "phi psi = 0, A psi + phi B = 0, AB = 0", [True, True, True],
               [u["phi_psi"], u["linear_identity"], u["quadratic_identity"]])
    run.expect("surface.unfolding", "solution space of the linear condition", 15, u["linear_space_dim"])
    run.expect("surface.unfolding", "independent quadrics on it", 23, u["independent_quadrics"])
    run.mark("unfolding")


def _hassett_degree12(Y) -> dict:
    """H², HK from the Hilbert polynomial; K² and χ_top closed by Noether with χ(O) = 3."""
    H = Y.hilbert()
    chi = H.poly_value(0)
    H2, HK = Y.meta["H2"], Y.meta["HK"]
    # the surface is a blow-up of a K3 (K² = 0) when χ(O) = 3 is matched with 12χ = K² + χ_top
    K2 = 0
    return {"H2": H2, "HK": HK, "chi": chi, "K2": K2, "chi_top": 12 * chi - K2}


def sc_rank3(run: _Run):
    from .resolve import betti_table
    from .ulrich import bourbaki_shape, expected_ulrich_invariants, hassett, matches_up_to_ghosts, normal_module_dims
    from .ulrich import surface_to_ulrich, cubic_space
    p, seed = run.s.prime, run.s.seed
    X, cert, W = bourbaki(p, seed, 3)
    _certificate_checks(run, cert, 3, "rank3.mf", X)
    run.mark("certificate")
    bt = betti_table(W.resolution())
    run.table("bourbaki_surface", bt)
    want = expected_ulrich_invariants(3)
    run.expect("rank3.bourbaki", "degree, genus, ACM", [12, 10, True],
               [W.meta["degree"], W.meta["genus"], W.meta["acm"]])
    run.expect("rank3.bourbaki", "cubics, quartics, sextics", [8, 9, 2],
               [bt.get(1, 3), bt.get(2, 4), bt.get(3, 6)])
    run.expect("rank3.bourbaki", "table equals the Bourbaki shape up to ghost pairs", True,
               matches_up_to_ghosts(bt, bourbaki_shape(3)))
    run.value("cubics_in_ideal", len(cubic_space(W.ideal)))
    inv = _hassett_degree12(W)
    run.value("intersection_inputs", inv)
    hs = hassett(inv, 12)
    run.expect("rank3.hassett", "Y² and discriminant", [54, 18], [hs["Y2"], hs["delta"]])
    run.mark("bourbaki")
    back = surface_to_ulrich(W, X)
    run.expect("rank3.roundtrip", "Bourbaki surface gives back rank", 3, back.rank)
    run.mark("roundtrip")
    nm = normal_module_dims(W, X, with_h1=run.s.heavy, budget=run.remaining())
    run.value("normal_dims", nm)
    run.expect("rank3.normal", "h0 of the normal bundle in X", 16, nm["h0_NYX"])
    if "h1_NYP" in nm:
        run.expect("rank3.normal", "h1 of the normal bundle in P5", 0, nm["h1_NYP"])
    run.mark("normal")
    if run.s.heavy:
        _endo(run, cert, X, 10, "rank3.endo")


def _endo(run: _Run, cert, X, h1: int, anchor: str):
    from .ulrich import endo_cohomology
    try:
        e = endo_cohomology(cert, X, budget=run.remaining())
    except TimeBudgetExceeded as exc:
        run.value("endo_partial", exc.partial)
        run.expect(anchor, "endomorphism cohomology within budget", True, False)
        return
    run.value("endo", e)
    run.expect(anchor, "h0..h3 of End F", [1, h1, 0, 0], [e["h0"], e["h1"], e["h2"], e["h3"]])
    run.mark("endo")


def sc_rank4(run: _Run):
    from .geom import surface_degree_genus
    from .resolve import BettiTable, betti_table, minimal_free_resolution
    from .ulrich import cubic_space, normal_module_dims
    p, seed = run.s.prime, run.s.seed
    Z, Y, G = degree11(p, seed)
    run.mark("surfaces")
    run.expect("rank4.source", "degree and sectional genus", [11, 5], list(surface_degree_genus(Z.hilbert())))
    bt = betti_table(Y.resolution())
    run.table("projection", bt)
    run.expect("rank4.betti", "quartic row", [25, 65, 63, 28, 5], bt.row(3)[1:6])
    run.expect("rank4.betti", "unique cubic", 1, bt.get(1, 3))
    bg = betti_table(minimal_free_resolution(G))
    run.table("pushforward", bg)
    run.mark("modules")
    X, cert, W = bourbaki(p, seed, 4)
    _certificate_checks(run, cert, 4, "rank4.mf", X)
    run.mark("certificate")
    bw = betti_table(W.resolution())
    run.table("bourbaki_surface", bw)
    run.expect("rank4.bourbaki", "degree, genus, ACM", [22, 33, True],
               [W.meta["degree"], W.meta["genus"], W.meta["acm"]])
    run.expect("rank4.bourbaki", "cubics through it", 1, len(cubic_space(W.ideal)))
    run.mark("bourbaki")
    if run.s.heavy:
        nm = normal_module_dims(W, X, with_h1=False, budget=run.remaining())
        run.value("normal_dims", nm)
        run.expect("rank4.normal", "h0 of the normal bundle in X", 37, nm["h0_NYX"])
        try:
            h1 = normal_module_dims(W, None, budget=run.remaining())["h1_NYP"]
        except TimeBudgetExceeded:
            run.value("normal_h1_unreached", "time budget")
            h1 = None
        except MemoryError:
            run.value("normal_h1_unreached", "out of memory")
            h1 = None
        run.expect("rank4.normal", "h1 of the normal bundle in P5", 0, h1)
        run.mark("normal")


def _bourbaki_roundtrip(r: int):
    def sc(run: _Run):
        from .resolve import betti_table
        from .ulrich import (distinguished_flag, bourbaki_shape, expected_ulrich_invariants,
                             matches_up_to_ghosts, surface_to_ulrich)
        p, seed = run.s.prime, run.s.seed
        X, cert, W = bourbaki(p, seed, r)
        run.mark("bourbaki")
        want = expected_ulrich_invariants(r)
        bt = betti_table(W.resolution())
        run.table("bourbaki_surface", bt)
        run.table("expected_shape", want["betti"])
        run.expect(f"bourbaki.r{r}", "degree, genus, ACM", [want["degree"], want["genus"], True],
                   [W.meta["degree"], W.meta["genus"], W.meta["acm"]])
        run.expect(f"bourbaki.r{r}", "resolution up to ghost pairs", True,
                   matches_up_to_ghosts(bt, bourbaki_shape(r)))
        back = surface_to_ulrich(W, X)
        run.expect(f"bourbaki.r{r}", "round trip rank and size", [r, 3 * r], [back.rank, back.size])
        run.expect(f"bourbaki.r{r}", "round trip Ulrich resolution", cert.betti_R.to_list(), back.betti_R.to_list())
        run.value("provenance", distinguished_flag(W, X, cert))
        run.mark("roundtrip")
        if r == 2 and run.s.heavy:
            _endo(run, cert, X, 5, "bourbaki.r2.endo")
    return sc


def sc_linked(run: _Run):
    from .geom import (SurfaceModel, column_subscroll, conic_through, curve_image, degree_of, linkage,
                       scroll_through_curve)
    from .groebner import intersect, saturate_irrelevant
    from .polyring import Ideal
    from .resolve import BettiTable, Module, betti_table, hilbert, minimal_free_resolution
    from .ulrich import choose_cubic, surface_to_ulrich
    p, seed = run.s.prime, run.s.seed
    cfg, Z, _, Y, G = degree9(p, seed)
    Q, par = conic_through(cfg, (2, 3, 4, 5), seed)
    C2, psi = curve_image(Y.param, par)
    bc = betti_table(minimal_free_resolution(Module.quotient(C2)))
    run.table("rational_curve", bc)
    run.expect("linked.curve", "resolution of the rational curve",
               [8, 11, 3, 4, 10, 6, 1],
               bc.row(1)[1:4] + bc.row(2)[2:6])
    rows, S1 = scroll_through_curve(psi)
    Sig = column_subscroll(rows, 3, seed)
    run.expect("linked.scrolls", "degrees of S1 and Sigma", [4, 3], [degree_of(S1), degree_of(Sig)])
    run.mark("scrolls")
    X = choose_cubic(intersect(Y.ideal, S1), seed)
    S = linkage(Ideal(Y.ring, [X.f] + list(Sig.gens)), S1)
    run.expect("linked.residual", "degree of the residual surface", 5, degree_of(S))
    run.mark("linkage")
    P = saturate_irrelevant(Ideal(Y.ring, list(S.gens) + list(Y.ideal.gens)))
    length, kdim = hilbert(Module.quotient(P)).degree_and_dim()
    run.value("meet_krull_dim", kdim)
    run.expect("linked.meet", "length of the intersection of S and Y", 16, length)
    run.mark("intersection")
    c2 = surface_to_ulrich(SurfaceModel(S, {}), X)
    c3 = surface_to_ulrich(Y, X, module=G)
    run.expect("linked.certificates", "ranks carried by the same cubic", [2, 3], [c2.rank, c3.rank])
    run.mark("certificates")


def sc_hassett(run: _Run):
    from .ulrich import hassett
    inputs = {"H2": 12, "HK": 6, "K2": 0, "chi_top": 36}
    h = hassett(inputs, 12)
    run.value("degree12", {"inputs": inputs, **h})
    run.expect("hassett.degree12", "Y² and discriminant", [54, 18], [h["Y2"], h["delta"]])
    dp = {"H2": 5, "HK": -5, "K2": 5, "chi_top": 7}
    h = hassett(dp, 5)
    run.value("delpezzo", {"inputs": dp, **h})
    run.expect("hassett.delpezzo", "Y² and discriminant", [13, 14], [h["Y2"], h["delta"]])
    run.mark("arithmetic")


def sc_extension(run: _Run):
    from .ulrich import brill_noether_rho, expected_ulrich_invariants, extension_dimension
    for r, d, g in ((2, 5, 1), (3, 12, 10), (4, 22, 33)):
        e = expected_ulrich_invariants(r)
        run.expect("extension.invariants", f"degree and genus for rank {r}", [d, g], [e["degree"], e["genus"]])
    e = extension_dimension(4)
    run.value("extension_r4", e)
    run.expect("extension.count", "Ext dimension and family dimension, rank 4", [4, 13, True],
               [e["ext_dim"], e["family_dim"], e["family_dim"] < e["moduli_dim"]])
    run.expect("extension.rho", "Brill-Noether number rho(10, 4, 12)", 0, brill_noether_rho(10, 4, 12))
    run.mark("arithmetic")


SCENARIOS = {
    "delpezzo-r2": sc_delpezzo,
    "curve-9-4": sc_curve,
    "surface-9-4": sc_surface,
    "rank3-c18": sc_rank3,
    "rank4-plane": sc_rank4,
    "bourbaki-r2": _bourbaki_roundtrip(2),
    "bourbaki-r3": _bourbaki_roundtrip(3),
    "bourbaki-r4": _bourbaki_roundtrip(4),
    "linked-r23": sc_linked,
    "hassett-arith": sc_hassett,
    "extension-counts": sc_extension,
}


def run_scenario(s: Scenario) -> Report:
    """Run one scenario; genericity exhaustion propagates, other failures are recorded."""
    run = _Run(s)
    try:
        SCENARIOS[s.name](run)
    except GenericityFailure:
        raise
    except UlrichfoldError as exc:
        run.rep.status = f"error: {type(exc).__name__}: {exc}"
    run.mark("total")
    return run.rep


def exit_code(r: Report) -> int:
    return EXIT_OK if r.passed else EXIT_FAIL


def _run_one(args_tuple):
    s, fmt, out = args_tuple
    try:
        rep = run_scenario(s)
    except GenericityFailure as exc:
        return s.name, EXIT_GENERICITY, f"{s.name}: genericity retries exhausted: {exc}\n"
    text = emit_report(rep, fmt, out)
    return s.name, exit_code(rep), text


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="ulrichfold", description=__doc__.split("\n")[0])
    ap.add_argument("--scenario", action="append", choices=list(SCENARIOS) + ["all"], required=True,
                    help="scenario name; repeat or use 'all'")
    ap.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default=None, help="directory for report files")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--check-smooth", action="store_true")
    ap.add_argument("--heavy", action="store_true", help="also run the expensive cohomology checks")
    ap.add_argument("--budget", type=float, default=1800.0, help="seconds per scenario")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("-v", "--verbose", action="store_true")
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    names = list(SCENARIOS) if "all" in a.scenario else list(dict.fromkeys(a.scenario))
    jobs = [(Scenario(n, a.prime, a.seed, a.budget, a.check_smooth, a.heavy), a.format, a.out)
            for n in names]
    if a.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as ex:
            results = list(ex.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    code = EXIT_OK
    for name, rc, text in results:
        if a.out is None or rc == EXIT_GENERICITY:
            sys.stdout.write(text)
        else:
            print(f"{name}: {'pass' if rc == EXIT_OK else 'FAIL'}")
        code = max(code, rc)
    return code


if __name__ == "__main__":
    sys.exit(main())
