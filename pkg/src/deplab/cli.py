"""Command-line front end: ``deplab <subcommand> ...``.

Every subcommand writes one JSON report (``--out`` or stdout).  Reports carry
``"schema": 1``; wall-clock data lives under ``"metadata"`` so that the rest
of the report is byte-identical between runs with the same arguments.

Exit codes: 0 success, 2 mismatch against the reference table under
``--verify``, 3 dependency ratio inside the dead band, 4 budget refusal.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from . import __version__

log = logging.getLogger("deplab")

EXIT_OK, EXIT_MISMATCH, EXIT_DEAD_BAND, EXIT_BUDGET = 0, 2, 3, 4
SCHEMA = 1
LABELS = ("1", "eta", "eta2")


def load_constants() -> dict:
    with resources.files("deplab").joinpath("data/constants.json").open() as fh:
        return json.load(fh)


@dataclass
class RunConfig:
    command: str
    dim: int | None = None
    eigenspace: str | None = None
    seed: int = 1
    fiducial: str | None = None
    sic: bool = False
    dep_tol: float = 1e-8
    orth_tol: float = 1e-8
    sic_tol: float = 1e-8
    zero_tol: float = 1e-10
    dead_band: tuple = (1e-10, 1e-6)
    workers: int | None = None
    long_run: bool = False
    budget: float = 5e9
    checkpoint: str | None = None
    out: str | None = None
    sets: str | None = None
    verify: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("dep_tol", "orth_tol", "sic_tol", "zero_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        lo, hi = self.dead_band
        if not 0 < lo < hi:
            raise ValueError("dead band must satisfy 0 < low < high")

    def public(self) -> dict:
        d = asdict(self)
        for k in ("out", "workers", "checkpoint"):
            d.pop(k)
        d["dead_band"] = list(self.dead_band)
        return d


class Outcome:
    """Collects results and verification checks for one run."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.results: dict = {}
        self.checks: list = []
        self.code = EXIT_OK
        self.t0 = time.time()

    def check(self, name: str, found, expected, cite: str, ok: bool | None = None):
        ok = (found == expected) if ok is None else bool(ok)
        self.checks.append({"name": name, "found": found, "expected": expected,
                            "cite": cite, "ok": ok})
        if not ok:
            log.warning("mismatch %s: found %s, expected %s (%s)", name, found, expected, cite)
            if self.cfg.verify and self.code == EXIT_OK:
                self.code = EXIT_MISMATCH

    def report(self) -> dict:
        rep = {"schema": SCHEMA, "command": self.cfg.command, "config": self.cfg.public(),
               "results": _jsonable(self.results)}
        if self.checks:
            rep["verify"] = {"ok": all(c["ok"] for c in self.checks),
                             "checks": _jsonable(self.checks)}
        rep["metadata"] = {"timestamp": datetime.now(timezone.utc).isoformat(),
                           "elapsed_s": round(time.time() - self.t0, 3),
                           "version": __version__}
        return rep


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _c17(z: complex) -> list[str]:
    return [f"{z.real:.17g}", f"{z.imag:.17g}"]


# fiducials --------------------------------------------------------------------

def resolve_fiducial(cfg: RunConfig):
    from .orbits import load_fiducial, minimize_frame_potential, sample_eigenspace
    from .phasespace import DimensionContext
    if cfg.fiducial:
        return load_fiducial(cfg.fiducial, dimension=cfg.dim)
    ctx = DimensionContext(cfg.dim)
    label = cfg.eigenspace or "1"
    if cfg.sic:
        res = minimize_frame_potential(ctx, label, seed=cfg.seed)
        if not res.is_sic:
            raise RuntimeError(f"no SIC found in H_{label} for N = {cfg.dim} "
                               f"after {res.restarts_used} restarts")
        return res.fiducial
    return sample_eigenspace(ctx, label, cfg.seed)


def _is_sic(orbit, tol) -> bool:
    from .orbits import sic_check
    return sic_check(orbit, tol).is_sic


# subcommands ---------------------------------------------------------------------

def cmd_search(cfg: RunConfig, out: Outcome):
    from .depsearch.classify import tag_symmetries
    from .depsearch.search import SearchConfig, exhaustive_search
    from .orbits import generate_orbit
    C = load_constants()
    f = resolve_fiducial(cfg)
    orbit = generate_orbit(f)
    scfg = SearchConfig(dep_tol=cfg.dep_tol, dead_band=tuple(cfg.dead_band), budget=cfg.budget,
                        long_run=cfg.long_run, workers=cfg.workers, checkpoint_dir=cfg.checkpoint,
                        progress=lambda done, total, v: log.info("chunk %d/%d", done, total))
    rep = exhaustive_search(orbit, scfg)
    m = rep.margins
    res = {"dimension": rep.N, "eigenspace": rep.label, "provenance": rep.provenance,
           "count": rep.total, "rank_histogram": rep.rank_histogram,
           "margins": {"max_dependent_ratio": m.max_dependent_ratio,
                       "min_independent_ratio": m.min_independent_ratio,
                       "dead_band_count": m.dead_band_count,
                       "certified_floor": m.certified_floor},
           "visited_nodes": rep.visited, "svd_candidates": rep.candidates}
    if rep.total and rep.total <= cfg.extra.get("classify_limit", 2_000_000):
        cl = rep.orbit_classification()
        res["orbits"] = cl.summary()
        if rep.N % 3 == 0:
            tags = tag_symmetries(rep.sets, rep.N, cl)
            res["symmetry"] = {"sets": tags.set_counts, "orbits": tags.orbit_counts}
    if cfg.sets:
        res["sets_path"] = cfg.sets
        res["sets_written"] = rep.write_sidecar(cfg.sets)
    out.results = res
    if m.dead_band_count:
        out.code = EXIT_DEAD_BAND
        log.error("%d subsets have a ratio inside the dead band %s", m.dead_band_count, cfg.dead_band)
    sic = rep.N == 8 and rep.label == "eta2" and _is_sic(orbit, cfg.sic_tol)
    if sic:
        out.check("count", rep.total, C["sic8"]["count"], C["sic8"]["cite"])
    else:
        exp = C["dependent_counts"]["counts"].get(str(rep.N), {}).get(rep.label or "")
        if exp is not None:
            out.check("count", rep.total, exp, C["dependent_counts"]["cite"])


def cmd_predict(cfg: RunConfig, out: Outcome):
    from .depsearch.predict import predict_sets, predicted_count_bound
    from .orbits import generate_orbit
    C = load_constants()
    f = resolve_fiducial(cfg)
    p = predict_sets(generate_orbit(f), verify=True)
    out.results = {"dimension": p.N, "eigenspace": p.label, "count": p.count,
                   "before_dedup": p.raw_count, "conjugate_maps": p.n_maps,
                   "patterns": [list(x) for x in p.patterns], "max_ratio": p.max_ratio,
                   "all_dependent": p.all_dependent,
                   "count_bound": predicted_count_bound(p.N, p.label)}
    out.check("all_dependent", p.all_dependent, True, "predicted sets must be dependent")
    exp = C["dependent_counts"]["predicted"].get(str(p.N), {}).get(p.label)
    if p.N == 9:
        exp = C["dim9"]["predicted"].get(p.label)
    if exp is not None:
        out.check("count", p.count, exp, C["dependent_counts"]["cite"])
    bound = C["dependent_counts"]["predicted_upper_bound"].get(str(p.N), {}).get(p.label)
    if bound is not None:
        out.check("count_bound", out.results["count_bound"], bound, C["dependent_counts"]["cite"])


def _sets_for(cfg: RunConfig, orbit):
    """All dependent sets (N <= 7 exhaustive, N = 9 targeted) plus a classification."""
    from .depsearch.classify import classify_orbits
    from .depsearch.search import SearchConfig, exhaustive_search
    from .depsearch.targeted import expand_reps, targeted_search
    if orbit.N == 9:
        t = targeted_search(orbit)
        S = expand_reps(t.sets, 9)
        return S, t.classification, {"count_kind": "targeted-search count",
                                     "targeted_max_ratio": t.max_ratio,
                                     "closure_rounds": t.closure_rounds}
    rep = exhaustive_search(orbit, SearchConfig(workers=cfg.workers, long_run=cfg.long_run))
    S, _ = rep.all_sets()
    return S, classify_orbits(S, orbit.N), {"count_kind": "exhaustive"}


def cmd_classify(cfg: RunConfig, out: Outcome):
    from .depsearch.classify import structure_signature, structure_table, tag_symmetries
    from .orbits import generate_orbit
    C = load_constants()
    orbit = generate_orbit(resolve_fiducial(cfg))
    S, cl, extra = _sets_for(cfg, orbit)
    res = {"dimension": orbit.N, "count": cl.total, "n_orbits": cl.n_orbits,
           "orbits": cl.summary(), **extra}
    if orbit.N % 3 == 0:
        tags = tag_symmetries(S, orbit.N, cl)
        res["symmetry"] = {"sets": tags.set_counts, "orbits": tags.orbit_counts,
                           "m_invariant_orbits": int(tags.orbit_m.sum())}
        sig = structure_signature(structure_table(cl))
        res["structure"] = [{"symmetry_orbits": k[0], "subgroup_orbits": k[1],
                             "length": k[3], "n": v} for k, v in sorted(sig.items())]
    out.results = res
    if orbit.N == 6 and orbit.fiducial.label == "1":
        d = C["dim6_structure"]
        out.check("orbits", {str(k): v for k, v in cl.length_histogram().items()}, d["orbits"], d["cite"])
        short = [s for s, n in zip(cl.stabilizers, cl.lengths) if n == 12]
        out.check("short_stabilizer", [sorted(list(map(list, s))) for s in short],
                  [d["short_orbit_stabilizer"]], d["cite"])
        out.check("m_only_sets", res["symmetry"]["sets"]["m"], d["m_only_sets"], d["cite"])
        out.check("m_only_orbits", res["symmetry"]["orbits"]["m"], d["m_only_orbits"], d["cite"])
        z = res["symmetry"]["orbits"]["zauner"] + res["symmetry"]["orbits"]["both"]
        out.check("zauner_orbits", z, d["zauner_orbits"], d["cite"])
    if orbit.N == 9:
        out.check("count_at_least", cl.total, C["dim9"]["found_at_least"], C["dim9"]["cite"],
                  ok=cl.total >= C["dim9"]["found_at_least"])


def cmd_normals(cfg: RunConfig, out: Outcome):
    from .depsearch.normals import mub_check, normals, orthogonality_analysis
    from .orbits import dim3_family, generate_orbit
    C = load_constants()
    if cfg.dim == 3 and cfg.fiducial is None:
        f = dim3_family(cfg.extra.get("theta", 0.0))[0]
    else:
        f = resolve_fiducial(cfg)
    orbit = generate_orbit(f)
    S, cl, _ = _sets_for(cfg, orbit)
    nv = normals(S, orbit, cfg.dep_tol)
    res = {"dimension": orbit.N, "n_sets": len(S), "n_normals": len(nv.vectors),
           "rank_deficient_skipped": nv.skipped, "max_residual": nv.max_residual,
           "is_sic": _is_sic(orbit, cfg.sic_tol)}
    mub = mub_check(nv.vectors, cfg.orth_tol)
    res["mub"] = {"complete": mub.complete, "n_bases": len(mub.bases),
                  "max_unbiased_error": mub.max_unbiased_error}
    if cfg.extra.get("orthogonality"):
        rep = orthogonality_analysis(nv.vectors, cl.set_orbit[nv.set_index], cfg.orth_tol)
        res["orthogonality"] = {
            "edges": rep.n_edges, "triangles": rep.n_triangles, "quadruples": rep.n_quadruples,
            "max_clique": rep.max_clique, "triangles_single_orbit": rep.triangles_single_orbit,
            "maximal_triangles": len(rep.maximal_triangles),
            "maximal_triangles_single_orbit": rep.maximal_triangles_single_orbit,
            "quadruple_orbits": {str(k): v for k, v in rep.orbit_quadruples.items()}}
        if orbit.N == 6:
            d = C["dim6_structure"]
            out.check("single_orbit_triples", rep.maximal_triangles_single_orbit,
                      d["single_orbit_triples"], d["cite"])
            if res["is_sic"]:
                out.check("quadruples", rep.n_quadruples, d["sic_quadruples"], d["cite"])
                out.check("quadruple_orbits", len(rep.orbit_quadruples), 1, d["cite"])
    out.results = res


def cmd_small_sics(cfg: RunConfig, out: Outcome):
    from .depsearch.normals import normals
    from .orbits import generate_orbit
    from .phasespace import DimensionContext
    from .structure import find_small_sics, has_displacement_form
    C = load_constants()
    if cfg.dim not in (6, 9):
        raise ValueError("small-sics supports --dim 6 or 9")
    orbit = generate_orbit(resolve_fiducial(cfg))
    S, cl, _ = _sets_for(cfg, orbit)
    nv = normals(S, orbit, cfg.dep_tol)
    anchors = None
    if cfg.dim == 9:
        # one anchor per WH orbit of sets; translation covariance carries the rest
        from .depsearch.classify import classify_orbits
        set_orbit = classify_orbits(S, cfg.dim).set_orbit
        first = {}
        for k, o in enumerate(set_orbit[nv.set_index]):
            first.setdefault(int(o), k)
        anchors = sorted(first.values()) or None
    sics = find_small_sics(nv.vectors, cfg.dim // 3, anchors=anchors)
    ctx = DimensionContext(cfg.dim)
    out.results = {
        "dimension": cfg.dim, "n_normals": len(nv.vectors), "count": len(sics),
        "anchored_on_orbit_representatives": anchors is not None,
        "small_sics": [{"span_dim": s.span_dim, "overlap": s.overlap, "spread": s.spread,
                        "frame_error": s.frame_error(),
                        "displacement_form": has_displacement_form(s, ctx) if cfg.dim == 6 else None,
                        "vectors": [[_c17(z) for z in v] for v in s.vectors]} for s in sics]}
    sc = C["small_sics"]
    if cfg.dim == 6:
        out.check("count", len(sics), sc["dim6"], sc["cite"])
        out.check("displacement_form", all(has_displacement_form(s, ctx) for s in sics), True, sc["cite"])
    else:
        out.check("count_at_least", len(sics), sc["dim9_at_least"], sc["cite"],
                  ok=len(sics) >= sc["dim9_at_least"])


def cmd_span_table(cfg: RunConfig, out: Outcome):
    from .structure import span_table
    C = load_constants()
    dims = cfg.extra.get("dims") or [6, 9, 12, 15]
    seeds = range(1, cfg.extra.get("seeds", 5) + 1)
    table = {}
    for N in dims:
        row = []
        for lab in LABELS:
            vals = sorted({span_table(N, lab, s) for s in seeds})
            row.append(vals[0] if len(vals) == 1 else vals)
        table[str(N)] = row
        exp = C["subgroup_spans"]["spans"].get(str(N))
        if exp is not None:
            out.check(f"span N={N}", row, exp, C["subgroup_spans"]["cite"])
    out.results = {"labels": list(LABELS), "spans": table, "seeds": list(seeds)}
    if not cfg.out:
        print("N   " + "  ".join(f"{lab:>5}" for lab in LABELS), file=sys.stderr)
        for N, row in table.items():
            print(f"{N:<3} " + "  ".join(f"{str(v):>5}" for v in row), file=sys.stderr)


def cmd_monomial(cfg: RunConfig, out: Outcome):
    from .monomial import (
        build_monomial_basis,
        clifford_sample_monomial,
        knomial_dim8_check,
        origin_invariance_errors,
        uf_zero_component_check,
        zauner_zero_component_check,
    )
    from .orbits import sample_eigenspace
    from .phasespace import DimensionContext
    ctx = DimensionContext(cfg.dim)
    check = cfg.extra.get("check") or ("knomial8" if cfg.dim == 8 else
                                       "zauner" if math.isqrt(cfg.dim) % 3 == 0 else "uf")
    res = {"dimension": cfg.dim, "check": check}
    if check == "knomial8":
        rep = knomial_dim8_check(sample_eigenspace(ctx, cfg.eigenspace or "eta2", cfg.seed))
        res.update(zero_components=rep.zero_components, zero_labels=rep.zero_labels,
                   block_monomial=rep.block_monomial, orthogonal_points=rep.orthogonal_points,
                   orthogonal_rank=rep.orthogonal_rank, sample_set=rep.sample_set,
                   sample_ratio=rep.sample_ratio)
        if (cfg.eigenspace or "eta2") == "eta2":
            out.check("zero_components", rep.zero_components, 2, "dimension-8 two-zero-entry rule")
            out.check("dependency", rep.dependency_found, True, "dimension-8 two-zero-entry rule")
    else:
        mb = build_monomial_basis(ctx)
        res["action_errors"] = mb.action_errors()
        res["clifford_sample_monomial"] = all(clifford_sample_monomial(ctx))
        if ctx.N % 2:
            res["origin_invariance_max_error"] = max(origin_invariance_errors(ctx))
        rep = (zauner_zero_component_check if check == "zauner" else uf_zero_component_check)(ctx)
        res.update(diagonal=[_c17(complex(z)) for z in rep.diagonal], monomial=rep.monomial,
                   forced_zero_labels=[mb.labels[i] for i in rep.forced_zeros],
                   sample_forced_components=rep.sample_min_components,
                   dependent_sets=len(rep.sets), partition=rep.partition,
                   all_dependent=rep.all_dependent, normals_are_basis=rep.normals_are_basis)
        if check == "zauner":
            eta = np.exp(2j * np.pi / 3)
            expect = sorted([1, 1, eta], key=lambda z: (round(z.real, 9), round(z.imag, 9)))
            got = sorted(rep.diagonal, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
            ok = len(got) == 3 and all(abs(a - b) < 1e-10 for a, b in zip(got, expect))
        else:
            ok = (len(rep.diagonal) == 2 and min(abs(z - 1) for z in rep.diagonal) < 1e-10
                  and min(abs(z - 1j) for z in rep.diagonal) < 1e-10)
        if check == "uf":
            from .monomial import uf_unitary
            ev = np.linalg.eigvals(uf_unitary(ctx))
            res["reference_value_in_spectrum"] = bool(np.min(np.abs(ev - 1j)) < 1e-9)
        out.check("diagonal", ok, True, f"monomial diagonal of the {check} unitary")
        out.check("dependent_sets", len(rep.sets), ctx.N, "orbit splits into N dependent sets")
        out.check("all_dependent", rep.all_dependent, True, "orbit splits into N dependent sets")
    out.results = res


def cmd_trace_check(cfg: RunConfig, out: Outcome):
    from .phasespace import DimensionContext, random_symplectic
    from .unitary_rep import trace_gauss
    ctx = DimensionContext(cfg.dim)
    rng = np.random.default_rng(cfg.seed)
    worst, below_one = 0.0, 0
    n = cfg.extra.get("count", 100)
    for _ in range(n):
        r = trace_gauss(random_symplectic(rng, ctx.N), ctx)
        worst = max(worst, abs(r.analytic - r.numeric))
        below_one += r.analytic < 1 - 1e-9
    out.results = {"dimension": ctx.N, "samples": n, "max_abs_difference": worst,
                   "below_one": below_one}
    out.check("gauss_vs_numeric", worst < 1e-9, True, "Gauss-sum trace formula")
    out.check("trace_at_least_one", below_one, 0, "Gauss-sum trace formula")


def cmd_tensor_check(cfg: RunConfig, out: Outcome):
    from .phasespace import DimensionContext, random_symplectic
    from .unitary_rep import tensor_rep_check
    ctx = DimensionContext(cfg.dim)
    rng = np.random.default_rng(cfg.seed)
    mats = [random_symplectic(rng, ctx.N) for _ in range(cfg.extra.get("count", 100))]
    r = tensor_rep_check(ctx, mats)
    out.results = {"dimension": ctx.N, "points": r.n_points, "matrices": r.n_matrices,
                   "max_displacement_error": r.max_displacement_error,
                   "max_unitary_error": r.max_unitary_error}
    out.check("tensor_identities", r.ok, True, "CRT tensor decomposition")


def cmd_order_dividing(cfg: RunConfig, out: Outcome):
    from .depsearch.order_dividing import (
        eigenvector_samples,
        general_dependency_construction,
        random_order_dividing,
    )
    from .phasespace import DimensionContext, n_order, parity_matrix
    from .unitary_rep import symplectic_unitary
    ctx = DimensionContext(cfg.dim)
    rng = np.random.default_rng(cfg.seed)
    if cfg.extra.get("parity"):
        mats = [parity_matrix(ctx)]
    else:
        mats = random_order_dividing(rng, ctx, cfg.extra.get("count", 100))
    tested, failures = 0, []
    for G in mats:
        U = symplectic_unitary(G, ctx)
        for v in eigenvector_samples(U, n_order(G, ctx)[0], rng):
            r = general_dependency_construction(G, v, ctx)
            tested += 1
            if not r.ok:
                failures.append({"G": list(G.entries), "reason": r.failed})
    out.results = {"dimension": ctx.N, "matrices": len(mats), "eigenvectors_tested": tested,
                   "failures": failures[:20], "n_failures": len(failures)}
    out.check("all_constructed", len(failures), 0, "order-dividing construction")


def cmd_multiplicities(cfg: RunConfig, out: Outcome):
    from .unitary_rep import _zauner_cached
    C = load_constants()
    lo, hi = cfg.extra.get("range", (3, 16))
    rows = {}
    for N in range(lo, hi + 1):
        _, dec = _zauner_cached(N)
        got = [dec.by_power(k).dim for k in range(3)]
        k, r = divmod(N, 3)
        exp = [k + int(e[1:] or 0) for e in C["multiplicities"]["rule"][str(r)]]
        rows[str(N)] = got
        out.check(f"N={N}", got, exp, C["multiplicities"]["cite"])
    out.results = {"labels": list(LABELS), "dims": rows}


def cmd_dim3(cfg: RunConfig, out: Outcome):
    from .depsearch.normals import mub_check, normals
    from .depsearch.search import SearchConfig, exhaustive_search
    from .orbits import dim3_family, generate_orbit, parity_projector_error
    C = load_constants()
    theta = cfg.extra.get("theta", 0.0)
    orbit = generate_orbit(dim3_family(theta)[0])
    rep = exhaustive_search(orbit, SearchConfig(workers=1))
    S, _ = rep.all_sets()
    nv = normals(S, orbit)
    mub = mub_check(nv.vectors, cfg.orth_tol)
    special = min(abs(theta % (2 * np.pi / 9)), abs(theta % (2 * np.pi / 9) - 2 * np.pi / 9)) < 1e-12
    out.results = {"theta": theta, "count": rep.total, "sets": S.tolist(),
                   "mub": {"complete": mub.complete, "n_bases": len(mub.bases),
                           "max_unbiased_error": mub.max_unbiased_error},
                   "parity_projector_error": parity_projector_error(theta) if theta == 0 else None}
    d = C["dim3"]
    out.check("count", rep.total, d["special"] if special else d["generic"], d["cite"])
    if special:
        out.check("mub", mub.complete, True, d["cite"])


COMMANDS = {
    "search": cmd_search, "predict": cmd_predict, "classify": cmd_classify,
    "normals": cmd_normals, "small-sics": cmd_small_sics, "span-table": cmd_span_table,
    "monomial": cmd_monomial, "trace-check": cmd_trace_check, "tensor-check": cmd_tensor_check,
    "theorem5": cmd_order_dividing, "table1": cmd_multiplicities, "dim3": cmd_dim3,
}


# argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deplab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"deplab {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, dim=True, fid=False):
        if dim:
            sp.add_argument("--dim", type=int, required=dim is True)
        if fid:
            sp.add_argument("--eigenspace", choices=LABELS, default="1")
            sp.add_argument("--fiducial", help="fiducial JSON file (overrides --eigenspace sampling)")
            sp.add_argument("--sic", action="store_true",
                            help="use a SIC found by frame-potential minimisation in the eigenspace")
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--verify", action="store_true",
                        help="compare with the reference table; exit 2 on mismatch")
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--long-run", action="store_true")

    sp = sub.add_parser("search", help="exhaustive dependent-set enumeration")
    common(sp, fid=True)
    sp.add_argument("--sets", help="write every dependent set to this sidecar file")
    sp.add_argument("--checkpoint", help="directory for per-chunk checkpoints")
    sp.add_argument("--budget", type=float, default=5e9)
    sp.add_argument("--dep-tol", type=float, default=1e-8)
    sp.add_argument("--dead-band", type=float, nargs=2, default=(1e-10, 1e-6))
    sp.add_argument("--dump-unitary", help="also write the Zauner unitary as JSON here")

    sp = sub.add_parser("predict", help="sets forced by Zauner-conjugate symmetry")
    common(sp, fid=True)
    sp = sub.add_parser("classify", help="WH orbits and symmetry classes of dependent sets")
    common(sp, fid=True)
    sp = sub.add_parser("normals", help="normal vectors of dependent sets")
    common(sp, fid=True)
    sp.add_argument("--orthogonality", action="store_true")
    sp.add_argument("--theta", type=float, default=0.0, help="dimension-3 family parameter")
    sp = sub.add_parser("small-sics", help="lower-dimensional SICs among normals")
    common(sp, fid=True)
    sp = sub.add_parser("span-table", help="span of the (0,3),(3,0) subgroup vectors")
    common(sp, dim=False)
    sp.add_argument("--dims", type=int, nargs="+")
    sp.add_argument("--seeds", type=int, default=5, help="use seeds 1..SEEDS")
    sp = sub.add_parser("monomial", help="monomial-basis checks in square dimensions")
    common(sp)
    sp.add_argument("--check", choices=("zauner", "uf", "knomial8"))
    sp.add_argument("--eigenspace", choices=LABELS)
    for name, hlp in (("trace-check", "Gauss-sum traces of random symplectic unitaries"),
                      ("tensor-check", "CRT tensor-product identities"),
                      ("theorem5", "dependencies from order-dividing symplectic matrices")):
        sp = sub.add_parser(name, help=hlp)
        common(sp)
        sp.add_argument("--count", type=int, default=100)
        if name == "theorem5":
            sp.add_argument("--parity", action="store_true", help="use the parity matrix only")
    sp = sub.add_parser("table1", help="Zauner eigenspace multiplicities")
    common(sp, dim=False)
    sp.add_argument("--range", type=int, nargs=2, default=(3, 16))
    sp = sub.add_parser("dim3", help="dimension-3 SIC family")
    common(sp, dim=False)
    sp.add_argument("--theta", type=float, default=0.0)
    return p


def config_from_args(a: argparse.Namespace) -> RunConfig:
    extra = {}
    for k in ("orthogonality", "theta", "dims", "seeds", "check", "count", "parity", "range"):
        if getattr(a, k, None) not in (None, False):
            extra[k] = getattr(a, k)
    return RunConfig(
        command=a.command, dim=getattr(a, "dim", None), eigenspace=getattr(a, "eigenspace", None),
        seed=a.seed, fiducial=getattr(a, "fiducial", None), sic=getattr(a, "sic", False),
        dep_tol=getattr(a, "dep_tol", 1e-8), dead_band=tuple(getattr(a, "dead_band", (1e-10, 1e-6))),
        workers=a.workers, long_run=a.long_run, budget=getattr(a, "budget", 5e9),
        checkpoint=getattr(a, "checkpoint", None), out=a.out, sets=getattr(a, "sets", None),
        verify=a.verify, extra=extra)


def run(cfg: RunConfig) -> tuple[int, dict]:
    from .depsearch.search import BudgetExceeded
    out = Outcome(cfg)
    try:
        COMMANDS[cfg.command](cfg, out)
    except BudgetExceeded as e:
        log.error("budget refusal: %s", e)
        out.results = {"error": "budget", "message": str(e)}
        out.code = EXIT_BUDGET
    return out.code, out.report()


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(a.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = config_from_args(a)
    if getattr(a, "dump_unitary", None):
        from .unitary_rep import _zauner_cached, dump_unitary
        with open(a.dump_unitary, "w") as fh:
            fh.write(dump_unitary(_zauner_cached(cfg.dim)[0]))
    code, rep = run(cfg)
    text = json.dumps(rep, indent=2, sort_keys=False)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
