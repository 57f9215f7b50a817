"""Exhaustive search for linearly dependent N-subsets of a WH orbit.

Work is split by the first two indices of the lexicographically ordered
subset.  By default only subsets containing index 0 (the fiducial itself)
are enumerated: translation by q maps dependent sets to dependent sets, so
the full family is the translation closure of the anchored one and its size
is N times the anchored count.  ``anchored=False`` enumerates everything and
is kept for cross-checking.
"""
from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import comb
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from ..orbits import WHOrbit
from ._kernel import enumerate_chunk
from .sets import (
    DEAD_BAND,
    DEP_TOL,
    DependencySet,
    index_points,
    pack_rows,
    ratio_and_rank,
    singular_values,
    translation_table,
)

DEFAULT_BUDGET = 5e9
LONG_RUN_DIM = 8


class BudgetExceeded(RuntimeError):
    pass


class DeadBandError(RuntimeError):
    pass


@dataclass
class SearchConfig:
    dep_tol: float = DEP_TOL
    dead_band: tuple[float, float] = DEAD_BAND
    gs_tol: float = 1e-7
    budget: float = DEFAULT_BUDGET
    long_run: bool = False
    workers: int | None = None
    anchored: bool = True
    checkpoint_dir: str | None = None
    progress: Callable | None = None

    def __post_init__(self):
        lo, hi = self.dead_band
        if not (0 < lo < self.dep_tol < hi):
            raise ValueError("tolerances must satisfy 0 < dead-band low < dep_tol < dead-band high")

    def resolved_workers(self) -> int:
        if self.workers:
            return int(self.workers)
        env = os.environ.get("DEPLAB_WORKERS")
        return int(env) if env else (os.cpu_count() or 1)


@dataclass
class Margins:
    max_dependent_ratio: float | None = None
    min_independent_ratio: float | None = None
    dead_band_count: int = 0
    dead_band_examples: list = field(default_factory=list)
    certified_floor: float = DEAD_BAND[1]

    def merge(self, other: "Margins"):
        def mx(a, b):
            return b if a is None else a if b is None else max(a, b)

        def mn(a, b):
            return b if a is None else a if b is None else min(a, b)

        self.max_dependent_ratio = mx(self.max_dependent_ratio, other.max_dependent_ratio)
        self.min_independent_ratio = mn(self.min_independent_ratio, other.min_independent_ratio)
        self.dead_band_count += other.dead_band_count
        room = 20 - len(self.dead_band_examples)
        self.dead_band_examples.extend(other.dead_band_examples[:max(room, 0)])


def check_budget(N: int, cfg: SearchConfig) -> int:
    total = comb(N * N, N)
    if total > cfg.budget:
        raise BudgetExceeded(
            f"C({N * N},{N}) = {total:.3e} subsets exceeds the budget of {cfg.budget:.1e}")
    if N >= LONG_RUN_DIM and not cfg.long_run:
        raise BudgetExceeded(f"dimension {N} ({total:.3e} subsets) requires --long-run")
    return total


# worker side -------------------------------------------------------------------

_W: dict = {}


def _init_worker(rows, params):
    _W["rows"] = rows
    _W.update(params)


def _run_chunk(prefix: tuple[int, ...]):
    rows = _W["rows"]
    N = rows.shape[1]
    pre = np.array(prefix, dtype=np.int64)
    cap = _W.get("cap", 1 << 14)
    while True:
        out = np.empty((cap, N), dtype=np.int64)
        cnt, visited = enumerate_chunk(rows, N, pre, _W["det_thr"], _W["ratio_thr"],
                                       _W["gs_tol"], _W["vrand"], out, cap)
        if cnt <= cap:
            break
        cap = int(cnt * 1.25) + 16
    _W["cap"] = cap
    cand = out[:cnt]
    sv = singular_values(rows, cand)
    ratio, rank = ratio_and_rank(sv, _W["dep_tol"])
    dep = ratio < _W["dep_tol"]
    lo, hi = _W["dead_band"]
    dead = (ratio >= lo) & (ratio <= hi)
    m = Margins(
        max_dependent_ratio=float(ratio[dep].max()) if dep.any() else None,
        min_independent_ratio=float(ratio[~dep].min()) if (~dep).any() else None,
        dead_band_count=int(dead.sum()),
        dead_band_examples=[(cand[i].tolist(), float(ratio[i])) for i in np.flatnonzero(dead)[:5]],
    )
    return prefix, cand[dep].astype(np.int16), rank[dep].astype(np.int8), m, int(visited), int(cnt)


def _chunks(N: int, anchored: bool) -> list[tuple[int, ...]]:
    M = N * N
    if N == 1:
        return [(0,)]
    if anchored:
        return [(0, s) for s in range(1, M - N + 2)]
    return [(f, s) for f in range(0, M - N + 1) for s in range(f + 1, M - N + 2)]


def _fingerprint(rows: np.ndarray, params: dict) -> str:
    h = hashlib.sha256(np.ascontiguousarray(rows).tobytes())
    h.update(json.dumps({k: v for k, v in params.items() if k != "vrand"}, sort_keys=True,
                        default=str).encode())
    return h.hexdigest()[:16]


class _Checkpoint:
    def __init__(self, path, fingerprint):
        self.dir = Path(path)
        self.dir.mkdir(parents=True, exist_ok=True)
        man = self.dir / "manifest.json"
        if man.exists():
            old = json.loads(man.read_text()).get("fingerprint")
            if old != fingerprint:
                raise ValueError(f"checkpoint in {path} belongs to a different run ({old})")
        else:
            man.write_text(json.dumps({"fingerprint": fingerprint}))

    def _file(self, prefix):
        return self.dir / ("chunk_" + "_".join(f"{p:04d}" for p in prefix) + ".npz")

    def load(self, prefix):
        f = self._file(prefix)
        if not f.exists():
            return None
        z = np.load(f, allow_pickle=False)
        m = Margins(**json.loads(str(z["margins"])))
        return prefix, z["sets"], z["ranks"], m, int(z["visited"]), int(z["cands"])

    def save(self, res):
        prefix, sets, ranks, m, visited, cands = res
        tmp = self._file(prefix).with_suffix(".tmp.npz")
        np.savez(tmp, sets=sets, ranks=ranks, margins=json.dumps(asdict(m)),
                 visited=visited, cands=cands)
        os.replace(tmp, self._file(prefix))


# report ------------------------------------------------------------------------

@dataclass
class SearchReport:
    N: int
    provenance: str
    label: str | None
    sets: np.ndarray            # sorted index rows; anchored rows all contain 0
    ranks: np.ndarray
    anchored: bool
    margins: Margins
    visited: int
    candidates: int
    elapsed: float
    workers: int
    _orbits: object = field(default=None, repr=False)

    @property
    def total(self) -> int:
        return int(len(self.sets) * self.N) if self.anchored else int(len(self.sets))

    @property
    def rank_histogram(self) -> dict[int, int]:
        vals, cnt = np.unique(self.ranks, return_counts=True)
        mult = self.N if self.anchored else 1
        return {int(v): int(c) * mult for v, c in zip(vals, cnt)}

    def orbit_classification(self):
        if self._orbits is None:
            from .classify import classify_orbits
            self._orbits = classify_orbits(self.sets, self.N)
        return self._orbits

    def iter_sets(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """(sets, ranks) blocks covering every dependent set in lexicographic order."""
        if not self.anchored:
            yield self.sets, self.ranks
            return
        yield from expand_anchored(self.sets, self.ranks, self.N)

    def all_sets(self) -> tuple[np.ndarray, np.ndarray]:
        blocks = list(self.iter_sets())
        if not blocks:
            return np.empty((0, self.N), dtype=np.int16), np.empty(0, dtype=np.int8)
        return np.concatenate([b[0] for b in blocks]), np.concatenate([b[1] for b in blocks])

    def dependency_sets(self) -> Iterator[DependencySet]:
        for S, R in self.iter_sets():
            for row, r in zip(S, R):
                yield DependencySet(self.N, tuple(int(i) for i in row), int(r))

    def write_sidecar(self, path) -> int:
        labels = [f"{a},{b}" for a, b in index_points(self.N)]
        n = 0
        with open(path, "w") as fh:
            for S, R in self.iter_sets():
                for row, r in zip(S.tolist(), R.tolist()):
                    fh.write(";".join(labels[i] for i in row) + f";{r}\n")
                n += len(S)
        return n


def expand_anchored(anchored: np.ndarray, ranks: np.ndarray, N: int):
    """Translation closure of sets containing index 0, grouped by smallest index.

    The sets containing index f are exactly the anchored sets translated by
    p_f; keeping those whose smallest index is f and sorting each group yields
    the whole family in lexicographic order.
    """
    M = N * N
    T = translation_table(N)
    A = np.asarray(anchored, dtype=np.int64)
    for f in range(M):
        X = np.sort(T[f][A], axis=1)
        keep = X[:, 0] == f
        X, R = X[keep], ranks[keep]
        if len(X) == 0:
            continue
        order = np.argsort(pack_rows(X, M), kind="stable")
        yield X[order].astype(np.int16), R[order]


def exhaustive_search(orbit: WHOrbit, cfg: SearchConfig | None = None) -> SearchReport:
    cfg = cfg or SearchConfig()
    N = orbit.N
    check_budget(N, cfg)
    rows = orbit.rows
    lo, hi = cfg.dead_band
    params = {
        "det_thr": hi * N ** (N / 2),   # |det| >= this certifies ratio >= hi
        "ratio_thr": hi,
        "gs_tol": cfg.gs_tol,
        "dep_tol": cfg.dep_tol,
        "dead_band": (lo, hi),
        "vrand": np.random.default_rng(12345).normal(size=(N, 2)) @ np.array([1, 1j]),
    }
    chunks = _chunks(N, cfg.anchored)
    ckpt = None
    if cfg.checkpoint_dir:
        ckpt = _Checkpoint(cfg.checkpoint_dir, _fingerprint(rows, {**params, "anchored": cfg.anchored}))
    workers = cfg.resolved_workers()
    t0 = time.time()
    results: dict = {}
    todo = []
    for c in chunks:
        r = ckpt.load(c) if ckpt else None
        if r is not None:
            results[c] = r
        else:
            todo.append(c)

    def _collect(res):
        results[res[0]] = res
        if ckpt:
            ckpt.save(res)
        if cfg.progress:
            cfg.progress(len(results), len(chunks), res[4])

    if workers <= 1 or len(todo) <= 1:
        _init_worker(rows, params)
        for c in todo:
            _collect(_run_chunk(c))
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(rows, params)) as ex:
            for res in ex.map(_run_chunk, todo, chunksize=1):
                _collect(res)
    margins = Margins(certified_floor=hi)
    sets, ranks = [], []
    visited = cands = 0
    for c in chunks:  # merge in lexicographic chunk order
        _, s, r, m, v, n = results[c]
        sets.append(s)
        ranks.append(r)
        margins.merge(m)
        visited += v
        cands += n
    sets = np.concatenate(sets) if sets else np.empty((0, N), dtype=np.int16)
    ranks = np.concatenate(ranks) if ranks else np.empty(0, dtype=np.int8)
    f = orbit.fiducial
    return SearchReport(N, f.provenance, f.label, sets, ranks, cfg.anchored, margins,
                        visited, cands, time.time() - t0, workers)
