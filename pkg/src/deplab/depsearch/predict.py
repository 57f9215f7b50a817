"""Constructive prediction of dependent sets from Zauner-conjugate symmetry.

Let A be the label map p -> Z p + c of a WH conjugate of U_Z.  Its orbits
on Z_N^2 are singlets and triplets.  The orbit vectors of a triplet span
the same space as one vector from each of H_1, H_eta, H_eta^2 (the r/s/t
combinations), while a singlet vector lies in the fiducial's own
eigenspace.  A point set made of a triplets and b singlets therefore puts
a vectors (plus b, for the fiducial's eigenspace) into each eigenspace; as
soon as one of those counts exceeds the eigenspace dimension the set is
dependent, and so is every N-set containing it.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from ..orbits import WHOrbit
from ..phasespace import DimensionContext, zauner_matrix
from ..unitary_rep import ZAUNER_LABELS, _zauner_cached, displacement
from .classify import zauner_maps
from .sets import DEP_TOL, pack_rows, ratio_and_rank, singular_values


class UnlabelledFiducial(ValueError):
    pass


def map_cycles(perm: np.ndarray) -> tuple[list[int], list[tuple[int, int, int]]]:
    """Singlets and triplets of an order-3 permutation."""
    seen = np.zeros(len(perm), dtype=bool)
    singles, triples = [], []
    for i in range(len(perm)):
        if seen[i]:
            continue
        cyc = [i]
        j = int(perm[i])
        while j != i:
            cyc.append(j)
            j = int(perm[j])
        seen[cyc] = True
        if len(cyc) == 1:
            singles.append(i)
        elif len(cyc) == 3:
            triples.append(tuple(cyc))
        else:
            raise ValueError(f"cycle of length {len(cyc)} in an order-3 map")
    return singles, triples


def eigenspace_dims(N: int) -> tuple[int, int, int]:
    _, dec = _zauner_cached(N)
    return tuple(dec.by_power(k).dim for k in range(3))


def minimal_patterns(N: int, label: str, n_singles: int) -> list[tuple[int, int]]:
    """(triplets, singlets) core patterns that force a dependency.

    Eigenspace mu receives a + b*[mu == label] vectors; the pattern is
    dependent when that exceeds dim(mu).  Only cores that fit in N points are
    kept.
    """
    dims = eigenspace_dims(N)
    lam = ZAUNER_LABELS[label]
    pats = set()
    for mu, d in enumerate(dims):
        if mu != lam:
            pats.add((d + 1, 0))
        else:
            for b in range(0, min(n_singles, d + 1) + 1):
                pats.add((d + 1 - b, b))
    return sorted((a, b) for a, b in pats if 3 * a + b <= N and b <= n_singles)


def _combo_array(n: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(combinations(range(n), k)), dtype=np.int64).reshape(-1, k)


def _pattern_sets(singles, triples, a, b, N, M):
    """All N-sets containing a chosen triplets and b chosen singlets."""
    out = []
    T = np.array(triples, dtype=np.int64).reshape(-1, 3)
    S = np.array(singles, dtype=np.int64)
    core_size = 3 * a + b
    ext = N - core_size
    for tsel in combinations(range(len(T)), a):
        for ssel in combinations(range(len(S)), b):
            core = np.concatenate([T[list(tsel)].ravel(), S[list(ssel)]]).astype(np.int64)
            rest = np.setdiff1d(np.arange(M), core)
            E = rest[_combo_array(len(rest), ext)]
            block = np.concatenate([np.broadcast_to(core, (len(E), core_size)), E], axis=1)
            out.append(np.sort(block, axis=1))
    return out


def predicted_count_bound(N: int, label: str) -> int:
    """Sum over conjugate maps and core patterns before deduplication."""
    M = N * N
    total = 0
    for perm in zauner_maps(N):
        singles, triples = map_cycles(perm)
        for a, b in minimal_patterns(N, label, len(singles)):
            total += comb(len(triples), a) * comb(len(singles), b) * comb(M - 3 * a - b, N - 3 * a - b)
    return total


@dataclass
class Prediction:
    N: int
    label: str
    sets: np.ndarray
    ranks: np.ndarray
    max_ratio: float
    n_maps: int
    patterns: list
    raw_count: int

    @property
    def count(self) -> int:
        return len(self.sets)

    @property
    def all_dependent(self) -> bool:
        return self.count == 0 or self.max_ratio < DEP_TOL


def predict_sets(orbit: WHOrbit, verify: bool = True) -> Prediction:
    f = orbit.fiducial
    if f.label is None:
        raise UnlabelledFiducial("prediction needs a fiducial in a Zauner eigenspace")
    N, M = f.N, f.N * f.N
    perms = zauner_maps(N)
    blocks = []
    used = set()
    for perm in perms:
        singles, triples = map_cycles(perm)
        for a, b in minimal_patterns(N, f.label, len(singles)):
            used.add((a, b))
            blocks.extend(_pattern_sets(singles, triples, a, b, N, M))
    if blocks:
        allsets = np.concatenate(blocks)
        _, first = np.unique(pack_rows(allsets, M), return_index=True)
        sets = allsets[first]
    else:
        allsets = sets = np.empty((0, N), dtype=np.int64)
    ranks = np.full(len(sets), -1)
    max_ratio = 0.0
    if verify and len(sets):
        ratio, ranks = ratio_and_rank(singular_values(orbit.rows, sets))
        max_ratio = float(ratio.max())
    return Prediction(N, f.label, sets.astype(np.int16), ranks, max_ratio, len(perms),
                      sorted(used), len(allsets))


# r/s/t combinations ----------------------------------------------------------

@dataclass
class RSTriplet:
    p: tuple[int, int]
    r: np.ndarray
    s: np.ndarray
    t: np.ndarray

    def as_matrix(self) -> np.ndarray:
        return np.stack([self.r, self.s, self.t], axis=1)


def rst_triplet(orbit: WHOrbit, p) -> RSTriplet:
    """r, s, t = sum_m eta^{-km} U_Z^m D_p psi for k = 0, 1, 2."""
    N = orbit.N
    ctx = DimensionContext(N)
    U, _ = _zauner_cached(N)
    v = displacement(p, ctx) @ orbit.fiducial.vector
    vs = [v, U @ v, U @ (U @ v)]
    eta = np.exp(2j * np.pi / 3)
    comb_ = [sum(eta ** (-k * m) * vs[m] for m in range(3)) for k in range(3)]
    return RSTriplet((int(p[0]), int(p[1])), *comb_)


def triplet_points(p, N: int) -> list[tuple[int, int]]:
    Z = zauner_matrix(DimensionContext(N)).as_array() % N
    q = np.array(p) % N
    out = []
    for _ in range(3):
        out.append((int(q[0]), int(q[1])))
        q = Z @ q % N
    return out


def span_residual(A: np.ndarray, B: np.ndarray) -> float:
    """Largest residual of projecting the columns of each matrix onto the other's span."""
    def proj_res(X, Y):
        Q, Rr = np.linalg.qr(Y)
        keep = np.abs(np.diag(Rr)) > 1e-10 * max(1.0, np.abs(Rr).max())
        Q = Q[:, keep]
        return float(np.max(np.linalg.norm(X - Q @ (Q.conj().T @ X), axis=0)))
    return max(proj_res(A, B), proj_res(B, A))


def predict_core_sets(orbit: WHOrbit, size: int) -> tuple[np.ndarray, float]:
    """Forced-dependent point sets of exactly ``size`` points (no extension).

    With size N - 1 this gives the smaller dependent sets available when the
    fiducial lies in the smallest eigenspace of N = 3k + 2.  Returns the sets
    and the largest singular-value ratio among them.
    """
    f = orbit.fiducial
    if f.label is None:
        raise UnlabelledFiducial("prediction needs a fiducial in a Zauner eigenspace")
    N, M = f.N, f.N * f.N
    blocks = []
    for perm in zauner_maps(N):
        singles, triples = map_cycles(perm)
        T = np.array(triples, dtype=np.int64).reshape(-1, 3)
        S = np.array(singles, dtype=np.int64)
        for a, b in minimal_patterns(N, f.label, len(singles)):
            if 3 * a + b != size:
                continue
            for tsel in combinations(range(len(T)), a):
                for ssel in combinations(range(len(S)), b):
                    blocks.append(np.sort(np.concatenate([T[list(tsel)].ravel(), S[list(ssel)]])))
    if not blocks:
        return np.empty((0, size), dtype=np.int64), 0.0
    sets = np.unique(np.array(blocks, dtype=np.int64), axis=0)
    A = np.swapaxes(orbit.rows[sets], 1, 2)            # (K, N, size)
    sv = np.linalg.svd(A, compute_uv=False)
    ratio = sv[:, -1] / sv[:, 0] if size <= N else np.zeros(len(sets))
    return sets, float(ratio.max())
