"""Translation-orbit classification and symmetry tags of dependent sets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..phasespace import DimensionContext, order6_matrix, zauner_matrix
from .sets import affine_perm, index_points, negate_index, pack_rows, translation_table

BATCH = 1 << 17


@dataclass
class OrbitClassification:
    N: int
    reps: np.ndarray            # canonical (lexicographically smallest) member of each orbit
    lengths: np.ndarray
    stabilizers: list           # list of translation points per orbit
    set_orbit: np.ndarray       # orbit id of every input row

    @property
    def n_orbits(self) -> int:
        return len(self.reps)

    @property
    def total(self) -> int:
        return int(self.lengths.sum())

    def summary(self) -> list[dict]:
        """Orbits grouped by (length, stabilizer), largest length first."""
        groups: dict = {}
        for L, st in zip(self.lengths.tolist(), self.stabilizers):
            key = (L, tuple(map(tuple, st)))
            groups[key] = groups.get(key, 0) + 1
        out = [{"length": L, "stabilizer": [list(p) for p in st], "count": c}
               for (L, st), c in groups.items()]
        out.sort(key=lambda d: (-d["length"], d["stabilizer"]))
        return out

    def length_histogram(self) -> dict[int, int]:
        v, c = np.unique(self.lengths, return_counts=True)
        return {int(a): int(b) for a, b in zip(v, c)}


def canonicalize(sets: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Smallest translate of each set (it always contains index 0) and its key."""
    M = N * N
    T = translation_table(N)
    Tn = T[negate_index(N)]          # Tn[x, i] = index of p_i - p_x
    S = np.asarray(sets, dtype=np.int64)
    K, n = S.shape
    reps = np.empty_like(S)
    keys = None
    for a in range(0, K, BATCH):
        B = S[a:a + BATCH]
        best_key = None
        best = None
        for j in range(n):
            X = np.sort(Tn[B[:, j][:, None], B], axis=1)
            k = pack_rows(X, M)
            if best_key is None:
                best_key, best = k, X
            else:
                better = k < best_key
                best_key = np.where(better, k, best_key)
                best[better] = X[better]
        reps[a:a + len(B)] = best
        keys = best_key if keys is None else np.concatenate([keys, best_key])
    if keys is None:
        keys = np.empty(0, dtype=np.int64)
    return reps, keys


def stabilizer(rep: np.ndarray, N: int, T: np.ndarray | None = None) -> list[tuple[int, int]]:
    """Translations q with rep + q = rep (rep must contain index 0)."""
    T = translation_table(N) if T is None else T
    P = index_points(N)
    rep = np.asarray(rep)
    out = []
    for s in rep:
        if np.array_equal(np.sort(T[s][rep]), rep):
            out.append((int(P[s, 0]), int(P[s, 1])))
    return sorted(out)


def classify_orbits(sets: np.ndarray, N: int) -> OrbitClassification:
    """Partition sets into orbits under p -> p + q.

    The input may hold every set or just one or more members per orbit;
    orbit lengths come from stabilizers, not from member counts.
    """
    sets = np.asarray(sets)
    if len(sets) == 0:
        return OrbitClassification(N, np.empty((0, N), dtype=np.int16), np.empty(0, dtype=np.int64),
                                   [], np.empty(0, dtype=np.int64))
    reps, keys = canonicalize(sets, N)
    _, first, inv = np.unique(keys, return_index=True, return_inverse=True)
    R = reps[first]
    T = translation_table(N)
    stabs = [stabilizer(r, N, T) for r in R]
    lengths = np.array([N * N // len(s) for s in stabs], dtype=np.int64)
    return OrbitClassification(N, R.astype(np.int16), lengths, stabs, inv.ravel())


# symmetry tags ------------------------------------------------------------------

def _image(A: np.ndarray, N: int) -> np.ndarray:
    """Distinct vectors (1 - A) q mod N."""
    P = index_points(N)
    c = (P - P @ A.T) % N
    return np.unique(c, axis=0)


def conjugate_maps(A: np.ndarray, N: int) -> np.ndarray:
    """Distinct label permutations p -> A p + (1 - A) q of the WH conjugates of U_A."""
    A = np.asarray(A) % N
    perms = np.stack([affine_perm(A, c, N) for c in _image(A, N)])
    return np.unique(perms, axis=0)


def zauner_maps(N: int) -> np.ndarray:
    return conjugate_maps(zauner_matrix(DimensionContext(N)).as_array(), N)


def m_maps(N: int) -> np.ndarray:
    """Conjugates of the order-6 matrix (only defined when 3 divides N)."""
    if N % 3:
        return np.empty((0, N * N), dtype=np.int64)
    return conjugate_maps(order6_matrix(DimensionContext(N)).as_array(), N)


def invariant_under(sets: np.ndarray, perms: np.ndarray) -> np.ndarray:
    S = np.asarray(sets, dtype=np.int64)
    hit = np.zeros(len(S), dtype=bool)
    for p in perms:
        hit |= np.all(np.sort(p[S], axis=1) == S, axis=1)
    return hit


@dataclass
class SymmetryTags:
    orbit_zauner: np.ndarray
    orbit_m: np.ndarray
    set_counts: dict
    orbit_counts: dict


def tag_symmetries(sets: np.ndarray, N: int,
                   classification: OrbitClassification | None = None) -> SymmetryTags:
    """Classes are exclusive: zauner (only), m (only), both, neither.

    Offsets are restricted to the image of (1 - A), so a set is tagged iff all
    of its translates are; tags are therefore computed on orbit representatives.
    """
    cl = classification or classify_orbits(sets, N)
    z = invariant_under(cl.reps, zauner_maps(N))
    m = invariant_under(cl.reps, m_maps(N))
    cls = {"zauner": z & ~m, "m": m & ~z, "both": z & m, "neither": ~z & ~m}
    set_counts = {k: int(cl.lengths[v].sum()) for k, v in cls.items()}
    orbit_counts = {k: int(v.sum()) for k, v in cls.items()}
    return SymmetryTags(z, m, set_counts, orbit_counts)


# per-orbit structure table ---------------------------------------------------------

def _cycles_within(perm: np.ndarray, s: np.ndarray, link: list | None = None) -> int:
    """Cycles of perm inside the set, with cycles joined by any group in ``link`` merged."""
    members = [int(x) for x in s]
    parent = {i: i for i in members}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def join(a, b):
        parent[find(a)] = find(b)

    for i in members:
        join(i, int(perm[i]))
    for grp in link or []:
        for a in grp[1:]:
            join(grp[0], a)
    return len({find(i) for i in members})


def _subgroup_orbits_in(s: np.ndarray, N: int) -> list[tuple[int, int, int]]:
    k = N // 3
    T = translation_table(N)
    g = k * N + (2 * k) % N
    members = set(int(x) for x in s)
    out = set()
    for i in members:
        o = (i, int(T[g, i]), int(T[g, T[g, i]]))
        if o[1] in members and o[2] in members:
            out.add(tuple(sorted(o)))
    return sorted(out)


def order3_subgroup_orbits(s: np.ndarray, N: int) -> int:
    """Complete orbits inside the set under translations by {0, (N/3, 2N/3), (2N/3, N/3)}."""
    return len(_subgroup_orbits_in(s, N))


@dataclass
class OrbitRow:
    orbit: int
    length: int
    symmetry_orbits: int        # orbits of the invariance map (Zauner conjugate, else M
                                # conjugate), with points of one subgroup orbit merged
    subgroup_orbits: int
    quadruples: int


def structure_table(cl: OrbitClassification, quadruples: dict | None = None) -> list[OrbitRow]:
    """One row per WH orbit of sets; needs 3 | N."""
    N = cl.N
    if N % 3:
        raise ValueError("needs 3 | N")
    zm, mm = zauner_maps(N), m_maps(N)
    rows = []
    for k, rep in enumerate(cl.reps.astype(np.int64)):
        sym = 0
        for perms in (zm, mm):
            hit = invariant_under(rep[None], perms)
            if hit.any():
                inv = [p for p in perms if np.array_equal(np.sort(p[rep]), rep)]
                link = _subgroup_orbits_in(rep, N)
                sym = min(_cycles_within(p, rep, link) for p in inv)
                break
        rows.append(OrbitRow(k, int(cl.lengths[k]), sym, order3_subgroup_orbits(rep, N),
                             int((quadruples or {}).get(k, 0))))
    return rows


def structure_signature(rows: list[OrbitRow]) -> dict:
    """Histogram of (symmetry orbits, subgroup orbits, quadruples, length)."""
    out: dict = {}
    for r in rows:
        key = (r.symmetry_orbits, r.subgroup_orbits, r.quadruples, r.length)
        out[key] = out.get(key, 0) + 1
    return out
