"""Shared helpers for index sets of orbit vectors.

A set of phase points is stored as a sorted row of orbit indices
i = p1 * N + p2.  Large collections are plain integer arrays of shape
(K, N); DependencySet objects are built on demand.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEP_TOL = 1e-8
DEAD_BAND = (1e-10, 1e-6)
SVD_BATCH = 1 << 16


def index_points(N: int) -> np.ndarray:
    i = np.arange(N * N)
    return np.stack([i // N, i % N], axis=1)


def point_index(p, N: int) -> int:
    return int(p[0]) % N * N + int(p[1]) % N


def translation_table(N: int) -> np.ndarray:
    """T[q, i] = index of p_i + p_q (mod N)."""
    P = index_points(N)
    S = (P[:, None, :] + P[None, :, :]) % N
    return S[..., 0] * N + S[..., 1]


def negate_index(N: int) -> np.ndarray:
    P = (-index_points(N)) % N
    return P[:, 0] * N + P[:, 1]


def affine_perm(A: np.ndarray, c, N: int) -> np.ndarray:
    """Index permutation of p -> A p + c (mod N)."""
    P = index_points(N)
    img = (P @ np.asarray(A).T + np.asarray(c)) % N
    return img[:, 0] * N + img[:, 1]


def pack_rows(rows: np.ndarray, M: int) -> np.ndarray:
    """Order-preserving scalar key for each sorted row (int64 or bytes)."""
    rows = np.asarray(rows)
    K, n = rows.shape
    if float(M) ** n < 2.0 ** 62:
        key = np.zeros(K, dtype=np.int64)
        for j in range(n):
            key = key * M + rows[:, j].astype(np.int64)
        return key
    # big-endian fixed width bytes compare lexicographically like the rows
    b = rows.astype(">u2")
    return np.ascontiguousarray(b).view(f"S{2 * n}").ravel()


def unique_rows(rows: np.ndarray, M: int) -> np.ndarray:
    if len(rows) == 0:
        return rows
    rows = np.sort(rows, axis=1)
    _, first = np.unique(pack_rows(rows, M), return_index=True)
    return rows[first]


def singular_values(rows: np.ndarray, sets: np.ndarray, batch: int = SVD_BATCH) -> np.ndarray:
    """Singular values (descending) of each column matrix, in batches."""
    sets = np.asarray(sets)
    n = sets.shape[1] if sets.ndim == 2 else 0
    out = np.empty((len(sets), min(n, rows.shape[1])))
    for a in range(0, len(sets), batch):
        B = rows[sets[a:a + batch]]          # (b, n, N): rows are vectors
        out[a:a + batch] = np.linalg.svd(B, compute_uv=False)
    return out


def dependent_subset(rows: np.ndarray, sets: np.ndarray, tol: float = DEP_TOL,
                     floor: float = DEAD_BAND[1], batch: int = SVD_BATCH):
    """Rows of ``sets`` that are dependent, with their ratios.

    |det| >= floor * n^{n/2} certifies sigma_min / sigma_max >= floor for unit
    vectors, so only the remaining sets go through the SVD.  Returns
    (dependent sets, their ratios, smallest ratio among SVD-tested rejects).
    """
    sets = np.asarray(sets)
    n = sets.shape[1]
    thr = floor * n ** (n / 2)
    keep, kr = [], []
    min_rej = None
    for a in range(0, len(sets), batch):
        S = sets[a:a + batch]
        d = np.abs(np.linalg.det(rows[S]))
        S = S[d < thr]
        if len(S) == 0:
            continue
        ratio, _ = ratio_and_rank(np.linalg.svd(rows[S], compute_uv=False), tol)
        dep = ratio < tol
        keep.append(S[dep])
        kr.append(ratio[dep])
        if (~dep).any():
            m = float(ratio[~dep].min())
            min_rej = m if min_rej is None else min(min_rej, m)
    if not keep:
        return sets[:0], np.empty(0), min_rej
    return np.concatenate(keep), np.concatenate(kr), min_rej


def ratio_and_rank(sv: np.ndarray, tol: float = DEP_TOL):
    smax = sv[:, 0]
    ratio = np.where(smax > 0, sv[:, -1] / np.where(smax > 0, smax, 1), 0.0)
    rank = (sv > tol * smax[:, None]).sum(axis=1)
    return ratio, rank


def format_set(points, rank: int | None = None) -> str:
    s = ";".join(f"{int(a)},{int(b)}" for a, b in points)
    return s if rank is None else f"{s};{int(rank)}"


def parse_set_line(line: str) -> tuple[list[tuple[int, int]], int]:
    parts = line.strip().split(";")
    pts = [tuple(int(x) for x in p.split(",")) for p in parts[:-1]]
    return pts, int(parts[-1])


def canonical_phase(v: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Unit vector with its first non-negligible component real positive."""
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v) > tol * np.max(np.abs(v))))
    return v * np.exp(-1j * np.angle(v[k]))


@dataclass
class DependencySet:
    N: int
    indices: tuple[int, ...]
    rank: int
    normal: np.ndarray | None = None
    tags: set = field(default_factory=set)

    @property
    def points(self) -> list[tuple[int, int]]:
        return [(i // self.N, i % self.N) for i in self.indices]

    def line(self) -> str:
        return format_set(self.points, self.rank)


def normal_vector(rows: np.ndarray, idx) -> np.ndarray:
    """Unit vector orthogonal to the span of a rank N-1 set, canonical phase."""
    A = rows[np.asarray(idx)].T
    U, _, _ = np.linalg.svd(A)
    return canonical_phase(U[:, -1])
