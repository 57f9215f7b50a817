"""Normal vectors of rank N-1 dependent sets and their orthogonality graph."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..orbits import WHOrbit
from .sets import DEP_TOL, SVD_BATCH

ORTH_TOL = 1e-8


@dataclass
class Normals:
    vectors: np.ndarray          # (K, N) unit rows, canonical phase
    set_index: np.ndarray        # row of the input set each normal belongs to
    skipped: int                 # sets whose rank is below N - 1
    max_residual: float          # max |<n|column>| over all sets


def _canonical_rows(V: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    mag = np.abs(V)
    k = np.argmax(mag > tol * mag.max(axis=1, keepdims=True), axis=1)
    ph = V[np.arange(len(V)), k]
    return V * (np.conj(ph) / np.abs(ph))[:, None]


def normals(sets: np.ndarray, orbit: WHOrbit, tol: float = DEP_TOL) -> Normals:
    rows = orbit.rows
    S = np.asarray(sets, dtype=np.int64)
    N = orbit.N
    vecs, idx = [], []
    skipped = 0
    resid = 0.0
    for a in range(0, len(S), SVD_BATCH):
        B = rows[S[a:a + SVD_BATCH]]               # (b, N, N) vectors as rows
        A = np.swapaxes(B, 1, 2)                   # columns are the orbit vectors
        U, sv, _ = np.linalg.svd(A)
        ok = sv[:, N - 2] > tol * sv[:, 0]
        skipped += int((~ok).sum())
        n = _canonical_rows(U[ok, :, -1])
        resid = max(resid, float(np.abs(np.einsum("kn,kjn->kj", n.conj(), B[ok])).max(initial=0)))
        vecs.append(n)
        idx.append(a + np.flatnonzero(ok))
    V = np.concatenate(vecs) if vecs else np.empty((0, N), dtype=complex)
    I = np.concatenate(idx) if idx else np.empty(0, dtype=np.int64)
    return Normals(V, I, skipped, resid)


@dataclass
class OrthogonalityReport:
    n_vectors: int
    n_edges: int
    triangles: np.ndarray            # (T, 3) sorted normal indices
    quadruples: np.ndarray           # (Q, 4)
    max_clique: int
    triangles_single_orbit: int
    quadruple_orbits: list = field(default_factory=list)
    orbit_quadruples: dict = field(default_factory=dict)
    maximal_triangles: np.ndarray | None = None     # triangles inside no 4-clique
    maximal_triangles_single_orbit: int = 0

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_quadruples(self) -> int:
        return len(self.quadruples)


def orthogonality_graph(V: np.ndarray, tol: float = ORTH_TOL) -> np.ndarray:
    G = np.abs(V.conj() @ V.T)
    A = G < tol
    np.fill_diagonal(A, False)
    return A


def _extend(cliques: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Cliques of size k+1 from sorted cliques of size k."""
    out = []
    for c in cliques:
        common = np.logical_and.reduce([A[i] for i in c])
        common[: c[-1] + 1] = False
        for k in np.flatnonzero(common):
            out.append((*c, k))
    k = cliques.shape[1] + 1 if len(cliques) else 0
    return np.array(out, dtype=np.int64).reshape(-1, k)


def orthogonality_analysis(V: np.ndarray, orbit_ids: np.ndarray | None = None,
                           tol: float = ORTH_TOL) -> OrthogonalityReport:
    """Triangles and 4-cliques of the graph with edges |<a|b>| < tol.

    Orthogonal triples are also reported without those lying inside an
    orthogonal quadruple (``maximal_triangles``).
    """
    A = orthogonality_graph(V, tol)
    iu, ju = np.nonzero(np.triu(A))
    edges = np.stack([iu, ju], axis=1)
    tri = _extend(edges, A) if len(edges) else np.empty((0, 3), dtype=np.int64)
    quad = _extend(tri, A) if len(tri) else np.empty((0, 4), dtype=np.int64)
    best, cur = (4 if len(quad) else 3 if len(tri) else 2 if len(edges) else 1), quad
    while len(cur):
        cur = _extend(cur, A)
        if len(cur):
            best = cur.shape[1]
    covered = set()
    for q in quad:
        for drop in range(4):
            covered.add(tuple(np.delete(q, drop).tolist()))
    maximal = np.array([t for t in tri.tolist() if tuple(t) not in covered],
                       dtype=np.int64).reshape(-1, 3)
    single = msingle = 0
    qorb: list = []
    per_orbit: dict = {}
    if orbit_ids is not None and len(tri):
        o = np.asarray(orbit_ids)

        def same(T):
            return int(np.sum((o[T[:, 0]] == o[T[:, 1]]) & (o[T[:, 1]] == o[T[:, 2]])))

        single = same(tri)
        msingle = same(maximal)
        qorb = [sorted(set(o[q].tolist())) for q in quad]
        for q in quad:
            if len(set(o[q].tolist())) == 1:
                per_orbit[int(o[q[0]])] = per_orbit.get(int(o[q[0]]), 0) + 1
    return OrthogonalityReport(len(V), len(edges), tri, quad, best, single, qorb, per_orbit,
                               maximal, msingle)


@dataclass
class MUBReport:
    bases: list                  # lists of normal indices forming orthonormal bases
    complete: bool               # N + 1 disjoint bases covering every vector
    max_unbiased_error: float    # max | |<a|b>|^2 - 1/N | across different bases


def mub_check(V: np.ndarray, tol: float = ORTH_TOL) -> MUBReport:
    """Do the vectors split into N + 1 mutually unbiased orthonormal bases?"""
    K, N = V.shape
    A = orthogonality_graph(V, tol)
    cur = np.arange(K, dtype=np.int64).reshape(-1, 1)
    for _ in range(N - 1):
        if not len(cur):
            break
        cur = _extend(cur, A)
    bases = [c.tolist() for c in cur] if len(cur) and cur.shape[1] == N else []
    members = [i for b in bases for i in b]
    complete = len(bases) == N + 1 and sorted(members) == list(range(K))
    err = 0.0
    if complete:
        lab = np.empty(K, dtype=int)
        for j, b in enumerate(bases):
            lab[b] = j
        G = np.abs(V.conj() @ V.T) ** 2
        cross = lab[:, None] != lab[None, :]
        err = float(np.abs(G[cross] - 1 / N).max())
    return MUBReport(bases, complete, err)


def set_triples(triangles: np.ndarray, set_index: np.ndarray) -> set[tuple[int, int, int]]:
    """Triangles of normals expressed as sorted triples of set indices.

    Set indices are comparable between fiducials whose dependent sets agree,
    which is how the fiducial-sensitive triples are isolated.
    """
    S = np.sort(np.asarray(set_index)[np.asarray(triangles, dtype=np.int64)], axis=1)
    return set(map(tuple, S.tolist()))
