"""Small SICs among normal vectors, the R/S/T operators and U_W eigenspaces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .depsearch.predict import span_residual
from .orbits import Fiducial, sample_eigenspace
from .phasespace import DimensionContext, w_matrix
from .unitary_rep import (
    ZAUNER_LABELS,
    _zauner_cached,
    displacement,
    eigenspaces,
    symplectic_unitary,
)

SPAN_CUTOFF = 1e-10
SIC_TOL = 1e-8
CANDIDATE_TOL = 1e-6
SUBGROUP_GENERATORS = ((0, 3), (3, 0))


def numerical_rank(A: np.ndarray, cutoff: float = SPAN_CUTOFF) -> int:
    sv = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(sv > cutoff * sv[0])) if len(sv) and sv[0] > 0 else 0


# R, S, T --------------------------------------------------------------------

@dataclass
class RSTOperators:
    R: np.ndarray
    S: np.ndarray
    T: np.ndarray

    def identity_errors(self) -> dict[str, float]:
        R, S, T = self.R, self.S, self.T
        one = np.eye(R.shape[0])

        def e(X):
            return float(np.max(np.abs(X)))

        return {
            "S=T^dag": e(S - T.conj().T),
            "S^2=0": e(S @ S),
            "T^2=0": e(T @ T),
            "R^2=1": e(R @ R - one),
            "ST=1+R": e(S @ T - one - R),
            "TS=1-R": e(T @ S - one + R),
        }

    def projector_report(self) -> dict:
        P1, P2 = self.S @ self.T / 2, self.T @ self.S / 2
        return {
            "rank_ST/2": numerical_rank(P1),
            "rank_TS/2": numerical_rank(P2),
            "idempotent_error": float(max(np.abs(P1 @ P1 - P1).max(), np.abs(P2 @ P2 - P2).max())),
            "orthogonality_error": float(np.abs(P1 @ P2).max()),
        }


def rst_operators(ctx: DimensionContext | None = None) -> RSTOperators:
    ctx = ctx or DimensionContext(6)
    if ctx.N != 6:
        raise ValueError("R, S, T are defined for N = 6")
    w = np.exp(2j * np.pi / 6)
    D03, D30, D33 = (displacement(p, ctx) for p in ((0, 3), (3, 0), (3, 3)))
    s3 = math.sqrt(3)
    return RSTOperators((D03 + D30 + D33) / s3,
                        (D03 + w ** 2 * D30 + w ** 4 * D33) / s3,
                        (D03 + w ** 4 * D30 + w ** 2 * D33) / s3)


# U_W -----------------------------------------------------------------------

UW_ORDER = (0, 3, 1, 4, 2)        # K_1, K_w^3, K_w, K_w^4, K_w^2


@dataclass
class UWDecomposition:
    U: np.ndarray
    dims: dict[int, int]               # power k of omega -> dimension
    containment_errors: dict[str, float]
    meta: dict = field(default_factory=dict)

    def ordered_dims(self) -> tuple[int, ...]:
        return tuple(self.dims.get(k, 0) for k in UW_ORDER)


def uw_unitary(ctx: DimensionContext) -> tuple[np.ndarray, dict]:
    """A representative of W with U_W^2 = U_Z, sign chosen so K_1 is the largest eigenspace."""
    UZ, _ = _zauner_cached(ctx.N)
    U = symplectic_unitary(w_matrix(ctx), ctx)
    c = np.trace(U @ U @ UZ.conj().T) / ctx.N
    U = U * np.exp(-0.5j * np.angle(c))
    best = None
    for sign in (1, -1):
        V = sign * U
        d0 = eigenspaces(V, 6).spaces[0].dim
        if best is None or d0 > best[1]:
            best = (V, d0, sign)
    V = best[0]
    meta = {"square_error": float(np.abs(V @ V - UZ).max()), "sign": best[2],
            "rule": "U_W^2 = U_Z; of the two roots the one with the larger eigenvalue-1 space"}
    return V, meta


def uw_eigenspaces(ctx: DimensionContext | None = None) -> UWDecomposition:
    ctx = ctx or DimensionContext(6)
    if ctx.N != 6:
        raise ValueError("the U_W table is defined for N = 6")
    U, meta = uw_unitary(ctx)
    dec = eigenspaces(U, 6)
    _, zdec = _zauner_cached(6)
    K = {s.power: s.basis for s in dec.spaces}
    H = {lab: zdec.by_power(k).basis for lab, k in ZAUNER_LABELS.items()}
    errs = {
        "K1+Kw3=H1": span_residual(np.hstack([K[0], K[3]]), H["1"]),
        "Kw+Kw4=Heta": span_residual(np.hstack([K[1], K[4]]), H["eta"]),
        "Kw2=Heta2": span_residual(K[2], H["eta2"]),
    }
    return UWDecomposition(U, {s.power: s.dim for s in dec.spaces}, errs, meta)


def uw_commutation_errors(ctx: DimensionContext | None = None) -> dict[str, float]:
    ctx = ctx or DimensionContext(6)
    U, _ = uw_unitary(ctx)
    op = rst_operators(ctx)
    w = np.exp(2j * np.pi / 6)
    dec = eigenspaces(U, 6)
    k1 = dec.by_power(1).basis
    k4 = dec.by_power(4).basis
    return {
        "U_W R = R U_W": float(np.abs(U @ op.R - op.R @ U).max()),
        "U_W S = w^4 S U_W": float(np.abs(U @ op.S - w ** 4 * op.S @ U).max()),
        "U_W T = w^2 T U_W": float(np.abs(U @ op.T - w ** 2 * op.T @ U).max()),
        "S k1 = 0": float(np.abs(op.S @ k1).max()),
        "S k4 = 0": float(np.abs(op.S @ k4).max()),
    }


# four-point construction ----------------------------------------------------------

@dataclass
class SmallSIC:
    vectors: np.ndarray          # (k, N) rows
    ambient: int
    span_dim: int
    overlap: float
    spread: float
    indices: tuple = ()

    @property
    def is_sic(self) -> bool:
        d = self.span_dim
        return (len(self.vectors) == d * d and self.spread < SIC_TOL
                and abs(self.overlap - 1 / math.sqrt(d + 1)) < SIC_TOL)

    def frame_error(self) -> float:
        """Resolution of the identity on the span: sum |v><v| = d * P_span."""
        V = self.vectors
        F = V.T @ V.conj()
        Q = np.linalg.svd(V.T)[0][:, : self.span_dim]
        return float(np.abs(F - self.span_dim * (Q @ Q.conj().T)).max())


def _overlap_stats(V: np.ndarray) -> tuple[float, float]:
    G = np.abs(V.conj() @ V.T)
    off = G[~np.eye(len(V), dtype=bool)]
    return float(off.mean()), float(off.max() - off.min())


def make_small_sic(V: np.ndarray, indices=()) -> SmallSIC:
    V = np.asarray(V)
    m, s = _overlap_stats(V)
    return SmallSIC(V, V.shape[1], numerical_rank(V.T, 1e-8), m, s, tuple(indices))


def subgroup_points(N: int, gens=SUBGROUP_GENERATORS) -> list[tuple[int, int]]:
    pts = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        p = frontier.pop()
        for g in gens:
            q = ((p[0] + g[0]) % N, (p[1] + g[1]) % N)
            if q not in pts:
                pts.add(q)
                frontier.append(q)
    return sorted(pts)


def subgroup_vectors(psi: np.ndarray, ctx: DimensionContext) -> np.ndarray:
    return np.array([displacement(p, ctx) @ psi for p in subgroup_points(ctx.N)])


@dataclass
class FourPointReport:
    label: str | None
    sic: SmallSIC
    constant_overlaps: bool
    span_dim: int
    r_eigen_error: float | None = None
    annihilated_error: float | None = None


def four_point_sic(f: Fiducial) -> FourPointReport:
    """{psi, D03 psi, D30 psi, D33 psi} for an eigenvector of U_Z in dimension 6."""
    if f.N != 6:
        raise ValueError("the construction is stated for N = 6")
    ctx = DimensionContext(6)
    V = np.array([displacement(p, ctx) @ f.vector for p in ((0, 0), (0, 3), (3, 0), (3, 3))])
    sic = make_small_sic(V)
    rep = FourPointReport(f.label, sic, sic.spread < SIC_TOL, sic.span_dim)
    op = rst_operators(ctx)
    psi = f.vector
    if f.label == "eta":
        rep.r_eigen_error = float(np.linalg.norm(op.R @ psi - psi))
        rep.annihilated_error = float(np.linalg.norm(op.S @ psi))
    elif f.label == "eta2":
        rep.r_eigen_error = float(np.linalg.norm(op.R @ psi + psi))
        rep.annihilated_error = float(np.linalg.norm(op.T @ psi))
    return rep


def span_table(N: int, label: str, seed: int) -> int:
    """Rank of {D_p psi : p in the subgroup generated by (0,3) and (3,0)}."""
    if N % 3:
        raise ValueError("3 must divide N")
    ctx = DimensionContext(N)
    f = sample_eigenspace(ctx, label, seed)
    return numerical_rank(subgroup_vectors(f.vector, ctx).T, SPAN_CUTOFF)


def distinct_moduli(values: np.ndarray, tol: float = SIC_TOL) -> list[float]:
    out: list[float] = []
    for v in np.sort(values):
        if not out or v - out[-1] > tol:
            out.append(float(v))
    return out


def subgroup_overlap_moduli(f: Fiducial) -> list[float]:
    """Distinct pairwise overlap moduli of the subgroup vectors (clustered at 1e-8)."""
    V = subgroup_vectors(f.vector, f.ctx)
    G = np.abs(V.conj() @ V.T)
    return distinct_moduli(G[np.triu_indices(len(V), 1)])


# small-SIC search ---------------------------------------------------------------

def _find_cliques(adj: np.ndarray, size: int, V: np.ndarray, d: int, limit: int):
    """Cliques of ``size`` in adj containing vertex 0 whose vectors span d dimensions."""
    m = len(adj)
    out = []

    def rec(clique, cands):
        if len(out) >= limit:
            return
        if len(clique) == size:
            out.append(list(clique))
            return
        if len(clique) + len(cands) < size:
            return
        for t, c in enumerate(cands):
            new = clique + [c]
            if len(new) > d and numerical_rank(V[new].T, 1e-8) > d:
                continue
            rest = [x for x in cands[t + 1:] if adj[c, x]]
            rec(new, rest)

    rec([0], [x for x in range(1, m) if adj[0, x]])
    return out


def find_small_sics(V: np.ndarray, d: int | None = None, anchors=None,
                    limit_per_anchor: int = 10_000) -> list[SmallSIC]:
    """d-dimensional SICs (d^2 vectors) among the rows of V.

    Candidates are grouped by overlap modulus: for each anchor, vectors whose
    overlap with it is within 1e-6 of 1/sqrt(d+1) are collected, duplicates up
    to phase are merged, and cliques of mutually equiangular vectors confined to
    a d-dimensional span are grown.  Every hit is verified at 1e-8 and results
    are deduplicated as vector sets up to phase.
    """
    V = np.asarray(V)
    N = V.shape[1]
    d = d or N // 3
    size = d * d
    target = 1 / math.sqrt(d + 1)
    anchors = range(len(V)) if anchors is None else anchors
    found: list[SmallSIC] = []
    keys: set = set()
    for a in anchors:
        ov = np.abs(V @ V[a].conj())
        nb = np.flatnonzero(np.abs(ov - target) < CANDIDATE_TOL)
        if len(nb) < size - 1:
            continue
        # merge duplicates up to phase (several sets can share a normal)
        W = V[nb]
        G = np.abs(W.conj() @ W.T)
        keep = []
        for i in range(len(nb)):
            if not any(G[i, j] > 1 - 1e-9 for j in keep):
                keep.append(i)
        loc = np.concatenate([[a], nb[keep]])
        L = V[loc]
        adj = np.abs(np.abs(L.conj() @ L.T) - target) < CANDIDATE_TOL
        for cl in _find_cliques(adj, size, L, d, limit_per_anchor):
            sic = make_small_sic(L[cl], loc[cl])
            if not sic.is_sic:
                continue
            key = _vector_set_key(sic.vectors)
            if key not in keys:
                keys.add(key)
                found.append(sic)
    return found


def _vector_set_key(V: np.ndarray) -> tuple:
    """Hashable fingerprint of a set of vectors up to phase and order."""
    P = np.einsum("ki,kj->kij", V, V.conj())   # rank-one projectors are phase-free
    rows = [tuple(np.round(p.ravel().view(float), 7)) for p in P]
    return tuple(sorted(rows))


def has_displacement_form(sic: SmallSIC, ctx: DimensionContext) -> bool:
    """True if the set equals {v, D03 v, D30 v, D33 v} up to phases for one of its members."""
    V = sic.vectors
    for v in V:
        imgs = np.array([displacement(p, ctx) @ v for p in ((0, 3), (3, 0), (3, 3))])
        ov = np.abs(imgs.conj() @ V.T)
        if np.all(ov.max(axis=1) > 1 - 1e-8):
            return True
    return False


def zauner_overlap_symmetry_error(f: Fiducial) -> float:
    """max_p |<psi|D_p psi> - <psi|D_{Zp} psi>| for a Zauner eigenvector.

    Zp is taken mod N-bar, since for even N the displacement phase depends on
    the point mod 2N.
    """
    from .phasespace import zauner_matrix
    ctx = f.ctx
    Z = zauner_matrix(ctx)
    psi = f.vector
    err = 0.0
    for p in ctx.points(ctx.N):
        q = Z.apply_array(p[None], ctx.Nbar)[0]
        a = np.vdot(psi, displacement(p, ctx) @ psi)
        b = np.vdot(psi, displacement(q, ctx) @ psi)
        err = max(err, abs(a - b))
    return float(err)
