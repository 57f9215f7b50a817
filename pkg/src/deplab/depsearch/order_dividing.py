"""Dependent sets generated by a general symplectic matrix of order n | N.

Pick N/n G-full points whose G-orbits are pairwise N-distinct.  For an
eigenvector psi of U_G the combinations

    psi_jk = sum_r sigma^{-rk} D_{G^r p_j} psi,   sigma = e^{2 pi i / n},

lie in a common U_G eigenspace for each k.  When U_G has nonzero trace some
eigenspace has dimension below N/n, and the N/n vectors psi_jk for that k
are dependent, hence so are the N orbit vectors D_{G^r p_j} psi.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..phasespace import DimensionContext, SymplecticMatrix, g_full_mask, mat_apply, n_order
from ..unitary_rep import displacement, symplectic_unitary
from .sets import DEP_TOL, DependencySet, ratio_and_rank


@dataclass
class OrderDividingResult:
    ok: bool
    failed: str | None
    n: int
    nbar_order: int
    trace_abs: float
    base_points: list = field(default_factory=list)
    points: list = field(default_factory=list)
    ratio: float | None = None
    rank: int | None = None
    k: int | None = None
    group_rank: int | None = None
    eigenspace_dim: int | None = None
    dependency: DependencySet | None = None


def _orbit_points(G: SymplecticMatrix, p, n: int) -> list[tuple[int, int]]:
    pts = [(int(p[0]) % G.modulus, int(p[1]) % G.modulus)]
    for _ in range(n - 1):
        pts.append(tuple(int(x) for x in mat_apply(G, pts[-1])))
    return pts


def choose_base_points(G: SymplecticMatrix, ctx: DimensionContext, n: int, count: int,
                       max_nodes: int = 200000) -> list[tuple[int, int]] | None:
    """``count`` G-full points with pairwise N-distinct orbits (depth-first, lexicographic)."""
    N = ctx.N
    pts = ctx.points()[g_full_mask(G, ctx)]
    orbits = []
    for p in pts:
        o = _orbit_points(G, p, n)
        orbits.append((tuple(int(x) for x in p), frozenset((a % N, b % N) for a, b in o)))
    chosen: list = []
    used: set = set()
    nodes = 0

    def rec(start):
        nonlocal nodes
        if len(chosen) == count:
            return True
        for i in range(start, len(orbits)):
            nodes += 1
            if nodes > max_nodes:
                return False
            p, keys = orbits[i]
            if keys & used:
                continue
            chosen.append(p)
            used.update(keys)
            if rec(i + 1):
                return True
            chosen.pop()
            used.difference_update(keys)
        return False

    return list(chosen) if rec(0) else None


def general_dependency_construction(G: SymplecticMatrix, psi: np.ndarray,
                                    ctx: DimensionContext) -> OrderDividingResult:
    N = ctx.N
    G = G.reduce(ctx.Nbar) if G.modulus != ctx.Nbar else G
    nb, n = n_order(G, ctx)
    U = symplectic_unitary(G, ctx)
    tr = float(abs(np.trace(U)))
    res = OrderDividingResult(False, None, n, nb, tr)
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    lam = np.vdot(psi, U @ psi)
    if np.linalg.norm(U @ psi - lam * psi) > 1e-8:
        res.failed = "input vector is not an eigenvector of U_G"
        return res
    if n <= 1:
        res.failed = "condition n > 1 fails (G reduces to the identity mod N)"
        return res
    if N % n:
        res.failed = f"condition n | N fails (n = {n})"
        return res
    if tr < 1e-9:
        res.failed = "condition Tr(U_G) != 0 fails"
        return res
    base = choose_base_points(G, ctx, n, N // n)
    if base is None:
        res.failed = "condition on N-distinct G-full points fails"
        return res
    res.base_points = base
    orbit_pts = [_orbit_points(G, p, n) for p in base]
    vecs = np.array([[displacement(q, ctx) @ psi for q in o] for o in orbit_pts])  # (N/n, n, N)
    sigma = np.exp(2j * np.pi / n)
    eig = np.linalg.eigvals(U)
    best = None
    for k in range(n):
        w = sigma ** (-k * np.arange(n))
        P = np.einsum("r,jrv->jv", w, vecs)               # psi_jk for j = 1..N/n
        nz = np.linalg.norm(P, axis=1)
        if nz.max() < 1e-12:
            continue
        v = P[np.argmax(nz)]
        mu = np.vdot(v, U @ v) / np.vdot(v, v)
        dim = int(np.sum(np.abs(eig - mu) < 1e-6))
        sv = np.linalg.svd(P.T, compute_uv=False)
        r = int(np.sum(sv > 1e-8 * max(sv[0], 1e-300)))
        if r < N // n and (best is None or dim < best[2]):
            best = (k, r, dim)
    flat = [(a % N, b % N) for o in orbit_pts for a, b in o]
    res.points = flat
    A = np.array([displacement(q, ctx) @ psi for q in flat])
    ratio, rank = ratio_and_rank(np.linalg.svd(A[None], compute_uv=False))
    res.ratio, res.rank = float(ratio[0]), int(rank[0])
    if best is not None:
        res.k, res.group_rank, res.eigenspace_dim = best
    idx = tuple(sorted(a * N + b for a, b in flat))
    if res.ratio < DEP_TOL:
        res.ok = True
        res.dependency = DependencySet(N, idx, res.rank)
    else:
        res.failed = "constructed set is numerically independent"
    return res


def eigenvector_samples(U: np.ndarray, order: int, rng: np.random.Generator):
    """One random vector from each non-trivial eigenspace of U (rescaled so U^order = 1)."""
    from ..unitary_rep import eigenspaces, normalize_order
    dec = eigenspaces(normalize_order(U, order), order)
    for s in dec.spaces:
        if s.dim:
            c = rng.normal(size=s.dim) + 1j * rng.normal(size=s.dim)
            yield s.basis @ c


def random_order_dividing(rng: np.random.Generator, ctx: DimensionContext, count: int,
                          max_tries: int = 100000) -> list[SymplecticMatrix]:
    """Random symplectic matrices whose N-order n satisfies 1 < n and n | N."""
    from ..phasespace import random_symplectic
    out = []
    for _ in range(max_tries):
        if len(out) == count:
            break
        G = random_symplectic(rng, ctx.Nbar)
        _, n = n_order(G, ctx)
        if n > 1 and ctx.N % n == 0:
            out.append(G)
    return out
