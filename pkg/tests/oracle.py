"""Independent reference implementations used to cross-check the package.

Nothing here imports deplab; everything is rebuilt from the defining formulas
with plain numpy and itertools, favouring clarity over speed.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def nbar(N):
    return N if N % 2 else 2 * N


def shift(N):
    return np.roll(np.eye(N), 1, axis=0)          # X|j> = |j+1>


def clock(N):
    return np.diag(np.exp(2j * np.pi * np.arange(N) / N))


def disp(p, N):
    tau = -np.exp(1j * np.pi / N)
    p1, p2 = p
    # X^N = Z^N = 1, so only tau^{p1 p2} needs the unreduced labels
    X = np.linalg.matrix_power(shift(N), p1 % N)
    Z = np.linalg.matrix_power(clock(N), p2 % N)
    return tau ** (p1 * p2) * X @ Z


def form(p, q, m):
    return (p[1] * q[0] - p[0] * q[1]) % m


def matmul(A, B, m):
    return (np.asarray(A) @ np.asarray(B)) % m


def matpow(A, k, m):
    R = np.eye(2, dtype=np.int64)
    for _ in range(k):
        R = matmul(R, A, m)
    return R


def sym_unitary(G, N):
    """Explicit formula; requires beta coprime to Nbar."""
    (a, b), (c, d) = np.asarray(G) % nbar(N)
    binv = pow(int(b), -1, nbar(N))
    tau = -np.exp(1j * np.pi / N)
    u = np.arange(N)[:, None]
    v = np.arange(N)[None, :]
    return tau ** ((binv * (d * u * u - 2 * u * v + a * v * v)) % nbar(N)) / math.sqrt(N)


def phase_distance(A, B):
    k = np.argmax(np.abs(B))
    ph = A.flat[k] / B.flat[k]
    return float(np.abs(A - ph * B).max())


def eigen_dims(U, roots):
    ev = np.linalg.eigvals(U)
    return [int(np.sum(np.abs(ev - r) < 1e-8)) for r in roots]


def zauner(N):
    Z = np.array([[0, -1], [1, -1]]) % nbar(N)
    U = sym_unitary(Z, N) * np.exp(1j * np.pi * (N - 1) / 12)
    return U


def orbit_columns(psi):
    N = len(psi)
    return np.array([disp((a, b), N) @ psi for a in range(N) for b in range(N)]).T


def brute_dependent_sets(cols, tol=1e-8):
    """All N-subsets of the columns with smallest/largest singular value < tol."""
    N, M = cols.shape
    combos = np.array(list(itertools.combinations(range(M), N)))
    out = []
    for a in range(0, len(combos), 20000):
        B = combos[a:a + 20000]
        sv = np.linalg.svd(np.swapaxes(cols.T[B], 1, 2), compute_uv=False)
        out.append(B[sv[:, -1] / sv[:, 0] < tol])
    return np.concatenate(out)


def brute_orbits(sets, N):
    """WH orbits of index sets under translation, as a sorted list of lengths."""
    pts = [(a, b) for a in range(N) for b in range(N)]
    idx = {p: i for i, p in enumerate(pts)}
    seen, lengths = set(), []
    for s in map(tuple, np.asarray(sets).tolist()):
        if s in seen:
            continue
        orb = set()
        for q in pts:
            t = tuple(sorted(idx[((pts[i][0] + q[0]) % N, (pts[i][1] + q[1]) % N)] for i in s))
            orb.add(t)
        seen |= orb
        lengths.append(len(orb))
    return sorted(lengths)


def random_sl2(rng, m):
    while True:
        a, b, c, d = (int(x) for x in rng.integers(0, m, 4))
        if (a * d - b * c) % m == 1:
            return np.array([[a, b], [c, d]])
