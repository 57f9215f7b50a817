"""Monomial bases in square dimensions and the zero components they force.

In dimension N = n^2 the operators X^n and Z^n commute, and their joint
eigenbasis

    |r, s> = n^{-1/2} sum_b q^{-r b} |s + n b>,   q = e^{2 pi i / n},

satisfies X|r,s> = |r,s+1> (s < n-1), X|r,n-1> = q^r |r,0> and
Z|r,s> = omega^s |r-1,s>.  Clifford unitaries are monomial in this basis, so
a diagonal entry of U_Z that differs from a fiducial's eigenvalue forces a
zero component, and with it N dependent N-sets in the orbit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .depsearch.sets import DEP_TOL, ratio_and_rank
from .orbits import Fiducial, generate_orbit, make_fiducial
from .phasespace import DimensionContext, f_matrix, random_symplectic
from .unitary_rep import (
    ZAUNER_LABELS,
    _zauner_cached,
    displacement,
    eigenspaces,
    normalize_order,
    symplectic_unitary,
    x_operator,
    z_operator,
)

ZERO_TOL = 1e-10
MONO_TOL = 1e-11


class NotSquareDimension(ValueError):
    pass


def _isqrt_exact(N: int) -> int:
    n = math.isqrt(N)
    if n * n != N:
        raise NotSquareDimension(f"N = {N} is not a perfect square")
    return n


@dataclass
class MonomialBasis:
    N: int
    n: int
    basis: np.ndarray            # columns |r,s> in order r*n + s
    labels: list = field(default_factory=list)

    @property
    def q(self) -> complex:
        return np.exp(2j * np.pi / self.n)

    @property
    def m(self) -> int:
        """Shift parameter of the even-n case (carried as metadata only)."""
        return 0 if self.n % 2 else self.n // 2

    def index(self, r: int, s: int) -> int:
        return (r % self.n) * self.n + (s % self.n)

    def transform(self, A: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ A @ self.basis

    def coords(self, v: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ v

    def action_errors(self) -> dict[str, float]:
        ctx = DimensionContext(self.N)
        X, Z = x_operator(ctx), z_operator(ctx)
        w = np.exp(2j * np.pi / self.N)
        B = self.basis
        ex = ez = 0.0
        for r in range(self.n):
            for s in range(self.n):
                v = B[:, self.index(r, s)]
                tx = B[:, self.index(r, s + 1)] * (self.q ** r if s == self.n - 1 else 1)
                tz = w ** s * B[:, self.index(r - 1, s)]
                ex = max(ex, float(np.abs(X @ v - tx).max()))
                ez = max(ez, float(np.abs(Z @ v - tz).max()))
        Xn = np.linalg.matrix_power(X, self.n)
        Zn = np.linalg.matrix_power(Z, self.n)
        return {
            "X": ex,
            "Z": ez,
            "[X^n,Z^n]": float(np.abs(Xn @ Zn - Zn @ Xn).max()),
            "unitary": float(np.abs(B.conj().T @ B - np.eye(self.N)).max()),
            "X^n diagonal": off_diagonal(self.transform(Xn)),
            "Z^n diagonal": off_diagonal(self.transform(Zn)),
        }


def off_diagonal(A: np.ndarray) -> float:
    return float(np.abs(A - np.diag(np.diag(A))).max())


def build_monomial_basis(ctx: DimensionContext) -> MonomialBasis:
    N = ctx.N
    n = _isqrt_exact(N)
    q = np.exp(2j * np.pi / n)
    B = np.zeros((N, N), dtype=complex)
    labels = []
    for r in range(n):
        for s in range(n):
            for b in range(n):
                B[s + n * b, r * n + s] = q ** (-r * b) / math.sqrt(n)
            labels.append((r, s))
    return MonomialBasis(N, n, B, labels)


def is_monomial(A: np.ndarray, tol: float = MONO_TOL) -> bool:
    """Exactly one non-negligible entry per row and column, of unit modulus."""
    mag = np.abs(A)
    nz = mag > tol
    if not (np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1)):
        return False
    return bool(np.all(np.abs(mag[nz] - 1) < tol))


def clifford_sample_monomial(ctx: DimensionContext, count: int = 20, seed: int = 0) -> list[bool]:
    mb = build_monomial_basis(ctx)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        G = random_symplectic(rng, ctx.Nbar)
        p = tuple(int(x) for x in rng.integers(0, ctx.N, size=2))
        out.append(is_monomial(mb.transform(displacement(p, ctx) @ symplectic_unitary(G, ctx))))
    return out


def origin_invariance_errors(ctx: DimensionContext, count: int = 50, seed: int = 0) -> list[float]:
    """How far |0,0> is from being an eigenvector of random symplectic unitaries (odd N)."""
    mb = build_monomial_basis(ctx)
    v = mb.basis[:, 0]
    rng = np.random.default_rng(seed)
    errs = []
    for _ in range(count):
        U = symplectic_unitary(random_symplectic(rng, ctx.Nbar), ctx)
        w = U @ v
        errs.append(float(np.linalg.norm(w - np.vdot(v, w) * v)))
    return errs


# zero components --------------------------------------------------------------

@dataclass
class ZeroComponentReport:
    N: int
    diagonal: list                  # nonzero diagonal entries of U in the monomial basis
    monomial: bool
    eigenvalue: complex             # eigenvalue of the sampled invariant vectors
    forced_zeros: list              # basis labels whose diagonal entry differs from it
    sample_min_components: list     # per sample, the moduli at the forced labels
    sets: np.ndarray                # (K, N) orbit index sets orthogonal to a basis vector
    partition: bool
    set_ratios: np.ndarray
    normals_are_basis: bool

    @property
    def all_dependent(self) -> bool:
        return len(self.set_ratios) > 0 and float(self.set_ratios.max()) < DEP_TOL


def _zero_component_check(U: np.ndarray, mb: MonomialBasis, samples: list[Fiducial],
                          eigenvalue: complex) -> ZeroComponentReport:
    Um = mb.transform(U)
    d = np.diag(Um)
    nzd = np.flatnonzero(np.abs(d) > MONO_TOL)
    forced = [int(i) for i in nzd if abs(d[i] - eigenvalue) > 1e-8]
    comps = [np.abs(mb.coords(f.vector))[forced].tolist() for f in samples]
    sets = []
    ratios = []
    partition = True
    normals_ok = True
    if samples and forced:
        orb = generate_orbit(samples[0])
        C = np.abs(mb.basis.conj().T @ orb.columns)       # (N basis vectors, N^2 orbit points)
        zero = C < ZERO_TOL
        covered = np.zeros(mb.N ** 2, dtype=int)
        for k in range(mb.N):
            idx = np.flatnonzero(zero[k])
            if len(idx) != mb.N:
                continue
            sets.append(idx)
            covered[idx] += 1
            A = orb.rows[idx].T
            sv = np.linalg.svd(A[None], compute_uv=False)
            ratios.append(float(ratio_and_rank(sv)[0][0]))
            u = np.linalg.svd(A)[0][:, -1]
            normals_ok &= abs(abs(np.vdot(u, mb.basis[:, k])) - 1) < 1e-8
        partition = len(sets) == mb.N and bool(np.all(covered == 1))
    return ZeroComponentReport(mb.N, d[nzd].tolist(), is_monomial(Um), eigenvalue, forced, comps,
                               np.array(sets, dtype=np.int64).reshape(-1, mb.N), partition,
                               np.array(ratios), bool(normals_ok))


def _eigen_samples(U: np.ndarray, order: int, power: int, seeds, N: int, label=None) -> list[Fiducial]:
    basis = eigenspaces(U, order).by_power(power).basis
    out = []
    for sd in seeds:
        rng = np.random.default_rng(sd)
        c = rng.normal(size=basis.shape[1]) + 1j * rng.normal(size=basis.shape[1])
        v = basis @ c
        out.append(make_fiducial(v / np.linalg.norm(v), f"eigen-sample seed {sd}", label=label))
    return out


def zauner_zero_component_check(ctx: DimensionContext, seeds=(1, 2, 3),
                                fiducial: Fiducial | None = None) -> ZeroComponentReport:
    """U_Z in the monomial basis and the zero component of H_1 vectors (3 | n).

    With ``fiducial`` given, that vector (which must lie in H_1) is used
    instead of seeded samples.
    """
    n = _isqrt_exact(ctx.N)
    if n % 3:
        raise ValueError("needs 3 | n")
    mb = build_monomial_basis(ctx)
    U, _ = _zauner_cached(ctx.N)
    if fiducial is not None:
        samples = [fiducial]
    else:
        samples = _eigen_samples(U, 3, ZAUNER_LABELS["1"], seeds, ctx.N, label="1")
    return _zero_component_check(U, mb, samples, 1.0)


def uf_unitary(ctx: DimensionContext) -> np.ndarray:
    """U_F with U_F^4 = 1 and the eigenvalue-1 space largest."""
    return normalize_order(symplectic_unitary(f_matrix(ctx), ctx), 4)


def uf_zero_component_check(ctx: DimensionContext, seeds=(1, 2, 3)) -> ZeroComponentReport:
    n = _isqrt_exact(ctx.N)
    if n % 2:
        raise ValueError("needs 2 | n")
    mb = build_monomial_basis(ctx)
    U = uf_unitary(ctx)
    samples = _eigen_samples(U, 4, 0, seeds, ctx.N)
    return _zero_component_check(U, mb, samples, 1.0)


# dimension 8: 2-nomial basis ----------------------------------------------------------

def knomial_basis_dim8() -> tuple[np.ndarray, list]:
    """Joint eigenbasis of X^4 and Z^4 in N = 8, as four 2-dimensional blocks.

    Column (r, s) spans b: n^{-1/2} sum_b (-1)^{r b} |s + 4 b>, s in 0..3; the
    block label is (r, s mod 2) and blocks are ordered lexicographically.
    """
    N, n = 8, 2
    cols, labels = [], []
    for r in range(n):
        for s0 in range(2):
            for s in (s0, s0 + 2):
                v = np.zeros(N, dtype=complex)
                for b in range(n):
                    v[s + 4 * b] = (-1) ** (r * b) / math.sqrt(n)
                cols.append(v)
                labels.append(((r, s0), s))
    return np.array(cols).T, labels


@dataclass
class KnomialReport:
    zero_components: int
    zero_labels: list
    block_monomial: bool
    orthogonal_points: int
    orthogonal_rank: int
    sample_set: list
    sample_ratio: float

    @property
    def dependency_found(self) -> bool:
        return self.sample_ratio < DEP_TOL


def _block_monomial(A: np.ndarray, size: int = 2, tol: float = MONO_TOL) -> bool:
    nb = A.shape[0] // size
    pat = np.array([[np.abs(A[i*size:(i+1)*size, j*size:(j+1)*size]).max() > tol
                     for j in range(nb)] for i in range(nb)])
    return bool(np.all(pat.sum(axis=0) == 1) and np.all(pat.sum(axis=1) == 1))


def knomial_dim8_check(f: Fiducial) -> KnomialReport:
    if f.N != 8:
        raise ValueError("the 2-nomial check is for N = 8")
    ctx = f.ctx
    B, labels = knomial_basis_dim8()
    c = np.abs(B.conj().T @ f.vector)
    zeros = [labels[i] for i in np.flatnonzero(c < ZERO_TOL)]
    U, _ = _zauner_cached(8)
    bm = _block_monomial(B.conj().T @ U @ B)
    orb = generate_orbit(f)
    zb = B[:, c < ZERO_TOL]
    if zb.shape[1] == 0:
        return KnomialReport(0, [], bm, 0, 0, [], 1.0)
    # orbit vectors orthogonal to every vanishing coordinate vector
    orth = np.flatnonzero(np.abs(zb.conj().T @ orb.columns).max(axis=0) < ZERO_TOL)
    rank = int(np.linalg.matrix_rank(orb.columns[:, orth], tol=1e-8))
    pick = sorted(set([0]) | set(orth[:ctx.N].tolist()))[: ctx.N]
    A = orb.columns[:, pick]
    ratio = float(ratio_and_rank(np.linalg.svd(A[None], compute_uv=False))[0][0])
    return KnomialReport(len(zeros), zeros, bm, len(orth), rank, pick, ratio)
