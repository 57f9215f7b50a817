"""Dense matrix representations of the Weyl-Heisenberg and Clifford groups."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .phasespace import (
    DimensionContext,
    SymplecticMatrix,
    crt_data,
    crt_matrix,
    crt_point,
    is_squarefree_odd,
    mat_mul,
    symplectic_form,
    zauner_matrix,
)

UNITARY_TOL = 1e-12
EIGEN_CUTOFF = 1e-10


def displacement(p, ctx: DimensionContext) -> np.ndarray:
    """D_p = tau^{p1 p2} X^{p1} Z^{p2} with X|u> = |u+1>, Z|u> = omega^u |u>."""
    N = ctx.N
    p1, p2 = int(p[0]) % ctx.Nbar, int(p[1]) % ctx.Nbar
    u = np.arange(N)
    D = np.zeros((N, N), dtype=complex)
    D[(u + p1) % N, u] = ctx.tau_powers(p1 * p2) * ctx.omega_powers(p2 * u)
    return D


def displacement_stack(points, ctx: DimensionContext) -> np.ndarray:
    pts = np.asarray(points, dtype=np.int64)
    return np.stack([displacement(p, ctx) for p in pts])


def x_operator(ctx: DimensionContext) -> np.ndarray:
    return displacement((1, 0), ctx)


def z_operator(ctx: DimensionContext) -> np.ndarray:
    return displacement((0, 1), ctx)


def _explicit_unitary(G: SymplecticMatrix, ctx: DimensionContext) -> np.ndarray:
    """Formula valid when beta is a unit mod Nbar; no phase fixing."""
    Nb = ctx.Nbar
    binv = pow(G.beta, -1, Nb)
    u = np.arange(ctx.N)[:, None]
    v = np.arange(ctx.N)[None, :]
    expo = binv * (G.delta * u * u - 2 * u * v + G.alpha * v * v)
    return ctx.tau_powers(expo) / math.sqrt(ctx.N)


@lru_cache(maxsize=None)
def _split_factor(G_entries: tuple, Nb: int) -> tuple[tuple, tuple]:
    G = SymplecticMatrix(*G_entries, Nb)
    for d in range(Nb):
        G1 = SymplecticMatrix(0, 1, -1, d, Nb)
        G2 = mat_mul(G1.inverse(), G)
        if math.gcd(G2.beta, Nb) == 1:
            return G1.entries, G2.entries
    raise RuntimeError(f"no coprime decomposition found for {G_entries} mod {Nb}")


def decompose_noncoprime(G: SymplecticMatrix) -> tuple[SymplecticMatrix, SymplecticMatrix]:
    """Write G = G1 G2 with both upper-right entries units mod the modulus."""
    a, b = _split_factor(G.entries, G.modulus)
    return SymplecticMatrix(*a, G.modulus), SymplecticMatrix(*b, G.modulus)


def fix_phase(U: np.ndarray) -> np.ndarray:
    """Scale so the first nonzero entry (row-major) is real positive."""
    flat = U.ravel()
    k = int(np.argmax(np.abs(flat) > 1e-9))
    return U * (abs(flat[k]) / flat[k])


def symplectic_unitary(G: SymplecticMatrix, ctx: DimensionContext, phase_fix: bool = True,
                       verify: bool = True) -> np.ndarray:
    """Unitary U_G with U_G D_p U_G^dag proportional to D_{Gp}.

    The free phase is fixed by making the first nonzero entry real positive.
    """
    if G.modulus != ctx.Nbar:
        G = SymplecticMatrix(*G.entries, ctx.Nbar)
    if math.gcd(G.beta, ctx.Nbar) == 1:
        U = _explicit_unitary(G, ctx)
    else:
        G1, G2 = decompose_noncoprime(G)
        U = _explicit_unitary(G1, ctx) @ _explicit_unitary(G2, ctx)
    if phase_fix:
        U = fix_phase(U)
    if verify:
        err = covariance_error(U, G, ctx, points=[(1, 0), (0, 1)])
        if err > 1e-10:
            raise RuntimeError(f"U_G covariance check failed for {G.entries}: {err:.2e}")
    return U


def strip_phase_distance(A: np.ndarray, B: np.ndarray) -> float:
    """min over unit c of max|A - c B|, with c taken from the largest overlap."""
    ip = np.vdot(B, A)
    if abs(ip) < 1e-300:
        return float(np.max(np.abs(A - B)))
    c = ip / abs(ip)
    return float(np.max(np.abs(A - c * B)))


def covariance_error(U: np.ndarray, G: SymplecticMatrix, ctx: DimensionContext, points=None) -> float:
    if points is None:
        points = ctx.points(ctx.Nbar)
    worst = 0.0
    Ud = U.conj().T
    for p in points:
        Gp = (G.alpha * p[0] + G.beta * p[1], G.gamma * p[0] + G.delta * p[1])
        lhs = U @ displacement(p, ctx) @ Ud
        worst = max(worst, strip_phase_distance(lhs, displacement(Gp, ctx)))
    return worst


def unitarity_error(U: np.ndarray) -> float:
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


# eigenspaces ----------------------------------------------------------------

@dataclass(frozen=True)
class Eigenspace:
    power: int                 # eigenvalue is sigma**power, sigma = e^{2 pi i / order}
    eigenvalue: complex
    basis: np.ndarray          # N x d, orthonormal columns

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class EigenspaceDecomposition:
    order: int
    spaces: tuple[Eigenspace, ...]
    meta: dict = field(default_factory=dict)

    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.spaces)

    def by_power(self, k: int) -> Eigenspace:
        for s in self.spaces:
            if s.power == k % self.order:
                return s
        raise KeyError(k)


def eigenspaces(U: np.ndarray, order: int, cutoff: float = EIGEN_CUTOFF) -> EigenspaceDecomposition:
    """Eigenspaces of a unitary with U**order = 1 via averaged projectors."""
    N = U.shape[0]
    powers = [np.eye(N, dtype=complex)]
    for _ in range(order - 1):
        powers.append(U @ powers[-1])
    err = np.max(np.abs(U @ powers[-1] - np.eye(N)))
    if err > 1e-9:
        raise ValueError(f"U**{order} differs from identity by {err:.2e}")
    spaces = []
    for k in range(order):
        sig = np.exp(-2j * np.pi * k * np.arange(order) / order)
        P = sum(s * M for s, M in zip(sig, powers)) / order
        Uu, sv, _ = np.linalg.svd(P)
        basis = Uu[:, sv > cutoff * max(1.0, sv[0] if len(sv) else 1.0)]
        spaces.append(Eigenspace(k, complex(np.exp(2j * np.pi * k / order)), basis))
    if sum(s.dim for s in spaces) != N:
        raise RuntimeError("eigenspace dimensions do not sum to N")
    return EigenspaceDecomposition(order, tuple(spaces))


def normalize_order(U: np.ndarray, order: int) -> np.ndarray:
    """Rescale a unitary with U**order proportional to 1 so that U**order = 1.

    Of the ``order`` admissible phases the one giving the largest eigenvalue-1
    multiplicity is chosen (first such one on ties).
    """
    M = np.linalg.matrix_power(U, order)
    c = np.trace(M) / U.shape[0]
    base = np.exp(-1j * np.angle(c) / order)
    best, best_dim = None, -1
    for j in range(order):
        V = U * base * np.exp(-2j * np.pi * j / order)
        d = eigenspaces(V, order).spaces[0].dim
        if d > best_dim:
            best, best_dim = V, d
    return best


# Zauner unitary ------------------------------------------------------------

ZAUNER_LABELS = {"1": 0, "eta": 1, "eta2": 2}


def zauner_phase(ctx: DimensionContext) -> Fraction:
    """Phase e^{i pi (N - 1)/12} in units of pi."""
    return Fraction(ctx.N - 1, 12)


def zauner_unitary(ctx: DimensionContext) -> tuple[np.ndarray, EigenspaceDecomposition]:
    """U_Z with the canonical phase, and its eigenspaces labelled 1, eta, eta^2."""
    Z = zauner_matrix(ctx)
    U = _explicit_unitary(Z, ctx) * np.exp(1j * np.pi * float(zauner_phase(ctx)))
    dec = eigenspaces(U, 3)
    return U, dec


@lru_cache(maxsize=64)
def _zauner_cached(N: int):
    return zauner_unitary(DimensionContext(N))


def zauner_eigenspace(ctx: DimensionContext, label: str) -> np.ndarray:
    """Orthonormal basis (N x d) of the labelled U_Z eigenspace."""
    _, dec = _zauner_cached(ctx.N)
    return dec.by_power(ZAUNER_LABELS[label]).basis


def zauner_multiplicities(N: int) -> tuple[int, int, int]:
    """Multiplicities of (1, eta, eta^2) for U_Z by N mod 3."""
    k, r = divmod(N, 3)
    if r == 0:
        return (k + 1, k, k - 1)
    if r == 1:
        return (k + 1, k, k)
    return (k + 1, k + 1, k)


def order3_canonical_check(G: SymplecticMatrix, ctx: DimensionContext) -> bool:
    if ctx.N == 3 and SymplecticMatrix(*G.entries, 3).is_identity():
        return False
    return (G.alpha + G.delta + 1) % ctx.N == 0


# Gauss sums --------------------------------------------------------------

def legendre(a: int, q: int) -> int:
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def gauss_sum(a: int, q: int) -> complex:
    """Closed form of sum_x e^{2 pi i a x^2 / q} for an odd prime q."""
    if a % q == 0:
        return complex(q)
    eps = 1 if q % 4 == 1 else 1j
    return legendre(a, q) * eps * math.sqrt(q)


def trace_abs_prime(G: SymplecticMatrix, q: int) -> float:
    """|Tr U_G| for G in SL(2, Z_q), q an odd prime, by the Legendre-symbol case table."""
    a, b, c, d = (x % q for x in G.entries)
    t = (a + d) % q
    if b != 0:
        return 1.0 if t != 2 else math.sqrt(q)
    if a != 1:
        return 1.0
    return math.sqrt(q) if c != 0 else float(q)


def trace_value_prime(G: SymplecticMatrix, q: int) -> complex:
    """Tr U_G up to the free phase, from the Gauss-sum formulas."""
    a, b, c, d = (x % q for x in G.entries)
    t = (a + d) % q
    h = pow(2, -1, q)
    if b != 0:
        return gauss_sum(h * pow(b, -1, q) * (t - 2), q) / math.sqrt(q)
    if a != 1:
        return 1.0
    return gauss_sum(h * c, q)


@dataclass
class TraceReport:
    N: int
    per_prime: list[tuple[int, float]]
    analytic: float
    numeric: float | None = None

    @property
    def agrees(self) -> bool:
        return self.numeric is None or abs(self.analytic - self.numeric) < 1e-9


def trace_gauss(G: SymplecticMatrix, ctx: DimensionContext, numeric: bool = True) -> TraceReport:
    if not is_squarefree_odd(ctx.N):
        raise ValueError(f"trace_gauss needs a square-free odd dimension, got {ctx.N}")
    parts = crt_matrix(SymplecticMatrix(*G.entries, ctx.N), ctx.N)
    per = [(P.modulus, trace_abs_prime(P, P.modulus)) for P in parts]
    val = float(np.prod([v for _, v in per]))
    num = None
    if numeric:
        num = float(abs(np.trace(symplectic_unitary(G, ctx, verify=False))))
    return TraceReport(ctx.N, per, val, num)


# tensor representation ---------------------------------------------------

def crt_unitary(N: int) -> np.ndarray:
    """V |x> = |x mod q1> (x) ... (x) |x mod qu>."""
    d = crt_data(N)
    V = np.zeros((N, N))
    for x in range(N):
        idx = 0
        for q in d.primes:
            idx = idx * q + x % q
        V[idx, x] = 1.0
    return V


def _kron_all(mats):
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


@dataclass
class TensorReport:
    N: int
    max_displacement_error: float
    max_unitary_error: float
    n_points: int
    n_matrices: int

    @property
    def ok(self) -> bool:
        return self.max_displacement_error < 1e-11 and self.max_unitary_error < 1e-11


def tensor_rep_check(ctx: DimensionContext, matrices=(), points=None) -> TensorReport:
    N = ctx.N
    d = crt_data(N)
    V = crt_unitary(N)
    sub = [DimensionContext(q) for q in d.primes]
    if points is None:
        points = ctx.points()
    derr = 0.0
    for p in points:
        lhs = V @ displacement(p, ctx) @ V.T
        rhs = _kron_all([displacement(pj, c) for pj, c in zip(crt_point(p, N), sub)])
        derr = max(derr, strip_phase_distance(lhs, rhs))
    uerr = 0.0
    for G in matrices:
        G = SymplecticMatrix(*G.entries, N)
        lhs = V @ symplectic_unitary(G, ctx, verify=False) @ V.T
        rhs = _kron_all([symplectic_unitary(Gj, c, verify=False)
                         for Gj, c in zip(crt_matrix(G, N), sub)])
        uerr = max(uerr, strip_phase_distance(lhs, rhs))
    return TensorReport(N, derr, uerr, len(points), len(matrices))


# serialisation -------------------------------------------------------------

def dump_unitary(U: np.ndarray) -> str:
    rows = [[[float(f"{z.real:.17g}"), float(f"{z.imag:.17g}")] for z in row] for row in U]
    return json.dumps({"dimension": U.shape[0], "matrix": rows})


def weyl_error(p, q, ctx: DimensionContext) -> float:
    """max |D_p D_q - tau^<p,q> D_{p+q}|."""
    lhs = displacement(p, ctx) @ displacement(q, ctx)
    s = (p[0] + q[0], p[1] + q[1])
    rhs = ctx.tau_powers(symplectic_form(p, q, ctx)) * displacement(s, ctx)
    return float(np.max(np.abs(lhs - rhs)))
