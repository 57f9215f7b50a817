"""Exact modular arithmetic on phase-space points and SL(2, Z_Nbar) matrices.

All arithmetic is integer arithmetic modulo ``Nbar``.  Phases are tracked as
exact rational multiples of pi (``fractions.Fraction``) and only turned into
floating point when a matrix is materialised elsewhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

import numpy as np


def nbar(N: int) -> int:
    return N if N % 2 else 2 * N


def prime_factors(n: int) -> list[int]:
    """Prime factors of ``n`` with multiplicity, by trial division."""
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_squarefree_odd(N: int) -> bool:
    f = prime_factors(N)
    return N > 1 and N % 2 == 1 and len(f) == len(set(f))


@dataclass(frozen=True)
class DimensionContext:
    """Dimension ``N`` together with the exact phases used throughout.

    ``omega``, ``tau`` and ``eta`` are stored as angles in units of pi, so
    ``omega = 2/N`` means e^{2 pi i / N}.
    """

    N: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"dimension must be >= 2, got {self.N}")

    @property
    def Nbar(self) -> int:
        return nbar(self.N)

    @property
    def omega(self) -> Fraction:
        return Fraction(2, self.N)

    @property
    def tau(self) -> Fraction:
        # tau = -e^{i pi / N} = e^{i pi (N + 1) / N}
        return Fraction(self.N + 1, self.N) % 2

    @property
    def eta(self) -> Fraction:
        return Fraction(2, 3)

    def tau_power_pi(self, k: int) -> Fraction:
        """Angle (units of pi) of tau**k."""
        return (self.tau * (k % self.Nbar)) % 2

    @cached_property
    def _roots(self) -> np.ndarray:
        # e^{i pi m / N} for m in [0, 2N)
        m = np.arange(2 * self.N)
        return np.exp(1j * np.pi * m / self.N)

    def tau_powers(self, k) -> np.ndarray:
        """Complex values of tau**k for integer (array) ``k``, computed exactly mod 2N."""
        k = np.asarray(k, dtype=np.int64) % self.Nbar
        return self._roots[(k * (self.N + 1)) % (2 * self.N)]

    def omega_powers(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=np.int64) % self.N
        return self._roots[(2 * k) % (2 * self.N)]

    def points(self, modulus: int | None = None) -> np.ndarray:
        """All points of Z_m^2 (default m = N) as an (m*m, 2) array, row-major in (p1, p2)."""
        m = self.N if modulus is None else modulus
        g = np.arange(m)
        return np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)


def angle_to_complex(angle_pi: Fraction) -> complex:
    return complex(np.exp(1j * np.pi * float(angle_pi)))


@dataclass(frozen=True, order=True)
class PhasePoint:
    p1: int
    p2: int

    @classmethod
    def make(cls, p1: int, p2: int, modulus: int) -> "PhasePoint":
        return cls(p1 % modulus, p2 % modulus)

    def __iter__(self) -> Iterator[int]:
        yield self.p1
        yield self.p2

    def __getitem__(self, i: int) -> int:
        return (self.p1, self.p2)[i]

    def reduced(self, modulus: int) -> "PhasePoint":
        return PhasePoint(self.p1 % modulus, self.p2 % modulus)

    def add(self, other: "PhasePoint", modulus: int) -> "PhasePoint":
        return PhasePoint((self.p1 + other.p1) % modulus, (self.p2 + other.p2) % modulus)

    def neg(self, modulus: int) -> "PhasePoint":
        return PhasePoint(-self.p1 % modulus, -self.p2 % modulus)


def n_distinct(p, q, N: int) -> bool:
    """True if ``p`` and ``q`` differ modulo N (not Nbar)."""
    return (p[0] - q[0]) % N != 0 or (p[1] - q[1]) % N != 0


@dataclass(frozen=True)
class SymplecticMatrix:
    """2x2 matrix [[alpha, beta], [gamma, delta]] over Z_m with unit determinant."""

    alpha: int
    beta: int
    gamma: int
    delta: int
    modulus: int

    def __post_init__(self):
        m = self.modulus
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, getattr(self, name) % m)
        if (self.alpha * self.delta - self.beta * self.gamma - 1) % m:
            raise ValueError(f"determinant of {self.entries} is not 1 mod {m}")

    @classmethod
    def from_array(cls, a, modulus: int) -> "SymplecticMatrix":
        a = np.asarray(a, dtype=np.int64)
        return cls(int(a[0, 0]), int(a[0, 1]), int(a[1, 0]), int(a[1, 1]), modulus)

    @classmethod
    def identity(cls, modulus: int) -> "SymplecticMatrix":
        return cls(1, 0, 0, 1, modulus)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def as_array(self) -> np.ndarray:
        return np.array([[self.alpha, self.beta], [self.gamma, self.delta]], dtype=np.int64)

    @property
    def trace(self) -> int:
        return (self.alpha + self.delta) % self.modulus

    def det(self) -> int:
        return (self.alpha * self.delta - self.beta * self.gamma) % self.modulus

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def reduce(self, modulus: int) -> "SymplecticMatrix":
        if self.modulus % modulus:
            raise ValueError(f"cannot reduce mod {self.modulus} to mod {modulus}")
        return SymplecticMatrix(*self.entries, modulus)

    def __matmul__(self, other):
        if isinstance(other, SymplecticMatrix):
            return mat_mul(self, other)
        return mat_apply(self, other)

    def __pow__(self, k: int) -> "SymplecticMatrix":
        if k < 0:
            return self.inverse() ** (-k)
        result = SymplecticMatrix.identity(self.modulus)
        base = self
        while k:
            if k & 1:
                result = mat_mul(result, base)
            base = mat_mul(base, base)
            k >>= 1
        return result

    def inverse(self) -> "SymplecticMatrix":
        return SymplecticMatrix(self.delta, -self.beta, -self.gamma, self.alpha, self.modulus)

    def apply_array(self, pts: np.ndarray, modulus: int | None = None) -> np.ndarray:
        """Apply to an (k, 2) integer array of points, reducing mod ``modulus`` (default: own modulus)."""
        m = self.modulus if modulus is None else modulus
        pts = np.asarray(pts, dtype=np.int64)
        x = (self.alpha * pts[..., 0] + self.beta * pts[..., 1]) % m
        y = (self.gamma * pts[..., 0] + self.delta * pts[..., 1]) % m
        return np.stack([x, y], axis=-1)


# named matrices -------------------------------------------------------------

def zauner_matrix(ctx: DimensionContext) -> SymplecticMatrix:
    return SymplecticMatrix(0, -1, 1, -1, ctx.Nbar)


def parity_matrix(ctx: DimensionContext) -> SymplecticMatrix:
    return SymplecticMatrix(-1, 0, 0, -1, ctx.Nbar)


def a_matrix(ctx: DimensionContext) -> SymplecticMatrix:
    """The alternative order-3 class representative for N = 9k + 3."""
    N = ctx.N
    if N % 9 != 3 or N < 12:
        raise ValueError("the A matrix is defined for N = 9k + 3, k >= 1")
    k = (N - 3) // 9
    return SymplecticMatrix(1, N + 3, N + 3 * k, N - 2, ctx.Nbar)


def order6_matrix(ctx: DimensionContext) -> SymplecticMatrix:
    """Order-6 matrix M leaving the extra dimension-6 and dimension-9 sets invariant.

    For N = 6 this is [[3, 8], [4, 11]] mod 12; for odd N = 3k it is
    [[k + 1, k], [2k, 2k + 1]].
    """
    N = ctx.N
    if N == 6:
        return SymplecticMatrix(3, 8, 4, 11, ctx.Nbar)
    if N % 3 == 0 and N % 2 == 1:
        k = N // 3
        return SymplecticMatrix(k + 1, k, 2 * k, 2 * k + 1, ctx.Nbar)
    raise ValueError(f"order-6 matrix M is only defined for N = 6 or odd N = 3k, got {N}")


def w_matrix(ctx: DimensionContext) -> SymplecticMatrix:
    """Square root of the Zauner matrix: W^2 = Z."""
    return SymplecticMatrix(1, -1, 1, 0, ctx.Nbar)


def f_matrix(ctx: DimensionContext) -> SymplecticMatrix:
    return SymplecticMatrix(0, 1, -1, 0, ctx.Nbar)


# operations -----------------------------------------------------------------

def symplectic_form(p, q, ctx: DimensionContext) -> int:
    """<p, q> = p2 q1 - p1 q2 mod Nbar."""
    return (p[1] * q[0] - p[0] * q[1]) % ctx.Nbar


def mat_apply(G: SymplecticMatrix, p) -> PhasePoint:
    m = G.modulus
    return PhasePoint((G.alpha * p[0] + G.beta * p[1]) % m, (G.gamma * p[0] + G.delta * p[1]) % m)


def mat_mul(G: SymplecticMatrix, H: SymplecticMatrix) -> SymplecticMatrix:
    if G.modulus != H.modulus:
        raise ValueError("moduli differ")
    a, b, c, d = G.entries
    e, f, g, h = H.entries
    return SymplecticMatrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, G.modulus)


def _order(G: SymplecticMatrix) -> int:
    cap = G.modulus ** 2
    X = G
    k = 1
    while not X.is_identity():
        X = mat_mul(X, G)
        k += 1
        if k > cap:
            raise RuntimeError(f"order of {G.entries} exceeds cap {cap}")
    return k


def n_order(G: SymplecticMatrix, ctx: DimensionContext) -> tuple[int, int]:
    """(Nbar-order, N-order) of ``G``."""
    full = _order(G.reduce(ctx.Nbar) if G.modulus != ctx.Nbar else G)
    red = _order(G.reduce(ctx.N))
    return full, red


def fixed_points(G: SymplecticMatrix, ctx: DimensionContext) -> list[PhasePoint]:
    """All p in Z_Nbar^2 with G p = p mod Nbar."""
    pts = ctx.points(ctx.Nbar)
    img = G.apply_array(pts, ctx.Nbar)
    mask = np.all(img == pts, axis=1)
    return [PhasePoint(int(a), int(b)) for a, b in pts[mask]]


def is_g_full(p, G: SymplecticMatrix, ctx: DimensionContext, n: int | None = None) -> bool:
    """True if p, Gp, ..., G^{n-1} p are pairwise N-distinct (n = N-order of G)."""
    if n is None:
        n = n_order(G, ctx)[1]
    N = ctx.N
    seen = set()
    q = (p[0] % ctx.Nbar, p[1] % ctx.Nbar)
    for _ in range(n):
        key = (q[0] % N, q[1] % N)
        if key in seen:
            return False
        seen.add(key)
        q = tuple(mat_apply(G, q))
    return True


def g_full_mask(G: SymplecticMatrix, ctx: DimensionContext) -> np.ndarray:
    """Boolean mask over ``ctx.points()`` (Z_N^2, row-major) of G-full points."""
    n = n_order(G, ctx)[1]
    N = ctx.N
    pts = ctx.points()
    orbit = [pts]
    cur = pts
    for _ in range(n - 1):
        cur = G.apply_array(cur, ctx.Nbar)
        orbit.append(cur)
    keys = np.stack([(o[:, 0] % N) * N + o[:, 1] % N for o in orbit], axis=1)
    s = np.sort(keys, axis=1)
    return np.all(np.diff(s, axis=1) != 0, axis=1) if n > 1 else np.ones(len(pts), dtype=bool)


def g_full_points(G: SymplecticMatrix, ctx: DimensionContext) -> tuple[int, np.ndarray]:
    """Number of G-full points of Z_N^2 and the mask over ``ctx.points()``."""
    mask = g_full_mask(G, ctx)
    return int(mask.sum()), mask


# Chinese remainder decomposition ------------------------------------------

@dataclass(frozen=True)
class CRTData:
    N: int
    primes: tuple[int, ...]
    kappas: tuple[int, ...]


def crt_data(N: int) -> CRTData:
    if not is_squarefree_odd(N):
        raise ValueError(f"CRT decomposition needs a square-free odd N, got {N}")
    primes = tuple(prime_factors(N))
    kappas = tuple(pow(N // q, -1, q) for q in primes)
    return CRTData(N, primes, kappas)


def crt_point(p, N: int) -> tuple[PhasePoint, ...]:
    d = crt_data(N)
    return tuple(PhasePoint(p[0] % q, (k * p[1]) % q) for q, k in zip(d.primes, d.kappas))


def crt_point_inverse(parts, N: int) -> PhasePoint:
    d = crt_data(N)
    x = y = 0
    for (a, b), q, k in zip(parts, d.primes, d.kappas):
        # second component was scaled by kappa
        b = (b * pow(k, -1, q)) % q
        x += (N // q) * k * a
        y += (N // q) * k * b
    return PhasePoint(x % N, y % N)


def crt_matrix(G: SymplecticMatrix, N: int) -> tuple[SymplecticMatrix, ...]:
    d = crt_data(N)
    out = []
    for q, k in zip(d.primes, d.kappas):
        kinv = pow(k, -1, q)
        out.append(SymplecticMatrix(G.alpha, kinv * G.beta, k * G.gamma, G.delta, q))
    return tuple(out)


def crt_decompose(obj, ctx: DimensionContext):
    """Per-prime components of a point or a symplectic matrix (square-free odd N only)."""
    if isinstance(obj, SymplecticMatrix):
        return crt_matrix(obj, ctx.N)
    return crt_point(obj, ctx.N)


def random_symplectic(rng: np.random.Generator, modulus: int) -> SymplecticMatrix:
    """Uniform-ish random element of SL(2, Z_m) by rejection on the determinant."""
    while True:
        a, b, c = (int(x) for x in rng.integers(0, modulus, size=3))
        # solve a d - b c = 1 for d when a is a unit
        if math.gcd(a, modulus) == 1:
            d = (pow(a, -1, modulus) * (1 + b * c)) % modulus
            return SymplecticMatrix(a, b, c, d, modulus)
        if math.gcd(b, modulus) == 1:
            d = int(rng.integers(0, modulus))
            # a d - b c = 1  ->  c = (a d - 1) / b
            c = (pow(b, -1, modulus) * (a * d - 1)) % modulus
            return SymplecticMatrix(a, b, c, d, modulus)
