"""Fiducial vectors, Weyl-Heisenberg orbits and SIC checks."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares, minimize

from .phasespace import DimensionContext, parity_matrix
from .unitary_rep import (
    ZAUNER_LABELS,
    _zauner_cached,
    displacement,
    symplectic_unitary,
    zauner_eigenspace,
)

SIC_TOL = 1e-8
NORM_TOL = 1e-6


class NormOutOfTolerance(ValueError):
    pass


class FiducialFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Fiducial:
    N: int
    vector: np.ndarray
    provenance: str
    label: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).reshape(-1)
        if v.shape[0] != self.N:
            raise ValueError(f"vector has length {v.shape[0]}, expected {self.N}")
        object.__setattr__(self, "vector", v)

    @property
    def ctx(self) -> DimensionContext:
        return DimensionContext(self.N)

    def eigen_residual(self, label: str | None = None) -> float:
        """||U_Z psi - lambda psi|| for the given (or stored) eigenspace label."""
        label = label or self.label
        U, _ = _zauner_cached(self.N)
        lam = np.exp(2j * np.pi * ZAUNER_LABELS[label] / 3)
        return float(np.linalg.norm(U @ self.vector - lam * self.vector))


def detect_label(v: np.ndarray, tol: float = 1e-10) -> str | None:
    """Zauner eigenspace containing v, if any."""
    N = len(v)
    if N < 2:
        return None
    U, _ = _zauner_cached(N)
    w = U @ v
    for lab, k in ZAUNER_LABELS.items():
        if np.linalg.norm(w - np.exp(2j * np.pi * k / 3) * v) < tol:
            return lab
    return None


def make_fiducial(v, provenance: str, label: str | None = None, **meta) -> Fiducial:
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    if label is None:
        label = detect_label(v)
    return Fiducial(len(v), v, provenance, label, dict(meta))


def sample_eigenspace(ctx: DimensionContext, label: str, seed: int) -> Fiducial:
    B = zauner_eigenspace(ctx, label)
    if B.shape[1] == 0:
        raise ValueError(f"eigenspace {label} is zero-dimensional for N={ctx.N}")
    rng = np.random.default_rng(seed)
    c = rng.normal(size=B.shape[1]) + 1j * rng.normal(size=B.shape[1])
    v = B @ c
    v /= np.linalg.norm(v)
    return Fiducial(ctx.N, v, f"sampled({seed})", label)


def dim3_vectors(theta: float) -> np.ndarray:
    """The nine normalised columns of the dimension-3 SIC family (3 x 9)."""
    e = -np.exp(1j * theta)
    eta = np.exp(2j * np.pi / 3)
    a = e * eta ** np.arange(3)
    cols = np.zeros((3, 9), dtype=complex)
    for b in range(3):
        for j in range(3):
            c = np.zeros(3, dtype=complex)
            c[(b + 1) % 3] = 1.0
            c[(b + 2) % 3] = a[j]
            cols[:, 3 * b + j] = c
    return cols / math.sqrt(2)


def dim3_family(theta: float) -> list[Fiducial]:
    """Each column of the family as a fiducial; column 0 is (0, 1, -e^{i theta})."""
    cols = dim3_vectors(theta)
    return [make_fiducial(cols[:, i], f"analytic-dim3({theta!r})", theta=theta, column=i)
            for i in range(9)]


def parity_projector_error(theta: float = 0.0) -> float:
    """max |(|phi><phi| - (1 - U_P))| for the dimension-3 fiducial (|phi> unnormalised)."""
    ctx = DimensionContext(3)
    phi = dim3_vectors(theta)[:, 0] * math.sqrt(2)
    UP = symplectic_unitary(parity_matrix(ctx), ctx)
    return float(np.max(np.abs(np.outer(phi, phi.conj()) - (np.eye(3) - UP))))


@dataclass(frozen=True)
class WHOrbit:
    """Columns D_p psi for p = (p1, p2) in Z_N^2, column index p1 * N + p2."""
    fiducial: Fiducial
    columns: np.ndarray

    @property
    def N(self) -> int:
        return self.fiducial.N

    @property
    def ctx(self) -> DimensionContext:
        return DimensionContext(self.N)

    @property
    def points(self) -> np.ndarray:
        return self.ctx.points(self.N)

    @property
    def rows(self) -> np.ndarray:
        """Orbit vectors as a contiguous (N^2, N) array."""
        return np.ascontiguousarray(self.columns.T)

    def vectors(self, idx) -> np.ndarray:
        """N x k matrix of the orbit columns with the given indices."""
        return self.columns[:, np.asarray(idx)]


def generate_orbit(f: Fiducial) -> WHOrbit:
    ctx = DimensionContext(f.N)
    pts = ctx.points(f.N)
    cols = np.empty((f.N, len(pts)), dtype=complex)
    for i, p in enumerate(pts):
        cols[:, i] = displacement(p, ctx) @ f.vector
    cols.setflags(write=False)
    return WHOrbit(f, cols)


def overlap_table(psi: np.ndarray) -> np.ndarray:
    """|<psi|D_p psi>| for all p, as an N x N array indexed by (p1, p2)."""
    N = len(psi)
    out = np.empty((N, N))
    for p1 in range(N):
        a = np.conj(np.roll(psi, p1)) * psi
        out[p1] = np.abs(np.fft.fft(a))
    return out


@dataclass
class SICReport:
    is_sic: bool
    max_overlap_deviation: float
    frame_error: float


def sic_check(orbit: WHOrbit, tol: float = SIC_TOL) -> SICReport:
    N = orbit.N
    ov = overlap_table(orbit.fiducial.vector).ravel()[1:]
    dev = float(np.max(np.abs(ov - 1 / math.sqrt(N + 1)))) if N > 1 else 0.0
    C = orbit.columns
    frame = float(np.max(np.abs(C @ C.conj().T - N * np.eye(N))))
    return SICReport(bool(dev < tol and frame < 1e-10), dev, frame)


# file format ---------------------------------------------------------------

def save_fiducial(f: Fiducial, path) -> None:
    doc = {
        "dimension": f.N,
        "vector": [[repr(float(z.real)), repr(float(z.imag))] for z in f.vector],
        "meta": {"provenance": f.provenance, "eigenspace": f.label, **f.meta},
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_fiducial(path, dimension: int | None = None) -> Fiducial:
    try:
        doc = json.loads(Path(path).read_text())
        N = int(doc["dimension"])
        v = np.array([complex(float(re), float(im)) for re, im in doc["vector"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise FiducialFormatError(f"cannot parse fiducial file {path}: {exc}") from exc
    if len(v) != N:
        raise FiducialFormatError(f"vector length {len(v)} does not match dimension {N}")
    if dimension is not None and dimension != N:
        raise FiducialFormatError(f"file holds dimension {N}, expected {dimension}")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1) > NORM_TOL:
        raise NormOutOfTolerance(f"fiducial norm {nrm:.9f} differs from 1 by more than {NORM_TOL}")
    v = v / nrm
    meta = dict(doc.get("meta") or {})
    label = meta.pop("eigenspace", None)
    if label is not None and label not in ZAUNER_LABELS:
        raise FiducialFormatError(f"unknown eigenspace label {label!r}")
    detected = detect_label(v)
    if label is None:
        label = detected
    elif detected != label:
        raise FiducialFormatError(f"vector is not in eigenspace {label} (detected {detected})")
    return Fiducial(N, v, "file", label, {"path": str(path), **meta})


# frame potential minimisation -------------------------------------------------

def frame_potential(psi: np.ndarray) -> float:
    """Sum over p != 0 of |<psi|D_p psi>|^4 for unit psi."""
    t = overlap_table(psi) ** 4
    return float(t.sum() - t[0, 0])


def sic_potential_bound(N: int) -> float:
    return (N - 1) / (N + 1)


def _polish(x, to_vec, N):
    # the potential is quadratic in the overlap error near a SIC, so finish
    # with least squares on the overlaps themselves
    target = 1.0 / (N + 1)

    def resid(y):
        return (overlap_table(to_vec(y)) ** 2).ravel()[1:] - target

    method = "lm" if N * N - 1 >= len(x) else "trf"
    res = least_squares(resid, x, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return res.x


@dataclass
class MinimizerResult:
    fiducial: Fiducial
    potential: float
    bound: float
    is_sic: bool
    restarts_used: int


def minimize_frame_potential(ctx: DimensionContext, label: str | None, seed: int,
                             restarts: int = 50) -> MinimizerResult:
    """Restarted BFGS on eigenspace coefficients; stops at the first SIC found."""
    N = ctx.N
    B = np.eye(N, dtype=complex) if label is None else zauner_eigenspace(ctx, label)
    d = B.shape[1]
    if d == 0:
        raise ValueError(f"eigenspace {label} is zero-dimensional for N={N}")
    bound = sic_potential_bound(N)

    def to_vec(x):
        v = B @ (x[:d] + 1j * x[d:])
        return v / np.linalg.norm(v)

    def obj(x):
        return frame_potential(to_vec(x))

    rng = np.random.default_rng(seed)
    best = None
    used = 0
    for r in range(restarts):
        used = r + 1
        x0 = rng.normal(size=2 * d)
        res = minimize(obj, x0, method="BFGS", options={"gtol": 1e-12, "maxiter": 2000})
        x = res.x
        if res.fun - bound < 1e-6:
            x = _polish(x, to_vec, N)
        f = obj(x)
        if best is None or f < best[0] - 1e-15:
            best = (f, x, r)
        if best[0] - bound < 1e-10:
            break
    v = to_vec(best[1])
    v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v) > 1e-12)]))
    fid = Fiducial(N, v, f"minimizer({seed})", label,
                   {"restart": best[2], "potential": float(best[0])})
    rep = sic_check(generate_orbit(fid))
    return MinimizerResult(fid, float(best[0]), bound, rep.is_sic, used)
