"""Compiled enumeration kernel for the exhaustive subset search.

Subsets are enumerated depth-first in lexicographic order while an
orthonormal basis of the current prefix is maintained by classical
Gram-Schmidt with one reorthogonalisation pass.  The running product of
residual norms equals |det| of the final N x N matrix, so every set whose
|det| is at or above ``det_thr`` is provably independent and never leaves the
kernel.  Everything else is returned as a candidate for the exact
singular-value test.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _gs_step(c, Q, d, N, out):
    # out <- c minus its projection on Q[0..d-1]; returns the residual norm
    for k in range(N):
        out[k] = c[k]
    for _ in range(2):
        for i in range(d):
            s = 0j
            for k in range(N):
                s += Q[i, k].conjugate() * out[k]
            for k in range(N):
                out[k] -= s * Q[i, k]
    nrm = 0.0
    for k in range(N):
        nrm += out[k].real * out[k].real + out[k].imag * out[k].imag
    return np.sqrt(nrm)


@njit(cache=True)
def _normal(Q, d, N, vrand, out, work):
    rho = _gs_step(vrand, Q, d, N, out)
    if rho < 0.1:
        best = -1.0
        e = np.zeros(N, dtype=np.complex128)
        for j in range(N):
            e[:] = 0.0
            e[j] = 1.0
            r = _gs_step(e, Q, d, N, work)
            if r > best:
                best = r
                for k in range(N):
                    out[k] = work[k]
        rho = best
    for k in range(N):
        out[k] /= rho


@njit(cache=True)
def _ratio_lower_bound(Ct, idx, j, Q, nvec, N, R, x):
    """Rigorous lower bound on sigma_min / sigma_max of the set idx[:N-1] + [j].

    With A = [Q | n] R, sigma_min(A) = sigma_min(R) >= 1 / ||R^-1||_F and
    sigma_max(A) <= ||A||_F = sqrt(N) for unit columns.
    """
    for c in range(N):
        col = idx[c] if c < N - 1 else j
        for i in range(N):
            s = 0j
            if i < N - 1:
                for k in range(N):
                    s += Q[i, k].conjugate() * Ct[col, k]
            else:
                for k in range(N):
                    s += nvec[k].conjugate() * Ct[col, k]
            R[i, c] = s if i <= c else 0j
    # Frobenius norm of R^-1 by back substitution, column by column
    fro = 0.0
    for c in range(N):
        for i in range(N - 1, -1, -1):
            s = 1.0 + 0j if i == c else 0j
            for k in range(i + 1, N):
                s -= R[i, k] * x[k]
            if abs(R[i, i]) < 1e-300:
                return 0.0
            x[i] = s / R[i, i]
            fro += x[i].real * x[i].real + x[i].imag * x[i].imag
    return 1.0 / (np.sqrt(fro) * np.sqrt(N))


@njit(cache=True)
def _emit_completions(idx, length, N, M, out, count, cap):
    """Append every N-completion of idx[:length] (larger indices only)."""
    need = N - length
    if need == 0:
        if count < cap:
            for k in range(N):
                out[count, k] = idx[k]
        return count + 1
    start = idx[length - 1] + 1
    comb = np.empty(need, dtype=np.int64)
    for i in range(need):
        comb[i] = start + i
    if comb[need - 1] >= M:
        return count
    while True:
        if count < cap:
            for k in range(length):
                out[count, k] = idx[k]
            for i in range(need):
                out[count, length + i] = comb[i]
        count += 1
        # next combination
        i = need - 1
        while i >= 0 and comb[i] == M - need + i:
            i -= 1
        if i < 0:
            break
        comb[i] += 1
        for j in range(i + 1, need):
            comb[j] = comb[j - 1] + 1
    return count


@njit(cache=True)
def enumerate_chunk(Ct, N, prefix, det_thr, ratio_thr, gs_tol, vrand, out, cap):
    """Enumerate all N-subsets of rows of ``Ct`` extending ``prefix``.

    Returns (number of candidates written or required, number of subsets
    visited).  If the first value exceeds ``cap`` the caller must retry
    with a larger buffer.
    """
    M = Ct.shape[0]
    L = prefix.shape[0]
    idx = np.empty(N, dtype=np.int64)
    Q = np.zeros((N, N), dtype=np.complex128)
    vol = np.ones(N + 1)
    r = np.empty(N, dtype=np.complex128)
    nvec = np.empty(N, dtype=np.complex128)
    work = np.empty(N, dtype=np.complex128)
    R = np.zeros((N, N), dtype=np.complex128)
    x = np.empty(N, dtype=np.complex128)
    count = 0
    visited = 0
    for d in range(L):
        idx[d] = prefix[d]
        rho = _gs_step(Ct[idx[d]], Q, d, N, r)
        if rho < gs_tol:
            before = count
            count = _emit_completions(idx, d + 1, N, M, out, count, cap)
            return count, count - before
        for k in range(N):
            Q[d, k] = r[k] / rho
        vol[d + 1] = vol[d] * rho
    if L == N:
        visited = 1
        if vol[N] < det_thr:
            if count < cap:
                for k in range(N):
                    out[count, k] = idx[k]
            count += 1
        return count, visited
    if L == N - 1:
        _normal(Q, N - 1, N, vrand, nvec, work)
        for j in range(idx[N - 2] + 1, M):
            visited += 1
            s = 0j
            for k in range(N):
                s += nvec[k].conjugate() * Ct[j, k]
            if vol[N - 1] * abs(s) < det_thr and \
                    _ratio_lower_bound(Ct, idx, j, Q, nvec, N, R, x) < ratio_thr:
                if count < cap:
                    for k in range(N - 1):
                        out[count, k] = idx[k]
                    out[count, N - 1] = j
                count += 1
        return count, visited

    d = L
    idx[d] = idx[d - 1]
    while d >= L:
        idx[d] += 1
        if idx[d] > M - (N - d):
            d -= 1
            continue
        rho = _gs_step(Ct[idx[d]], Q, d, N, r)
        if rho < gs_tol:
            before = count
            count = _emit_completions(idx, d + 1, N, M, out, count, cap)
            visited += count - before
            continue
        for k in range(N):
            Q[d, k] = r[k] / rho
        vol[d + 1] = vol[d] * rho
        if d + 1 == N - 1:
            _normal(Q, N - 1, N, vrand, nvec, work)
            v = vol[N - 1]
            for j in range(idx[d] + 1, M):
                visited += 1
                s = 0j
                for k in range(N):
                    s += nvec[k].conjugate() * Ct[j, k]
                if v * abs(s) < det_thr and \
                        _ratio_lower_bound(Ct, idx, j, Q, nvec, N, R, x) < ratio_thr:
                    if count < cap:
                        for k in range(N - 1):
                            out[count, k] = idx[k]
                        out[count, N - 1] = j
                    count += 1
        else:
            d += 1
            idx[d] = idx[d - 1]
    return count, visited
