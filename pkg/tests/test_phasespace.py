import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deplab.phasespace import (
    DimensionContext,
    PhasePoint,
    SymplecticMatrix,
    a_matrix,
    crt_decompose,
    crt_matrix,
    crt_point,
    crt_point_inverse,
    fixed_points,
    g_full_points,
    is_g_full,
    mat_apply,
    n_order,
    order6_matrix,
    parity_matrix,
    random_symplectic,
    symplectic_form,
    zauner_matrix,
)

from . import oracle


def test_nbar_and_tau():
    assert DimensionContext(5).Nbar == 5
    assert DimensionContext(6).Nbar == 12
    ctx = DimensionContext(6)
    assert ctx.tau_powers(ctx.Nbar) == pytest.approx(1)
    assert ctx.tau_powers(ctx.N) == pytest.approx(-1)


def test_phase_point_canonical():
    p = PhasePoint.make(-1, 13, 12)
    assert (p.p1, p.p2) == (11, 1)
    assert p[0] == 11 and tuple(p) == (11, 1)


def test_symplectic_form_examples():
    ctx = DimensionContext(3)
    assert symplectic_form((1, 0), (0, 1), ctx) == 2
    assert symplectic_form((2, 1), (2, 1), ctx) == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 11), st.integers(0, 11), st.integers(0, 11), st.integers(0, 11))
def test_zauner_preserves_form_n6(a, b, c, d):
    ctx = DimensionContext(6)
    Z = zauner_matrix(ctx)
    p, q = (a, b), (c, d)
    assert symplectic_form(mat_apply(Z, p), mat_apply(Z, q), ctx) == symplectic_form(p, q, ctx)
    assert symplectic_form(p, q, ctx) == (-symplectic_form(q, p, ctx)) % 12
    assert symplectic_form(p, q, ctx) == oracle.form(p, q, 12)


def test_determinant_enforced():
    with pytest.raises(ValueError):
        SymplecticMatrix(1, 1, 1, 1, 5)


def test_group_relations():
    for N in range(3, 17):
        ctx = DimensionContext(N)
        Z = zauner_matrix(ctx)
        assert (Z ** 3).is_identity()
        assert (Z.trace - (-1)) % N == 0
        assert (parity_matrix(ctx) ** 2).is_identity()
    M = order6_matrix(DimensionContext(6))
    assert (M ** 6).is_identity() and not (M ** 3).is_identity()
    assert np.array_equal(M.as_array(), [[3, 8], [4, 11]])
    # oracle: same powers by plain integer matrices
    assert np.array_equal(oracle.matpow(M.as_array(), 6, 12), np.eye(2))


def test_a_matrix_trace():
    ctx = DimensionContext(12)
    assert a_matrix(ctx).trace % 12 == 11


def test_orders():
    for N in (4, 5, 6, 9):
        ctx = DimensionContext(N)
        assert n_order(zauner_matrix(ctx), ctx) == (3, 3)
        assert n_order(SymplecticMatrix.identity(ctx.Nbar), ctx) == (1, 1)
    assert n_order(parity_matrix(DimensionContext(6)), DimensionContext(6))[1] == 2


def test_fixed_points():
    assert [tuple(p) for p in fixed_points(zauner_matrix(DimensionContext(5)), DimensionContext(5))] == [(0, 0)]
    ctx6 = DimensionContext(6)
    assert sorted(tuple(p) for p in fixed_points(zauner_matrix(ctx6), ctx6)) == [(0, 0), (4, 8), (8, 4)]
    ctx4 = DimensionContext(4)
    assert len(fixed_points(SymplecticMatrix.identity(8), ctx4)) == 64
    for N in range(3, 17):
        ctx = DimensionContext(N)
        expect = 3 if ctx.Nbar % 3 == 0 else 1
        assert len(fixed_points(zauner_matrix(ctx), ctx)) == expect


def test_g_full_parity():
    for N in (4, 6, 8):
        ctx = DimensionContext(N)
        assert g_full_points(parity_matrix(ctx), ctx)[0] == N * N - 4
    for N in (5, 7, 9):
        ctx = DimensionContext(N)
        assert g_full_points(parity_matrix(ctx), ctx)[0] == N * N - 1


def test_g_full_matches_brute_force():
    rng = np.random.default_rng(3)
    for N in (4, 6, 9, 10):
        ctx = DimensionContext(N)
        for _ in range(20):
            G = random_symplectic(rng, ctx.Nbar)
            n = n_order(G, ctx)[1]
            count, mask = g_full_points(G, ctx)
            brute = []
            for p in ctx.points():
                seen, q = [], np.array(p)
                for _ in range(n):
                    seen.append((int(q[0]) % N, int(q[1]) % N))
                    q = G.as_array() @ q % ctx.Nbar
                brute.append(len(set(seen)) == n)
            assert mask.tolist() == brute
            assert all(is_g_full(tuple(p), G, ctx) == b for p, b in zip(ctx.points()[:10], brute[:10]))


def test_g_full_lower_bound_n15():
    ctx = DimensionContext(15)
    rng = np.random.default_rng(1)
    checked = 0
    while checked < 10:
        G = random_symplectic(rng, 15)
        if n_order(G, ctx)[1] > 1:
            assert g_full_points(G, ctx)[0] >= 15 * 2 * 4
            checked += 1


def test_crt():
    N = 15
    assert tuple(crt_point((7, 0), N)[0]) [0] == 1 and tuple(crt_point((7, 0), N)[1])[0] == 2
    for N in (15, 21, 33):
        for p in DimensionContext(N).points():
            assert tuple(crt_point_inverse(crt_point(p, N), N)) == tuple(int(x) for x in p)
    rng = np.random.default_rng(0)
    for _ in range(20):
        G, H = random_symplectic(rng, 15), random_symplectic(rng, 15)
        for a, b, c in zip(crt_matrix(G @ H, 15), crt_matrix(G, 15), crt_matrix(H, 15)):
            assert (a.entries) == (b @ c).entries
    ctx = DimensionContext(15)
    Z = SymplecticMatrix(*zauner_matrix(ctx).entries, 15)
    parts = crt_decompose(Z, ctx)
    for p in ctx.points():
        lhs = crt_point(mat_apply(Z, p), 15)
        rhs = [mat_apply(Zj, pj) for Zj, pj in zip(parts, crt_point(p, 15))]
        assert [tuple(x) for x in lhs] == [tuple(x) for x in rhs]


def test_crt_rejects():
    with pytest.raises(ValueError):
        crt_point((1, 1), 12)
    with pytest.raises(ValueError):
        crt_point((1, 1), 45)
