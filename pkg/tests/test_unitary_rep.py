import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deplab.phasespace import DimensionContext, SymplecticMatrix, random_symplectic, zauner_matrix
from deplab.unitary_rep import (
    covariance_error,
    displacement,
    dump_unitary,
    eigenspaces,
    symplectic_unitary,
    zauner_multiplicities,
    tensor_rep_check,
    trace_gauss,
    unitarity_error,
    weyl_error,
    zauner_eigenspace,
    zauner_unitary,
)

from . import oracle

@pytest.mark.parametrize("N", [2, 3, 4, 5, 6, 8, 9, 12])
def test_displacement_matches_oracle(N):
    ctx = DimensionContext(N)
    for p in ctx.points(ctx.Nbar)[:: max(1, ctx.Nbar)]:
        assert np.allclose(displacement(p, ctx), oracle.disp(tuple(int(x) for x in p), N), atol=1e-12)


@pytest.mark.parametrize("N", [3, 4, 6, 7])
def test_weyl_relations(N):
    ctx = DimensionContext(N)
    for p in ctx.points(ctx.Nbar)[::5]:
        for q in ctx.points(ctx.Nbar)[::7]:
            assert weyl_error(p, q, ctx) < 1e-12
    # D_{p + Nbar q} = D_p, and D_{-p} = D_p^dag
    for p in ctx.points()[:10]:
        D = displacement(p, ctx)
        assert np.allclose(displacement(p + ctx.Nbar, ctx), D)
        assert np.allclose(displacement(-p, ctx), D.conj().T)


def test_weyl_relations_exhaustive_n6():
    ctx = DimensionContext(6)
    pts = ctx.points(ctx.Nbar)
    D = {tuple(p): displacement(p, ctx) for p in pts}
    worst = 0.0
    for p in pts:
        for q in pts:
            lhs = D[tuple(p)] @ D[tuple(q)]
            s = (p + q) % ctx.Nbar
            rhs = ctx.tau_powers(oracle.form(p, q, ctx.Nbar)) * D[tuple(s)]
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    assert worst < 1e-13


def test_zauner_permutes_order3_points_n6():
    ctx = DimensionContext(6)
    U = symplectic_unitary(zauner_matrix(ctx), ctx)
    cyc = [(0, 3), (3, 3), (3, 0)]
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        got = U @ displacement(a, ctx) @ U.conj().T
        assert oracle.phase_distance(got, displacement(b, ctx)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 6, 8, 9, 10]), st.integers(0, 10_000))
def test_symplectic_unitary_covariant(N, seed):
    ctx = DimensionContext(N)
    G = random_symplectic(np.random.default_rng(seed), ctx.Nbar)
    U = symplectic_unitary(G, ctx)
    assert unitarity_error(U) < 1e-12
    assert covariance_error(U, G, ctx) < 1e-12


def test_explicit_formula_oracle():
    rng = np.random.default_rng(5)
    for N in (3, 4, 5, 6, 7):
        for _ in range(10):
            A = oracle.random_sl2(rng, oracle.nbar(N))
            if math.gcd(int(A[0, 1]), oracle.nbar(N)) != 1:
                continue
            U = symplectic_unitary(SymplecticMatrix.from_array(A, oracle.nbar(N)), DimensionContext(N))
            assert oracle.phase_distance(U, oracle.sym_unitary(A, N)) < 1e-12


@pytest.mark.parametrize("N", range(2, 17))
def test_zauner_order_and_multiplicities(N):
    ctx = DimensionContext(N)
    U, dec = zauner_unitary(ctx)
    assert np.allclose(np.linalg.matrix_power(U, 3), np.eye(N), atol=1e-10)
    assert np.allclose(U, oracle.zauner(N), atol=1e-10)
    dims = zauner_multiplicities(N)
    assert dims == dec.dims()
    roots = [1, np.exp(2j * np.pi / 3), np.exp(4j * np.pi / 3)]
    assert tuple(oracle.eigen_dims(oracle.zauner(N), roots)) == dims
    assert sum(dims) == N


def test_multiplicity_rule_values():
    assert zauner_multiplicities(4) == (2, 1, 1)
    assert zauner_multiplicities(5) == (2, 2, 1)
    assert zauner_multiplicities(6) == (3, 2, 1)
    assert zauner_multiplicities(8) == (3, 3, 2)
    assert zauner_multiplicities(9) == (4, 3, 2)


def test_zauner_eigenspace_vectors():
    ctx = DimensionContext(7)
    U, _ = zauner_unitary(ctx)
    for label, k in (("1", 0), ("eta", 1), ("eta2", 2)):
        B = zauner_eigenspace(ctx, label)
        assert np.allclose(U @ B, np.exp(2j * np.pi * k / 3) * B, atol=1e-10)


def test_eigenspaces_rejects_wrong_order():
    ctx = DimensionContext(5)
    U, _ = zauner_unitary(ctx)
    with pytest.raises(ValueError):
        eigenspaces(U, 2)


@pytest.mark.parametrize("N", [15, 21])
def test_trace_analytic_vs_numeric(N):
    ctx = DimensionContext(N)
    rng = np.random.default_rng(N)
    for _ in range(100):
        rep = trace_gauss(random_symplectic(rng, N), ctx)
        assert rep.agrees, rep


def test_trace_rejects_even():
    with pytest.raises(ValueError):
        trace_gauss(SymplecticMatrix.identity(12), DimensionContext(12))


@pytest.mark.parametrize("N", [15, 21])
def test_tensor_representation(N):
    ctx = DimensionContext(N)
    rng = np.random.default_rng(0)
    mats = [random_symplectic(rng, N) for _ in range(20)] + [zauner_matrix(ctx)]
    assert tensor_rep_check(ctx, mats).ok


def test_dump_unitary_parses():
    import json
    U = symplectic_unitary(zauner_matrix(DimensionContext(3)), DimensionContext(3))
    d = json.loads(dump_unitary(U))
    back = np.array([[complex(*z) for z in row] for row in d["matrix"]])
    assert d["dimension"] == 3 and np.array_equal(back, U)
