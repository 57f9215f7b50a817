"""Acceptance criteria 1-10, one test per criterion.

Each test compares against the reference values in ``deplab/data/constants.json``
at the tolerance the criterion states.  Runtimes are asserted where a bound is
given.  Criteria 3 and the dimension-9 parts of 4 and 7 are long and carry the
``slow`` marker; they run by default.
"""
import math
import time

import numpy as np
import pytest

from deplab.cli import load_constants
from deplab.depsearch import (
    DEP_TOL,
    SearchConfig,
    classify_orbits,
    exhaustive_search,
    predict_sets,
    tag_symmetries,
    targeted_search,
)
from deplab.depsearch.normals import mub_check, normals, orthogonality_analysis, set_triples
from deplab.depsearch.targeted import expand_reps
from deplab.depsearch.order_dividing import (
    eigenvector_samples,
    general_dependency_construction,
    random_order_dividing,
)
from deplab.monomial import (
    build_monomial_basis,
    knomial_dim8_check,
    uf_unitary,
    uf_zero_component_check,
    zauner_zero_component_check,
)
from deplab.orbits import (
    dim3_family,
    generate_orbit,
    load_fiducial,
    parity_projector_error,
    sample_eigenspace,
    sic_check,
)
from deplab.phasespace import DimensionContext, n_order, parity_matrix, random_symplectic
from deplab.structure import (
    find_small_sics,
    rst_operators,
    span_table,
    four_point_sic,
    has_displacement_form,
)
from deplab.unitary_rep import (
    symplectic_unitary,
    zauner_multiplicities,
    tensor_rep_check,
    trace_gauss,
    zauner_unitary,
)

C = load_constants()
LABELS = ("1", "eta", "eta2")


def _search(N, label, seed, **kw):
    orb = generate_orbit(sample_eigenspace(DimensionContext(N), label, seed))
    return exhaustive_search(orb, SearchConfig(workers=1, **kw))


def _rule(N):
    k, r = divmod(N, 3)
    return tuple(k + int(e[1:] or 0) for e in C["multiplicities"]["rule"][str(r)])


def test_criterion_01_zauner_multiplicities():
    t0 = time.perf_counter()
    for N in range(3, 17):
        assert zauner_multiplicities(N) == _rule(N), N
        _, dec = zauner_unitary(DimensionContext(N))
        assert dec.dims() == _rule(N), N
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.slow
def test_criterion_02_dependent_counts():
    limits = {4: 1.0, 5: 1.0, 6: 30.0, 7: 1800.0, 8: None}
    for N, labels in ((4, LABELS), (5, LABELS), (6, LABELS), (7, LABELS), (8, ("1", "eta"))):
        for label in labels:
            expected = C["dependent_counts"]["counts"][str(N)][label] if N < 8 else 0
            for seed in (1, 2, 3):
                rep = _search(N, label, seed, long_run=N >= 8)
                assert rep.total == expected, (N, label, seed)
                assert rep.margins.dead_band_count == 0, (N, label, seed)
                if limits[N] is not None:
                    assert rep.elapsed <= limits[N], (N, label, seed, rep.elapsed)


@pytest.mark.slow
def test_criterion_03_dim8_eta2(tmp_path, data_dir):
    rep = _search(8, "eta2", 1, long_run=True, checkpoint_dir=str(tmp_path / "gen"))
    assert rep.total == C["dependent_counts"]["counts"]["8"]["eta2"]
    assert rep.margins.dead_band_count == 0
    f = load_fiducial(data_dir / "sic8_eta2.json", dimension=8)
    orb = generate_orbit(f)
    assert f.label == "eta2" and sic_check(orb).is_sic
    sic = exhaustive_search(orb, SearchConfig(workers=1, long_run=True,
                                               checkpoint_dir=str(tmp_path / "sic")))
    assert sic.total == C["sic8"]["count"]
    assert sic.margins.dead_band_count == 0


@pytest.mark.slow
def test_criterion_04_predictions():
    t0 = time.perf_counter()
    P = C["dependent_counts"]["predicted"]
    for N, label in ((6, "1"), (4, "eta"), (4, "eta2"), (5, "eta2"), (7, "eta"), (7, "eta2")):
        pred = predict_sets(generate_orbit(sample_eigenspace(DimensionContext(N), label, 1)))
        assert pred.count == P[str(N)][label], (N, label)
        assert pred.max_ratio < DEP_TOL
    assert C["dim6_structure"]["zauner_predicted_sets"] == 768
    orb9 = generate_orbit(sample_eigenspace(DimensionContext(9), "1", 1))
    pred = predict_sets(orb9)
    assert pred.count == C["dim9"]["predicted"]["1"]
    assert pred.max_ratio < DEP_TOL
    # targeted closure: the found total is reported only when it reaches the target
    t = targeted_search(orb9, target=C["dim9"]["found_at_least"])
    assert t.reached_target and t.max_ratio < DEP_TOL
    assert time.perf_counter() - t0 < 300


def _dim6_analysis(f):
    orb = generate_orbit(f)
    S = exhaustive_search(orb, SearchConfig(workers=1)).all_sets()[0]
    cl = classify_orbits(S, 6)
    nv = normals(S, orb)
    rep = orthogonality_analysis(nv.vectors, cl.set_orbit[nv.set_index], 1e-8)
    return S, cl, rep, set_triples(rep.maximal_triangles, nv.set_index)


def test_criterion_05_dim6_classification(orbit6, sic6):
    d = C["dim6_structure"]
    S, cl, gen, gen_triples = _dim6_analysis(orbit6.fiducial)
    assert {str(k): v for k, v in cl.length_histogram().items()} == d["orbits"]
    short = int(np.argmin(cl.lengths))
    assert sorted(map(list, cl.stabilizers[short])) == d["short_orbit_stabilizer"]
    tags = tag_symmetries(S, 6, cl)
    assert tags.set_counts["m"] == d["m_only_sets"]
    assert tags.orbit_counts["m"] == d["m_only_orbits"]
    S2, cl2, sic, sic_triples = _dim6_analysis(sic6)
    assert np.array_equal(S, S2)
    assert sic.n_quadruples == d["sic_quadruples"]
    assert len(sic.orbit_quadruples) == 1
    (qo,) = sic.orbit_quadruples
    assert cl2.lengths[qo] == 36
    assert sic.maximal_triangles_single_orbit == d["single_orbit_triples"]
    assert gen.maximal_triangles_single_orbit == d["single_orbit_triples"]
    sensitive = sic_triples - gen_triples
    assert len(sensitive) == d["m_only_sets"]
    assert gen.n_quadruples == 0
    assert not (sensitive & gen_triples)


def test_criterion_06_dim3():
    t0 = time.perf_counter()
    d = C["dim3"]
    for theta, expected in ((0.3, d["generic"]), (1.1, d["generic"]),
                            (0.0, d["special"]), (2 * math.pi / 9, d["special"])):
        orb = generate_orbit(dim3_family(theta)[0])
        rep = exhaustive_search(orb, SearchConfig(workers=1))
        assert rep.total == expected, theta
    orb = generate_orbit(dim3_family(0.0)[0])
    S = exhaustive_search(orb, SearchConfig(workers=1)).all_sets()[0]
    mub = mub_check(normals(S, orb).vectors, 1e-10)
    assert mub.complete and len(mub.bases) == 4
    assert mub.max_unbiased_error < 1e-10
    assert parity_projector_error(0.0) < 1e-12
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.slow
def test_criterion_07_small_sics(orbit6, sets6):
    t0 = time.perf_counter()
    ctx6 = DimensionContext(6)
    nv = normals(sets6, orbit6)
    assert len(nv.vectors) == 984
    sics = find_small_sics(nv.vectors, 2)
    assert len(sics) == C["small_sics"]["dim6"]
    assert all(has_displacement_form(s, ctx6) for s in sics)
    # dimension 9: targeted sets, one anchor normal per WH orbit of sets
    orb9 = generate_orbit(sample_eigenspace(DimensionContext(9), "1", 1))
    S9 = expand_reps(targeted_search(orb9).sets, 9)
    nv9 = normals(S9, orb9)
    so = classify_orbits(S9, 9).set_orbit[nv9.set_index]
    anchors = sorted({int(o): k for k, o in reversed(list(enumerate(so)))}.values())
    sics9 = find_small_sics(nv9.vectors, 3, anchors=anchors)
    assert len(sics9) >= C["small_sics"]["dim9_at_least"]
    assert all(s.is_sic and s.span_dim == 3 for s in sics9)
    # four-vector construction in every eigenspace
    for label in LABELS:
        for seed in (1, 2, 3):
            rep = four_point_sic(sample_eigenspace(ctx6, label, seed))
            assert rep.constant_overlaps
            if label != "1":
                assert rep.span_dim == 2
                assert abs(rep.sic.overlap - 1 / math.sqrt(3)) < 1e-10
    assert max(rst_operators().identity_errors().values()) < 1e-12
    assert time.perf_counter() - t0 < 600


def test_criterion_08_subgroup_spans():
    for N, spans in C["subgroup_spans"]["spans"].items():
        for seed in range(1, 6):
            assert [span_table(int(N), lab, seed) for lab in LABELS] == spans, (N, seed)


@pytest.mark.slow
def test_criterion_09_odd_squarefree_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    for N in (15, 21):
        ctx = DimensionContext(N)
        mats = [random_symplectic(rng, N) for _ in range(100)]
        for G in mats:
            tr = trace_gauss(G, ctx)
            assert abs(tr.analytic - tr.numeric) < 1e-9
            assert tr.analytic >= 1 - 1e-9
        assert tensor_rep_check(ctx, mats).max_unitary_error < 1e-11
        assert tensor_rep_check(ctx, []).max_displacement_error < 1e-11
        dividing = random_order_dividing(rng, ctx, 100)
        assert len(dividing) == 100
        for G in dividing:
            U = symplectic_unitary(G, ctx)
            for v in eigenvector_samples(U, n_order(G, ctx)[0], rng):
                r = general_dependency_construction(G, v, ctx)
                assert r.ok and r.ratio < DEP_TOL, (G.entries, r.failed)
    for N in (4, 6, 8):
        ctx = DimensionContext(N)
        G = parity_matrix(ctx)
        samples = list(eigenvector_samples(symplectic_unitary(G, ctx), n_order(G, ctx)[0], rng))
        assert len(samples) == 2
        for v in samples:
            r = general_dependency_construction(G, v, ctx)
            assert r.ok and r.ratio < DEP_TOL
    assert time.perf_counter() - t0 < 600


def test_criterion_10_monomial_suite():
    eta = np.exp(2j * np.pi / 3)
    r9 = zauner_zero_component_check(DimensionContext(9))
    assert r9.monomial
    assert sorted(np.round(r9.diagonal, 10).tolist(), key=np.angle) == \
        sorted(np.round([1, 1, eta], 10).tolist(), key=np.angle)
    assert all(max(c) < 1e-10 for c in r9.sample_min_components)
    assert len(r9.sets) == 9 and r9.all_dependent and r9.partition
    r4 = uf_zero_component_check(DimensionContext(4))
    assert r4.monomial and len(r4.sets) == 4 and r4.all_dependent and r4.partition
    r8 = knomial_dim8_check(sample_eigenspace(DimensionContext(8), "eta2", 1))
    assert r8.zero_components == 2 and r8.dependency_found


@pytest.mark.xfail(strict=True, reason=(
    "U_F with U_F^4 = 1 has diagonal {1, -i} in the monomial basis at N = 4 and 16; "
    "i is not an eigenvalue of U_F at N = 4 (spectrum 1, 1, -1, -i), so the "
    "reference value {1, i} cannot be reproduced"))
def test_criterion_10_uf_diagonal_reference_value():
    for N in (4, 16):
        U = uf_unitary(DimensionContext(N))
        mb = build_monomial_basis(DimensionContext(N))
        diag = {complex(np.round(z, 10)) for z in np.diag(mb.transform(U))
                if abs(z) > 1e-10}
        assert diag == {1 + 0j, 1j}
