import json
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deplab.depsearch import (
    DEP_TOL,
    BudgetExceeded,
    SearchConfig,
    classify_orbits,
    exhaustive_search,
    predict_sets,
    tag_symmetries,
    targeted_search,
)
from deplab.depsearch.classify import canonicalize, stabilizer, structure_signature, structure_table
from deplab.depsearch.normals import mub_check, normals, orthogonality_analysis, set_triples
from deplab.depsearch.predict import (
    UnlabelledFiducial,
    predict_core_sets,
    predicted_count_bound,
)
from deplab.depsearch.sets import (
    format_set,
    pack_rows,
    parse_set_line,
    point_index,
    singular_values,
    ratio_and_rank,
    translation_table,
    unique_rows,
)
from deplab.depsearch.targeted import expand_reps
from deplab.depsearch.order_dividing import (
    eigenvector_samples,
    general_dependency_construction,
    random_order_dividing,
)
from deplab.orbits import dim3_family, generate_orbit, make_fiducial, sample_eigenspace
from deplab.phasespace import DimensionContext, n_order, parity_matrix
from deplab.unitary_rep import symplectic_unitary

from . import oracle

CONST = json.loads(resources.files("deplab").joinpath("data/constants.json").read_text())


def _orbit(N, label, seed=1):
    return generate_orbit(sample_eigenspace(DimensionContext(N), label, seed))


def _as_set(rows):
    return {tuple(int(x) for x in r) for r in np.asarray(rows)}


# helpers ------------------------------------------------------------------------

def test_set_line_round_trip():
    line = format_set([(0, 0), (1, 2), (3, 4)], 2)
    assert line == "0,0;1,2;3,4;2"
    assert parse_set_line(line) == ([(0, 0), (1, 2), (3, 4)], 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 35), min_size=6, max_size=6, unique=True), min_size=1, max_size=30))
def test_pack_rows_preserves_order(rows):
    A = np.sort(np.array(rows), axis=1)
    keys = pack_rows(A, 36)
    order = np.argsort(keys, kind="stable")
    assert [tuple(r) for r in A[order]] == sorted(tuple(r) for r in A)
    assert len(unique_rows(A, 36)) == len({tuple(r) for r in A})


def test_translation_table():
    T = translation_table(5)
    assert T[point_index((1, 2), 5), point_index((4, 4), 5)] == point_index((0, 1), 5)


# exhaustive search against the brute-force oracle ----------------------------------

@pytest.mark.parametrize("N,label", [(3, "1"), (3, "eta"), (4, "eta"), (4, "eta2"),
                                     (4, "1"), (5, "eta2"), (5, "1")])
def test_search_matches_brute_force(N, label):
    orb = _orbit(N, label)
    rep = exhaustive_search(orb, SearchConfig(workers=1))
    S, R = rep.all_sets()
    brute = oracle.brute_dependent_sets(oracle.orbit_columns(orb.fiducial.vector))
    assert _as_set(S) == _as_set(brute)
    assert rep.total == len(brute)
    assert rep.margins.dead_band_count == 0
    if len(S):
        assert rep.margins.max_dependent_ratio < DEP_TOL


def test_search_unanchored_agrees():
    orb = _orbit(4, "eta")
    a = exhaustive_search(orb, SearchConfig(workers=1))
    b = exhaustive_search(orb, SearchConfig(workers=1, anchored=False))
    assert np.array_equal(a.all_sets()[0], b.all_sets()[0])


def test_search_output_sorted_and_ranked(sets6, search6, orbit6):
    S = sets6.astype(np.int64)
    keys = pack_rows(S, 36)
    assert np.all(np.diff(keys) > 0)
    ratio, rank = ratio_and_rank(singular_values(orbit6.rows, S[:2000]))
    assert ratio.max() < DEP_TOL
    assert np.array_equal(rank, search6.all_sets()[1][:2000])


def test_dim6_h1_count(search6):
    assert search6.total == CONST["dependent_counts"]["counts"]["6"]["1"] == 984


@pytest.mark.parametrize("N", [4, 5, 7])
def test_small_dim_counts(N):
    for label in ("1", "eta", "eta2"):
        rep = exhaustive_search(_orbit(N, label), SearchConfig(workers=1))
        assert rep.total == CONST["dependent_counts"]["counts"][str(N)][label]


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        exhaustive_search(_orbit(8, "eta2"), SearchConfig(workers=1, budget=1e6))
    with pytest.raises(BudgetExceeded):
        exhaustive_search(_orbit(8, "eta2"), SearchConfig(workers=1))


def test_config_validates_tolerances():
    with pytest.raises(ValueError):
        SearchConfig(dep_tol=1e-5)
    with pytest.raises(ValueError):
        SearchConfig(dead_band=(1e-7, 1e-6))


def test_sidecar(tmp_path):
    rep = exhaustive_search(_orbit(4, "eta"), SearchConfig(workers=1))
    n = rep.write_sidecar(tmp_path / "s.txt")
    lines = (tmp_path / "s.txt").read_text().splitlines()
    assert n == len(lines) == 116
    assert lines == sorted(lines, key=lambda l: [point_index(p, 4) for p in parse_set_line(l)[0]])
    assert lines[0] == next(rep.dependency_sets()).line()


# orbit classification ----------------------------------------------------------------

def test_classification_matches_oracle(sets6):
    cl = classify_orbits(sets6, 6)
    assert sorted(cl.lengths.tolist()) == oracle.brute_orbits(sets6, 6)
    assert cl.total == len(sets6)
    assert cl.length_histogram() == {36: 27, 12: 1}
    short = int(np.argmin(cl.lengths))
    assert sorted(map(tuple, cl.stabilizers[short])) == [(0, 0), (2, 4), (4, 2)]


def test_canonicalize_translation_invariant(sets6):
    T = translation_table(6)
    reps, keys = canonicalize(sets6[:50].astype(np.int64), 6)
    moved = np.sort(T[7][sets6[:50].astype(np.int64)], axis=1)
    r2, k2 = canonicalize(moved, 6)
    assert np.array_equal(keys, k2)


def test_symmetry_tags_dim6(sets6):
    tags = tag_symmetries(sets6, 6)
    assert tags.orbit_counts["zauner"] == 9
    assert tags.orbit_counts["m"] == 6
    assert tags.orbit_counts["both"] == 13
    assert tags.set_counts["m"] == 216


def test_structure_table_dim6(sets6):
    rows = structure_table(classify_orbits(sets6, 6))
    assert len(rows) == 28
    # keys: (map orbits, subgroup orbits, quadruples, WH orbit length)
    assert structure_signature(rows) == {(2, 0, 0, 36): 12, (2, 1, 0, 36): 9,
                                         (4, 1, 0, 36): 6, (2, 2, 0, 12): 1}
    with pytest.raises(ValueError):
        structure_table(classify_orbits(np.array([[0, 1, 2, 3]]), 4))


# prediction ----------------------------------------------------------------------------

@pytest.mark.parametrize("N,label", [(4, "eta"), (5, "eta2"), (7, "eta"), (6, "1")])
def test_prediction_counts_and_subset(N, label):
    orb = _orbit(N, label)
    pred = predict_sets(orb)
    assert pred.count == CONST["dependent_counts"]["predicted"][str(N)][label]
    assert pred.count == 0 or pred.max_ratio < DEP_TOL
    found = _as_set(exhaustive_search(orb, SearchConfig(workers=1)).all_sets()[0])
    assert _as_set(pred.sets) <= found


def test_prediction_dim6_generic_zauner(sets6):
    pred = predict_sets(_orbit(6, "1"))
    assert pred.count == 768
    assert _as_set(pred.sets) <= _as_set(sets6)


def test_prediction_needs_label():
    v = np.random.default_rng(0).normal(size=4) + 0j
    orb = generate_orbit(make_fiducial(v / np.linalg.norm(v), "generic"))
    with pytest.raises(UnlabelledFiducial):
        predict_sets(orb)


def test_prediction_bound_dim8():
    assert predicted_count_bound(8, "eta2") == 766080


def test_core_sets():
    orb = _orbit(6, "1")
    S, r = predict_core_sets(orb, 6)
    assert len(S) == 0 or r < DEP_TOL


# targeted search ------------------------------------------------------------------------

def test_targeted_recovers_dim6(sets6):
    res = targeted_search(_orbit(6, "1"))
    assert res.max_ratio < DEP_TOL
    assert _as_set(expand_reps(res.sets, 6)) <= _as_set(sets6)
    assert res.total >= 768


@pytest.mark.slow
def test_targeted_dim9():
    res = targeted_search(_orbit(9, "1"), target=CONST["dim9"]["found_at_least"])
    assert res.predicted == CONST["dim9"]["predicted"]["1"]
    assert res.reached_target and res.max_ratio < DEP_TOL


# normals and orthogonality -------------------------------------------------------------

def test_normals_are_orthogonal_to_sets(search6, orbit6, sets6):
    nv = normals(sets6, orbit6)
    assert nv.max_residual < 1e-8
    assert np.allclose(np.linalg.norm(nv.vectors, axis=1), 1)
    for k in range(0, len(nv.vectors), 97):
        cols = orbit6.columns[:, sets6[nv.set_index[k]].astype(int)]
        assert np.abs(nv.vectors[k].conj() @ cols).max() < 1e-8


def test_dim3_normals_mub():
    orb = generate_orbit(dim3_family(0.0)[0])
    S = exhaustive_search(orb, SearchConfig(workers=1)).all_sets()[0]
    assert len(S) == 12
    nv = normals(S, orb)
    rep = mub_check(nv.vectors)
    assert rep.complete and rep.max_unbiased_error < 1e-12


def test_orthogonality_triples(sets6, orbit6):
    cl = classify_orbits(sets6, 6)
    nv = normals(sets6, orbit6)
    rep = orthogonality_analysis(nv.vectors, cl.set_orbit[nv.set_index])
    assert rep.maximal_triangles_single_orbit == 712
    assert rep.n_quadruples == 0
    trip = set_triples(rep.maximal_triangles, nv.set_index)
    assert all(len(t) == 3 for t in trip)


# general dependency construction --------------------------------------------------------

@pytest.mark.parametrize("N", [15, 21])
def test_general_construction_odd(N):
    ctx = DimensionContext(N)
    rng = np.random.default_rng(7)
    mats = random_order_dividing(rng, ctx, 5)
    assert len(mats) == 5
    for G in mats:
        U = symplectic_unitary(G, ctx)
        for v in eigenvector_samples(U, n_order(G, ctx)[0], rng):
            r = general_dependency_construction(G, v, ctx)
            assert r.ok, r.failed
            assert r.ratio < DEP_TOL


@pytest.mark.parametrize("N", [4, 6, 8])
def test_general_construction_parity(N):
    ctx = DimensionContext(N)
    G = parity_matrix(ctx)
    rng = np.random.default_rng(0)
    for v in eigenvector_samples(symplectic_unitary(G, ctx), n_order(G, ctx)[0], rng):
        r = general_dependency_construction(G, v, ctx)
        assert r.ok, r.failed
        cols = oracle.orbit_columns(v / np.linalg.norm(v))[:, list(r.dependency.indices)]
        sv = np.linalg.svd(cols, compute_uv=False)
        assert sv[-1] / sv[0] < DEP_TOL
