"""Targeted dependency search for dimensions too large to enumerate.

Candidates are the predicted sets plus every N-set that is a union of
cycles of an affine conjugate of the order-6 matrix M or of Z.  Dependent
candidates are then closed under translations and under the linear Zauner
action (which maps the orbit of a Zauner eigenvector onto itself up to
phases), and the closure is re-verified numerically.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations

import numpy as np

from ..orbits import WHOrbit
from ..phasespace import DimensionContext, order6_matrix, zauner_matrix
from .classify import OrbitClassification, canonicalize, classify_orbits
from .predict import predict_sets
from .sets import (
    affine_perm,
    dependent_subset,
    ratio_and_rank,
    singular_values,
    translation_table,
)


def perm_cycles(perm: np.ndarray) -> list[list[int]]:
    seen = np.zeros(len(perm), dtype=bool)
    out = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        cyc = [i]
        j = int(perm[i])
        while j != i:
            cyc.append(j)
            j = int(perm[j])
        seen[cyc] = True
        out.append(cyc)
    return out


def cycle_union_blocks(perm: np.ndarray, size: int):
    """Yield arrays of all point sets of the given size that are unions of cycles.

    Non-trivial cycles are chosen by recursion; the remaining room is filled
    with fixed points through a vectorised combination table.
    """
    cycles = perm_cycles(perm)
    fixed = np.array(sorted(c[0] for c in cycles if len(c) == 1), dtype=np.int64)
    moving = sorted((c for c in cycles if len(c) > 1), key=lambda c: (len(c), c))

    def fill(chosen, room):
        if room > len(fixed):
            return None
        base = np.array([x for c in chosen for x in c], dtype=np.int64)
        F = fixed[_combos(len(fixed), room)]
        block = np.concatenate([np.broadcast_to(base, (len(F), len(base))), F], axis=1)
        return np.sort(block, axis=1)

    def rec(start, chosen, room):
        out = fill(chosen, room)
        if out is not None and len(out):
            yield out
        for k in range(start, len(moving)):
            if len(moving[k]) <= room:
                chosen.append(moving[k])
                yield from rec(k + 1, chosen, room - len(moving[k]))
                chosen.pop()

    yield from rec(0, [], size)


def _combos(n: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(combinations(range(n), k)), dtype=np.int64).reshape(-1, k)


@dataclass
class TargetedResult:
    N: int
    predicted: int
    sets: np.ndarray             # orbit representatives
    classification: OrbitClassification
    max_ratio: float
    min_rejected_ratio: float | None
    closure_rounds: int
    reached_target: bool | None

    @property
    def total(self) -> int:
        return self.classification.total


def targeted_search(orbit: WHOrbit, target: int | None = None) -> TargetedResult:
    N = orbit.N
    rows = orbit.rows
    pred = predict_sets(orbit, verify=False)
    found = []
    min_rej = None
    ctx = DimensionContext(N)
    # sets invariant under a conjugate map are translates of sets invariant
    # under the map itself, so the plain matrices suffice before closure
    blocks = [np.asarray(pred.sets, dtype=np.int64)]
    bases = [zauner_matrix(ctx).as_array() % N]
    if N % 3 == 0:
        bases.append(order6_matrix(ctx).as_array() % N)
    gens = [cycle_union_blocks(affine_perm(A, (0, 0), N), N) for A in bases]
    for block in chain(blocks, *gens):
        d, _, mr = dependent_subset(rows, block)
        found.append(d)
        if mr is not None:
            min_rej = mr if min_rej is None else min(min_rej, mr)
    dep = np.concatenate(found)
    # closure under translations (via canonical forms) and the Zauner action
    Zp = affine_perm(zauner_matrix(DimensionContext(N)).as_array() % N, (0, 0), N)
    reps, keys = canonicalize(dep, N)
    _, first = np.unique(keys, return_index=True)
    reps, keys = reps[first], keys[first]
    rounds = 0
    while True:
        rounds += 1
        img = np.sort(Zp[reps], axis=1)
        ir, ik = canonicalize(img, N)
        new = ~np.isin(ik, keys)
        if not new.any():
            break
        reps = np.concatenate([reps, ir[new]])
        keys = np.concatenate([keys, ik[new]])
        _, first = np.unique(keys, return_index=True)
        reps, keys = reps[first], keys[first]
    cl = classify_orbits(reps, N)
    # every translate has the same singular values up to rounding; check them all
    T = translation_table(N)
    full = np.sort(T[:, cl.reps.astype(np.int64)].reshape(-1, N), axis=1)
    r_all, _ = ratio_and_rank(singular_values(rows, full))
    reached = None if target is None else cl.total >= target
    return TargetedResult(N, pred.count, cl.reps, cl, float(r_all.max()) if len(r_all) else 0.0,
                          min_rej, rounds, reached)


def expand_reps(reps: np.ndarray, N: int) -> np.ndarray:
    """All distinct translates of orbit representatives, sorted rows."""
    T = translation_table(N)
    full = np.sort(T[:, np.asarray(reps, dtype=np.int64)].reshape(-1, N), axis=1)
    return np.unique(full, axis=0)
