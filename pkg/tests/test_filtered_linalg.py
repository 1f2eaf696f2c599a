import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from novikov_barcodes.coefficients import CyclotomicRational, DomainError, ExponentGroup, NovikovScalar, PreconditionError
from novikov_barcodes.eggbeater import build_model, egg_cone
from novikov_barcodes.filtered_linalg import (
    NEG_INF,
    FilteredMap,
    FilteredSpace,
    check_svd,
    filtration_of,
    is_orthogonal,
    optimal_pair,
    plain_rank,
    reduce_to_zero_level,
    svd,
)

from helpers import GAMMA_ONE, lower_noise, random_family, random_map
from oracles import cyclotomic_rank, level, novikov_rank, orthogonal_oracle


def _t(e, p=2):
    return NovikovScalar.t(e, p, GAMMA_ONE)


# -- filtration_of / reduction ------------------------------------------------


def test_filtration_examples():
    sp = FilteredSpace(["a", "b"], [0, 2], GAMMA_ONE)
    assert filtration_of(sp, [1, 0]) == 0
    assert filtration_of(sp, [_t(3), 1]) == 2
    assert filtration_of(sp, [0, 0]) == NEG_INF
    with pytest.raises(PreconditionError):
        filtration_of(sp, [1, 0, 0])


def test_zero_level_reduction_examples():
    sp = FilteredSpace(["a", "b"], [0, 0], GAMMA_ONE)
    one = CyclotomicRational.one(2)
    zero = CyclotomicRational.zero(2)
    assert reduce_to_zero_level(sp, [[1, 0]]) == [(one, zero)]
    assert reduce_to_zero_level(sp, [[1, _t(1)]]) == [(one, zero)]
    with pytest.raises(PreconditionError):
        reduce_to_zero_level(sp, [[0, 0]])


def test_orthogonality_examples():
    sp = FilteredSpace(["a", "b"], [0, 0], GAMMA_ONE)
    e1 = {0: NovikovScalar.one(2, GAMMA_ONE)}
    assert is_orthogonal(sp, [sp.unit(0), sp.unit(1)])
    v = sp.vector([1, _t(1)])
    assert not is_orthogonal(sp, [e1, v])  # both reduce to e1
    w = sp.vector([1, 1])
    assert is_orthogonal(sp, [e1, w])
    assert not is_orthogonal(sp, [e1, e1])


def test_zero_level_reduction_rank_equivalence():
    # column rank of the reductions equals the family size exactly when orthogonal
    for seed in range(20):
        space, vecs = random_family(seed, 3, GAMMA_ONE)
        red = reduce_to_zero_level(space, vecs)
        rows = [[red[j][i].coords for j in range(len(red))] for i in range(space.dim)]
        assert (cyclotomic_rank(3, rows) == len(vecs)) == is_orthogonal(space, vecs)


# -- optimal pair -------------------------------------------------------------


def test_optimal_pair_examples():
    sp = FilteredSpace(["a"], [0], GAMMA_ONE)
    assert tuple(optimal_pair(FilteredMap.identity(sp))) == (0, 0)
    sp2 = FilteredSpace(["a", "b"], [0, 0], GAMMA_ONE)
    A = FilteredMap.from_dense(sp2, sp2, [[1, 0], [0, _t(5)]])
    assert optimal_pair(A).column == 0 and optimal_pair(A).row == 0
    with pytest.raises(DomainError):
        optimal_pair(FilteredMap.zero(sp2, sp2))


def test_optimal_pair_tie_break():
    sp = FilteredSpace(["a", "b"], [0, 0])
    A = FilteredMap.from_dense(sp, sp, [[1, 1], [1, 1]])
    assert tuple(optimal_pair(A)) == (0, 0)


@pytest.fixture(scope="module")
def egg3():
    return egg_cone(build_model(3, 1, 0))


def test_first_pivot_avoids_starred_columns(egg3):
    A = egg3.boundary(-1)
    assert A.shape == (3, 21)
    piv = optimal_pair(A)
    assert A.domain.labels[piv.column].startswith("R:")
    # every entry outside the rotation block strictly lowers filtration
    for j, col in enumerate(A.columns):
        if not A.domain.labels[j].startswith("R:"):
            assert filtration_of(A.codomain, col) < A.domain.filtrations[j]


def test_example_three_by_twentyone_kernel_vector(egg3):
    A = egg3.boundary(-1)
    res = svd(A, complete_codomain=False)
    first_two = [A.domain.labels[j] for _, j in res.pivots[:2]]
    assert all(lab.startswith("R:") for lab in first_two)
    r_cols = [j for j, lab in enumerate(A.domain.labels) if lab.startswith("R:")]
    inside = [y for y in res.kernel_basis if set(y) <= set(r_cols)]
    assert len(inside) == 1
    y = inside[0]
    # zero-level coefficients form a kernel vector of R_3 - xi_3 on the bottom orbit
    model = build_model(3, 1, 0)
    R = model.rotation[-2]
    xi = NovikovScalar.xi(3)
    z = {r_cols.index(j): c.leading_term() for j, c in y.items()}
    image = R.apply(z)
    for i, c in z.items():
        image[i] = image.get(i, NovikovScalar.zero(3)) - xi * c
    assert all(not c for c in image.values())


# -- SVD ----------------------------------------------------------------------


def test_svd_zero_map():
    sp = FilteredSpace(["a", "b", "c"], [0, 1, 2])
    res = svd(FilteredMap.zero(sp, sp))
    assert res.rank == 0
    assert res.domain_basis == [sp.unit(i) for i in range(3)]


def test_svd_diagonal_shifts():
    dom = FilteredSpace(["a", "b"], [5, 3])
    cod = FilteredSpace(["x", "y"], [0, 0])
    A = FilteredMap.from_dense(dom, cod, [[1, 0], [0, 1]])
    res = svd(A)
    assert res.rank == 2 and res.shifts == [5, 3]
    assert check_svd(A, res) == []


def _check_with_oracles(A, res):
    problems = check_svd(A, res)
    assert problems == [], problems
    assert res.rank == novikov_rank(A)
    assert orthogonal_oracle(A.domain, res.domain_basis)
    if res.codomain_basis:
        assert orthogonal_oracle(A.codomain, res.codomain_basis)
    for y, x, s in zip(res.domain_basis, res.codomain_basis, res.shifts):
        assert level(A.domain, y) - level(A.codomain, x) == s


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("gamma", [None, GAMMA_ONE], ids=["trivial", "one"])
@pytest.mark.parametrize("prime", [2, 3])
def test_svd_random(seed, gamma, prime):
    A = random_map(seed, prime, gamma)
    _check_with_oracles(A, svd(A))


def _own_column(y, pivot_pos):
    """Column a reduced domain vector started from.

    A column only ever receives multiples of earlier pivot columns, so it is
    the latest pivot in the support, or the single non-pivot index.
    """
    free = [j for j in y if j not in pivot_pos]
    if free:
        assert len(free) == 1
        return free[0]
    return max(y, key=lambda j: pivot_pos[j])


@pytest.mark.parametrize("seed", range(30))
def test_column_operations_keep_levels(seed):
    A = random_map(100 + seed, 2 + seed % 2, GAMMA_ONE if seed % 3 else None)
    res = svd(A, complete_codomain=False)
    pivot_pos = {j: k for k, (_, j) in enumerate(res.pivots)}
    owners = [_own_column(y, pivot_pos) for y in res.domain_basis]
    assert sorted(owners) == list(range(A.domain.dim))
    for y, j in zip(res.domain_basis, owners):
        assert filtration_of(A.domain, y) == A.domain.filtrations[j]
        assert filtration_of(A.codomain, A.apply(y)) <= filtration_of(A.codomain, A.columns[j])


@pytest.mark.parametrize("seed", range(15))
def test_json_round_trip_of_maps(seed):
    A = random_map(seed, 3, GAMMA_ONE)
    B = FilteredMap.from_json(json.loads(json.dumps(A.to_json())))
    assert B == A
    sp = FilteredSpace.from_json(json.loads(json.dumps(A.domain.to_json())))
    assert sp == A.domain


@given(st.integers(0, 10_000), st.sampled_from([None, GAMMA_ONE]))
def test_svd_property(seed, gamma):
    A = random_map(seed, 2, gamma, max_dim=6)
    res = svd(A)
    assert check_svd(A, res) == []
    assert res.rank == plain_rank(A)


# -- orthogonality ------------------------------------------------------------


@pytest.mark.parametrize("seed", range(40))
def test_orthogonality_matches_oracle_and_survives_lower_noise(seed):
    gamma = GAMMA_ONE if seed % 2 else ExponentGroup.trivial()
    space, vecs = random_family(seed, 3 if seed % 3 else 2, gamma)
    expected = orthogonal_oracle(space, vecs)
    assert is_orthogonal(space, vecs) == expected
    rng = random.Random(seed)
    noisy = [lower_noise(rng, space, v, gamma) for v in vecs]
    assert [filtration_of(space, v) for v in noisy] == [filtration_of(space, v) for v in vecs]
    assert is_orthogonal(space, noisy) == expected
