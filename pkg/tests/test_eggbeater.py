import math
import random
from fractions import Fraction

import pytest
import sympy

from novikov_barcodes.coefficients import ExponentGroup, PreconditionError
from novikov_barcodes.complexes import betti_complex, homology_ranks, verify_complex
from novikov_barcodes.eggbeater import (
    SignSequence,
    build_model,
    cz_index,
    degree_counts,
    egg_cone,
    egg_cone_report,
    expected_concise,
    perturbed_rotation,
    product_cone_crosscheck,
    product_multiplicity,
    q_kernel_vector,
    q_matrix,
    quantum_betti,
)
from novikov_barcodes.filtered_linalg import FilteredMap

from oracles import novikov_rank

F = Fraction


# -- sign sequences ---------------------------------------------------------------


def test_cz_extremes():
    for p in (2, 3, 5):
        assert cz_index(SignSequence((1,) * (2 * p))) == p + 1
        assert cz_index(SignSequence((-1,) * (2 * p))) == 1 - p


def test_from_xy_convention():
    seq = SignSequence.from_xy([1, -1], [1, 1])
    assert seq.entries == (1, -1, -1, -1)
    assert str(seq) == "+---"
    with pytest.raises(ValueError):
        SignSequence((1, 0))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_degree_counts_are_binomial(p):
    counts = degree_counts(p)
    assert counts == {k: math.comb(2 * p, k + p - 1) for k in range(1 - p, p + 2)}
    assert sum(counts.values()) == 2 ** (2 * p)
    assert sum((-1) ** k * c for k, c in counts.items()) == 0


# -- the model --------------------------------------------------------------------


def test_model_dimensions():
    m2 = build_model(2, 1, 0)
    assert [m2.complex.space(k).dim for k in m2.degrees] == [2 * c for c in (1, 4, 6, 4, 1)]
    m3 = build_model(3, 1, 0)
    assert sum(m3.complex.dims().values()) == 3 * 64
    assert verify_complex(m3.complex).ok


@pytest.mark.parametrize("p", [2, 3])
def test_model_is_acyclic_and_rotation_is_free(p):
    m = build_model(p, 1, 3)
    C = m.complex
    ranks = {k: novikov_rank(C.boundary(k)) if C.space(k - 1).dim and C.space(k).dim else 0 for k in C.degrees}
    assert all(C.space(k).dim == ranks[k] + ranks.get(k + 1, 0) for k in C.degrees)
    assert all(v == 0 for v in homology_ranks(C).values())
    for k in C.degrees:
        R = m.rotation[k]
        assert R**p == FilteredMap.identity(C.space(k))
        sp = C.space(k)
        for j, col in enumerate(R.columns):
            (i,) = col
            assert i != j
            assert m.orbit_of(sp.labels[i]) == m.orbit_of(sp.labels[j])
            assert sp.filtrations[i] == sp.filtrations[j]


def test_actions_scale_with_lambda():
    a, b = build_model(3, 1, 7), build_model(3, F(5, 2), 7)
    for k in a.degrees:
        assert [F(5, 2) * x for x in a.complex.space(k).filtrations] == list(b.complex.space(k).filtrations)


@pytest.mark.parametrize("p, concise, zero", [(2, 16, 16), (3, 64, 128)])
def test_report_totals(p, concise, zero):
    rep = egg_cone_report(build_model(p, 1, 0))
    assert rep.concise_total == concise and rep.zero_length_total == zero
    for d in rep.per_degree:
        assert d.concise == expected_concise(p, d.k)
        assert d.verbose == p * expected_concise(p, d.k)
    assert rep.min_positive_length > 0
    assert rep.to_json()["totals"]["concise"] == concise


@pytest.mark.parametrize("q", [1, 2])
def test_other_primitive_shift(q):
    rep = egg_cone_report(build_model(3, 1, 0), xi_power=q)
    assert rep.concise_total == 64
    with pytest.raises(PreconditionError):
        egg_cone(build_model(3, 1, 0), xi_power=3)


def test_perturbed_rotation_keeps_multiplicities():
    m = build_model(2, 1, 0, gamma=ExponentGroup([1]))
    base = egg_cone_report(m)
    rep = egg_cone_report(m, perturb_seed=0)
    assert [(d.concise, d.zero_length) for d in rep.per_degree] == [
        (d.concise, d.zero_length) for d in base.per_degree
    ]
    T, M = perturbed_rotation(m, 0)
    assert any(not x.is_zero() for x in M.values())
    with pytest.raises(PreconditionError):
        perturbed_rotation(build_model(2, 1, 0), 0)


def test_lengths_double_with_lambda():
    a = egg_cone_report(build_model(2, 1, 4)).barcode.concise()
    b = egg_cone_report(build_model(2, 2, 4)).barcode.concise()
    assert sorted(2 * x for x in a.finite_lengths()) == sorted(b.finite_lengths())


# -- Q_p --------------------------------------------------------------------------


def test_q_matrix_p3_kernel():
    Q = q_matrix(3)
    v = q_kernel_vector(3)
    assert all(not c for c in Q.apply(v).values())
    xi = v[1].coefficient(0)
    assert v[0].coefficient(0) == xi * xi and v[2].coefficient(0) == xi**0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_q_matrix_rank(p):
    assert novikov_rank(q_matrix(p)) == p - 1
    assert novikov_rank(q_matrix(p, p - 1)) == p - 1


# -- products ---------------------------------------------------------------------


def test_quantum_betti_examples():
    cp2 = [1, 0, 1, 0, 1]
    assert [quantum_betti(cp2, 3, k) for k in (0, 2, 3)] == [1, 1, 0]
    assert quantum_betti(cp2, 3, -6) == 1
    torus = [1, 2, 1]
    assert quantum_betti(torus, 0, 3) == 0 and quantum_betti(torus, 0, 1) == 2
    with pytest.raises(ValueError):
        quantum_betti(torus, -1, 0)


def test_product_examples():
    assert product_multiplicity(3, [1, 0, 1], 0).m1 == 26
    r = product_multiplicity(3, [1, 0, 1, 0, 1], 3)
    assert r.residue == 2 and not r.divisible and r.m1 == 32


def test_residue_matches_full_sum():
    rng = random.Random(0)
    for _ in range(50):
        n = rng.randint(1, 4)
        half = [1] + [rng.randint(0, 4) for _ in range(n)]
        b = half + half[-2::-1]
        p = int(sympy.nextprime(rng.randint(2, 12)))
        N = rng.choice([0, rng.randint(1, n + 1)])
        r = product_multiplicity(p, b, N)
        assert r.m1 % p == r.residue
        assert r.divisible == (r.residue == 0)


def test_babbage():
    for p in sympy.primerange(3, 50):
        assert math.comb(2 * p, p) % p == 2


def test_crosscheck_p2():
    res = product_cone_crosscheck(build_model(2, 1, 0), betti_complex([1, 1], 2))
    assert res.ok
    assert res.direct_multiplicity == res.formula.m1 == res.predicted_multiplicity


def test_crosscheck_rejects_nonzero_boundary():
    from novikov_barcodes.complexes import random_complex

    D = random_complex(0, prime=2, acyclic=True)
    with pytest.raises(PreconditionError):
        product_cone_crosscheck(build_model(2, 1, 0), D)
