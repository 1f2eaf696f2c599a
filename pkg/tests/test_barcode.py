import json
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from novikov_barcodes.barcode import (
    INF,
    Bar,
    Barcode,
    barcode,
    barcode_of,
    compare_barcodes,
    perturb_filtrations,
    stability_probe,
    tensor_barcode,
)
from novikov_barcodes.coefficients import ExponentGroup, NovikovScalar, PreconditionError
from novikov_barcodes.complexes import FilteredChainComplex, betti_complex, random_complex, tensor_product
from novikov_barcodes.eggbeater import build_model, egg_cone
from novikov_barcodes.filtered_linalg import FilteredMap, FilteredSpace

from helpers import GAMMA_ONE
from oracles import novikov_rank

F = Fraction


def _bars(*triples):
    return [Bar(k, F(e), L if L == INF else F(L)) for k, e, L in triples]


# -- barcode_of -------------------------------------------------------------------


def test_zero_boundary_gives_infinite_bars():
    C = betti_complex([2, 0, 3], 2, filtrations=[[0, 1], [], [F(1, 2), 2, 3]])
    bc = barcode(C)
    assert bc.infinite_count() == 5 and bc.finite_lengths() == []
    assert bc.multiplicities() == {0: 2, 2: 3}


def test_single_finite_bar():
    top = FilteredSpace(["e1"], [0], GAMMA_ONE)
    bot = FilteredSpace(["e0"], [0], GAMMA_ONE)
    d = FilteredMap.from_dense(top, bot, [[NovikovScalar.t(3, 2, GAMMA_ONE)]])
    C = FilteredChainComplex({0: bot, 1: top}, {1: d}, 0)
    bc = barcode(C)
    assert [(b.degree, b.length) for b in bc] == [(0, 3)]
    assert bc.bars[0].endpoint == 0  # -3 mod 1


def test_egg_degree_minus_two_concise_multiplicity():
    cone = egg_cone(build_model(3, 1, 0))
    bc = barcode_of(cone, -2, "image")
    assert bc.concise().multiplicity(-2) == 1
    assert bc.zero_length_count() == 2


def test_image_mode_needs_acyclicity():
    C = betti_complex([1], 2)
    with pytest.raises(PreconditionError):
        barcode_of(C, 0, "image")
    with pytest.raises(ValueError):
        barcode_of(C, 0, "cokernel")


@pytest.mark.parametrize("seed", range(30))
def test_verbose_multiplicity_is_kernel_dimension(seed):
    C = random_complex(seed, prime=2 + seed % 2, gamma=GAMMA_ONE if seed % 4 == 0 else None)
    bc = barcode(C)
    for k in C.degrees:
        d = C.boundary(k)
        rank = novikov_rank(d) if C.space(k - 1).dim and C.space(k).dim else 0
        assert bc.multiplicity(k) == C.space(k).dim - rank
    concise = bc.concise()
    assert concise.counter() == Counter({key: m for key, m in bc.counter().items() if key[2] != 0})
    assert len(concise) == len(bc) - bc.zero_length_count()


@pytest.mark.parametrize("seed", range(20))
def test_lengths_invariant_under_uniform_shift(seed):
    C = random_complex(seed, prime=3)
    shifted = perturb_filtrations(C, {None: F(7, 3)}, lambda k, i: None)
    a, b = barcode(C), barcode(shifted)
    for k in C.degrees:
        assert a.finite_lengths(k) == b.finite_lengths(k)
        assert compare_barcodes(a, b, k) == 0
    assert sorted(x.endpoint + F(7, 3) for x in a) == sorted(x.endpoint for x in b)


# -- tensor rules -----------------------------------------------------------------


def test_tensor_rules():
    inf_a = Barcode(_bars((0, 1, INF)))
    inf_b = Barcode(_bars((1, 2, INF)))
    assert tensor_barcode(inf_a, inf_b).bars == tuple(_bars((1, 3, INF)))
    fin = Barcode(_bars((0, 1, 4)))
    assert tensor_barcode(fin, inf_b).bars == tuple(_bars((1, 3, 4)))
    assert tensor_barcode(inf_b, fin).bars == tuple(_bars((1, 3, 4)))
    other = Barcode(_bars((2, 0, 3)))
    got = tensor_barcode(fin, other)
    assert sorted((b.degree, b.endpoint, b.length) for b in got) == [(2, 1, 3), (3, 5, 3)]


@pytest.mark.parametrize("seed", range(50))
def test_tensor_barcode_matches_direct_computation(seed):
    p = 2 + seed % 2
    C = random_complex(seed, prime=p, degrees=(0, 1), max_pairs=2)
    D = random_complex(seed + 500, prime=p, degrees=(0, 1), max_pairs=1)
    predicted = tensor_barcode(barcode(C), barcode(D))
    direct = barcode(tensor_product(C, D))
    assert predicted.same_bars(direct)


# -- comparisons and stability ----------------------------------------------------


def test_compare_examples():
    a = Barcode(_bars((0, 0, 5), (0, 0, 3)))
    b = Barcode(_bars((0, 0, 5), (0, 0, 1)))
    assert compare_barcodes(a, a) == 0
    assert compare_barcodes(a, b) == 2
    assert compare_barcodes(a, Barcode(_bars((0, 0, 5)))) == 3


def test_probe_zero_delta_and_uniform():
    C = random_complex(4, prime=2, strictness=1)
    rep = stability_probe(C, 0, seeds=5)
    assert rep.max_deviation == 0 and rep.ok
    rep = stability_probe(C, F(1, 10), seeds=3, uniform=True)
    assert rep.max_deviation == 0 and rep.ok


@pytest.mark.parametrize("seed", range(5))
def test_probe_random_within_bound(seed):
    C = random_complex(seed, prime=3, strictness=1, max_pairs=2)
    rep = stability_probe(C, F(1, 10), seeds=20)
    assert rep.ok, rep.to_json()
    assert not rep.skipped
    assert rep.max_deviation <= 2 * F(1, 10)


# -- serialization ----------------------------------------------------------------


def test_endpoint_representative():
    g = ExponentGroup([F(3, 2)])
    bc = Barcode(_bars((0, F(7, 2), 1), (0, F(-1, 2), INF)), gamma=g)
    assert sorted(b.endpoint for b in bc) == [F(1, 2), 1]


@given(st.integers(0, 3000))
def test_json_and_csv_round_trip(seed):
    C = random_complex(seed, prime=2, gamma=GAMMA_ONE if seed % 2 else None)
    bc = barcode(C)
    again = Barcode.from_json(json.loads(json.dumps(bc.to_json())))
    assert again == bc
    from_csv = Barcode.from_csv(bc.to_csv(), bc.kind, bc.gamma)
    assert from_csv == bc
    assert bc.to_csv() == from_csv.to_csv()


def test_csv_header_and_order():
    bc = Barcode(_bars((1, 0, 2), (0, 0, 2), (0, 0, INF), (0, 0, 2)))
    lines = bc.to_csv().splitlines()
    assert lines[0] == "degree,endpoint_num,endpoint_den,length,multiplicity"
    assert lines[1:] == ["0,0,1,inf,1", "0,0,1,2/1,2", "1,0,1,2/1,1"]
