import json
import math
import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from novikov_barcodes.barcode import barcode
from novikov_barcodes.coefficients import CyclotomicRational, NovikovScalar, PreconditionError
from novikov_barcodes.complexes import (
    FilteredChainComplex,
    betti_complex,
    build_cone,
    cone_homotopy_iso,
    cone_tensor_iso_check,
    double_map,
    graded_identity,
    homology_ranks,
    homotopy_term,
    random_chain_map,
    random_complex,
    random_homotopy,
    tensor_product,
    unit_complex,
    verify_complex,
)
from novikov_barcodes.eggbeater import build_model, egg_cone
from novikov_barcodes.filtered_linalg import FilteredMap, FilteredSpace, filtration_of

from helpers import GAMMA_ONE
from oracles import novikov_rank


def oracle_homology(C):
    ranks = {k: novikov_rank(C.boundary(k)) if C.space(k - 1).dim and C.space(k).dim else 0 for k in C.degrees}
    return {k: C.space(k).dim - ranks[k] - ranks.get(k + 1, 0) for k in C.degrees}


def two_term(prime=2, filt=(1, 0), coeff=1, names=("a", "b")):
    top = FilteredSpace([names[0]], [filt[0]], None, prime)
    bot = FilteredSpace([names[1]], [filt[1]], None, prime)
    d = FilteredMap.from_dense(top, bot, [[coeff]])
    return FilteredChainComplex({0: bot, 1: top}, {1: d}, 0, prime)


# -- verify_complex -------------------------------------------------------------


def test_bad_complex_is_flagged():
    sp = [FilteredSpace([f"e{k}"], [k], None, 2) for k in range(3)]
    d1 = FilteredMap.from_dense(sp[1], sp[0], [[1]])
    d2 = FilteredMap.from_dense(sp[2], sp[1], [[1]])
    C = FilteredChainComplex({0: sp[0], 1: sp[1], 2: sp[2]}, {1: d1, 2: d2}, 0, 2)
    report = verify_complex(C)
    assert not report.ok
    assert [(v.kind, v.degree, v.column) for v in report.violations] == [("d^2", 2, 0)]


def test_strictness_violation_is_flagged():
    C = two_term(filt=(0, 0))
    C.strictness = 1
    kinds = {v.kind for v in verify_complex(C).violations}
    assert kinds == {"strictness"}


@pytest.mark.parametrize("lam", [1, 2])
def test_egg_complex_is_strict_in_lambda(lam):
    model = build_model(3, lam, 0)
    assert model.complex.strictness == lam / 2
    assert verify_complex(model.complex).ok


# -- cones ----------------------------------------------------------------------


def test_cone_of_identity_shift_one_doubles_barcode():
    C = random_complex(3, prime=3)
    cone = build_cone(C, graded_identity(C), CyclotomicRational.one(3))
    assert verify_complex(cone).ok
    base = Counter((b.degree, b.endpoint, b.length) for b in barcode(C))
    expected = base + Counter({(k + 1, e, L): m for (k, e, L), m in base.items()})
    got = Counter((b.degree, b.endpoint, b.length) for b in barcode(cone))
    assert got == expected


def test_egg_cone_dimensions():
    for p in (2, 3):
        model = build_model(p, 1, 0)
        cone = egg_cone(model)
        for k in cone.degrees:
            expected = p * (math.comb(2 * p, k + p - 1) if 0 <= k + p - 1 <= 2 * p else 0)
            expected += p * (math.comb(2 * p, k + p - 2) if 0 <= k + p - 2 <= 2 * p else 0)
            assert cone.space(k).dim == expected


@pytest.mark.parametrize("seed", range(25))
def test_random_cones_are_complexes(seed):
    C = random_complex(seed, prime=2 + seed % 2, gamma=GAMMA_ONE if seed % 3 == 0 else None)
    T = random_chain_map(C, seed)
    cone = build_cone(C, T)
    assert verify_complex(cone).ok
    for k in cone.degrees:
        assert cone.boundary(k - 1) @ cone.boundary(k) == FilteredMap.zero(cone.space(k), cone.space(k - 2))


def test_cone_rejects_non_chain_map_and_raising_map():
    C = two_term()
    bad = {0: FilteredMap.identity(C.space(0)), 1: FilteredMap.zero(C.space(1), C.space(1))}
    with pytest.raises(PreconditionError):
        build_cone(C, bad)
    # a chain map that raises filtration: multiply both degrees by t^{-1}
    D = two_term()
    D = FilteredChainComplex(
        {k: FilteredSpace(D.space(k).labels, D.space(k).filtrations, GAMMA_ONE) for k in D.degrees},
        {1: FilteredMap.from_dense(
            FilteredSpace(["a"], [1], GAMMA_ONE), FilteredSpace(["b"], [0], GAMMA_ONE), [[1]])},
        0,
    )
    up = {k: FilteredMap.identity(D.space(k)).scale(NovikovScalar.t(-1, 2, GAMMA_ONE)) for k in D.degrees}
    with pytest.raises(PreconditionError):
        build_cone(D, up)


def test_cone_monotonicity_pattern_on_egg_cone():
    cone = egg_cone(build_model(2, 1, 0))
    for k in cone.degrees:
        d = cone.boundary(k)
        if not cone.space(k - 1).dim:
            continue
        for j, col in enumerate(d.columns):
            lvl = filtration_of(cone.space(k - 1), col)
            own = cone.space(k).filtrations[j]
            if cone.space(k).labels[j].startswith("R:"):
                assert lvl == own  # touches the zero-shift rotation block
            else:
                assert lvl < own


@pytest.mark.parametrize("seed", range(15))
def test_cone_of_acyclic_source_is_acyclic(seed):
    C = random_complex(seed, prime=3, acyclic=True, max_pairs=2)
    cone = build_cone(C, random_chain_map(C, seed + 1))
    assert all(v == 0 for v in homology_ranks(cone).values())
    assert all(v == 0 for v in oracle_homology(cone).values())


# -- double maps ----------------------------------------------------------------


def test_double_map_identity_and_rotation():
    model = build_model(2, 1, 0)
    cone = egg_cone(model)
    D = double_map(cone, graded_identity(model.complex))
    for k in cone.degrees:
        assert D[k] == FilteredMap.identity(cone.space(k))
    DR = double_map(cone, model.rotation)
    for k in cone.degrees:
        if cone.space(k - 1).dim:
            assert cone.boundary(k) @ DR[k] == DR[k - 1] @ cone.boundary(k)


def test_double_map_of_root_powers():
    from novikov_barcodes.cyclic import generate_power_p_fixture

    data = generate_power_p_fixture(2, 1, 3)
    cone = data.cone
    DS = double_map(cone, data.S)
    DT = double_map(cone, data.T)
    for k in cone.degrees:
        assert DS[k] ** 2 == DT[k]


# -- tensor products --------------------------------------------------------------


def test_tensor_with_unit():
    C = random_complex(5, prime=3)
    P = tensor_product(C, unit_complex(3))
    assert list(P.degrees) == list(C.degrees)
    for k in C.degrees:
        assert P.space(k).labels == tuple(f"{x}⊗1" for x in C.space(k).labels)
        assert P.space(k).filtrations == C.space(k).filtrations
        assert P.boundary(k).to_dense() == C.boundary(k).to_dense()


def test_two_two_term_complexes():
    C = two_term(names=("a", "b"))
    D = two_term(filt=(3, 1), names=("c", "d"))
    P = tensor_product(C, D)
    assert P.dims() == {0: 1, 1: 2, 2: 1}
    assert P.space(1).labels == ("b⊗c", "a⊗d")
    one = NovikovScalar.one(2)
    # d(a⊗c) = b⊗c - a⊗d
    assert P.boundary(2).columns[0] == {0: one, 1: -one}
    assert verify_complex(P).ok
    assert P.space(2).filtrations == (4,)


@pytest.mark.parametrize("seed", range(20))
def test_kunneth(seed):
    C = random_complex(seed, prime=2 + seed % 2, degrees=(0, 1), max_pairs=1)
    D = random_complex(seed + 50, prime=2 + seed % 2, degrees=(0, 1), max_pairs=1)
    P = tensor_product(C, D)
    assert verify_complex(P).ok
    hC, hD, hP = oracle_homology(C), oracle_homology(D), oracle_homology(P)
    assert sum(hP.values()) == sum(hC.values()) * sum(hD.values())
    for m in P.degrees:
        assert hP[m] == sum(hC[i] * hD.get(m - i, 0) for i in C.degrees)
        for lab, f in zip(P.space(m).labels, P.space(m).filtrations):
            a, b = lab.split("⊗")
            fa = next(C.space(i).filtrations[C.space(i).index(a)] for i in C.degrees if a in C.space(i).labels)
            fb = next(D.space(i).filtrations[D.space(i).index(b)] for i in D.degrees if b in D.space(i).labels)
            assert f == fa + fb


def test_cone_tensor_iso_with_unit_and_egg_slice():
    C = random_complex(1, prime=2)
    T = random_chain_map(C, 1)
    assert cone_tensor_iso_check(C, T, unit_complex(2))
    model = build_model(2, 1, 0)
    assert cone_tensor_iso_check(model.complex, model.rotation, betti_complex([2], 2))


@pytest.mark.parametrize("seed", range(100))
def test_cone_tensor_iso_random(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3])
    C = random_complex(seed, prime=p, degrees=(0, 1), max_pairs=1)
    D = random_complex(seed + 1000, prime=p, degrees=(0, 1), max_pairs=1, max_free=1)
    T = random_chain_map(C, seed)
    assert cone_tensor_iso_check(C, T, D)


# -- homotopic maps -------------------------------------------------------------


def test_homotopy_iso_trivial():
    C = random_complex(2, prime=3)
    I = graded_identity(C)
    K = {k: FilteredMap.zero(C.space(k), C.space(k + 1)) for k in C.degrees}
    iso = cone_homotopy_iso(C, I, I, K)
    for k in iso.source.degrees:
        assert iso.forward[k] == FilteredMap.identity(iso.source.space(k))


@pytest.mark.parametrize("seed", range(20))
def test_homotopy_iso_random(seed):
    C = random_complex(seed, prime=3, gamma=GAMMA_ONE if seed % 2 else None, strictness=0)
    psi = random_chain_map(C, seed)
    K = random_homotopy(C, seed + 7, terms=3, lower_by=0)
    phi = {k: psi[k] + homotopy_term(C, K, k) for k in C.degrees}
    shift = CyclotomicRational.xi(3)
    iso = cone_homotopy_iso(C, phi, psi, K, shift)
    assert barcode(iso.source).same_bars(barcode(iso.target))


def test_homotopy_iso_rejects_wrong_homotopy():
    for seed in range(50):
        C = random_complex(seed, prime=2, max_pairs=2)
        K = random_homotopy(C, seed, terms=4)
        if any(not homotopy_term(C, K, k).is_zero() for k in C.degrees):
            break
    I = graded_identity(C)
    with pytest.raises(PreconditionError):
        cone_homotopy_iso(C, I, I, K)


# -- serialization --------------------------------------------------------------


@given(st.integers(0, 5000))
def test_complex_json_round_trip(seed):
    C = random_complex(seed, prime=3, gamma=GAMMA_ONE if seed % 2 else None, strictness=seed % 2)
    D = FilteredChainComplex.from_json(json.loads(json.dumps(C.to_json())))
    assert D.to_json() == C.to_json()


def test_cone_json_has_provenance():
    C = random_complex(0, prime=3)
    cone = build_cone(C, random_chain_map(C, 0))
    data = json.loads(json.dumps(cone.to_json()))
    assert "provenance" in data and "source" in data["provenance"]
    again = FilteredChainComplex.from_json(data)
    assert again.to_json()["degrees"] == cone.to_json()["degrees"]
