import itertools
from collections import Counter
from math import comb

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cmfourfold.cmtype import CMType, shioda_cm_type
from cmfourfold.cyclo import CMAlgebra, Embedding, pair_representatives
from cmfourfold.errors import DimensionMismatch, InvalidCMType, WrongDimension
from cmfourfold.mtrep import (WeightMatrix, canonical_form, delta_character, dual_rep,
                              galois_orbit_matrix, generic_class_count, hodge_class_count,
                              hodge_class_count_by_types, hodge_group_rank,
                              hodge_lattice_basis, is_mumford_type, mumford_pairing,
                              rank_bounds_from_class_counts, sum_rep, sym2_substructures,
                              sym2_totals, weight_matrix, weight_matrix_equivalent)

from conftest import RHO_M, RHO_S
from oracles import UNIMODULAR, apply, brute_force_class_count, brute_force_mumford

IDENTITY4 = WeightMatrix(tuple(tuple(int(i == j) for j in range(4)) for i in range(4)))


@st.composite
def cm_types(draw, conductors=(3, 4, 5, 7, 8, 9, 12), max_g=5):
    ns = tuple(draw(st.lists(st.sampled_from(conductors), min_size=1, max_size=2)))
    alg = CMAlgebra(ns)
    if alg.g > max_g:
        ns = ns[:1]
        alg = CMAlgebra(ns)
    chosen = [Embedding(j, a if draw(st.booleans()) else n - a)
              for j, n in enumerate(ns) for a in pair_representatives(n)]
    return CMType(alg, frozenset(chosen))


def test_shioda_weight_data(shioda):
    # embeddings ordered 0:1, 0:2, 0:4, 0:5, 0:7, 0:8, 1:1, 1:2
    assert delta_character(shioda) == (1, 1, 1, -1, -1, -1, 1, -1)
    assert hodge_group_rank(shioda) == 3
    W = weight_matrix(shioda)
    assert W.rows == ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -1, 1))
    assert (W.g, W.r) == (4, 3)
    assert W.to_json() == {"g": 4, "r": 3, "rows": [[1, 0, 0], [0, 1, 0], [0, 0, 1],
                                                     [1, -1, 1]]}


def test_twisted_weight_data(twisted):
    assert hodge_group_rank(twisted) == 3
    assert weight_matrix(twisted).rows == ((1, 0, 0), (0, 1, 0), (0, 0, -1), (-1, 1, -1))


def test_product_of_cm_elliptic_curves_has_rank_two():
    assert hodge_group_rank(CMType.parse("[3,4]:{0:1,1:1}")) == 2


def test_rank_of_nondegenerate_types():
    # Q(zeta_7) with {1,2,4} is degenerate (rank 1); {1,2,3} is nondegenerate (rank 3)
    assert hodge_group_rank(CMType.parse("[7]:{0:1,0:2,0:4}")) == 1
    assert hodge_group_rank(CMType.parse("[7]:{0:1,0:2,0:3}")) == 3


def test_invalid_types_are_rejected():
    bad = CMType(CMAlgebra((9, 3)), frozenset({Embedding(0, 1), Embedding(0, 8)}))
    with pytest.raises(InvalidCMType):
        weight_matrix(bad)


@settings(max_examples=80, deadline=None)
@given(cm_types())
def test_rank_matches_orbit_matrix_rank(cm):
    assert hodge_group_rank(cm) == sympy.Matrix(galois_orbit_matrix(cm)).rank()
    basis = hodge_lattice_basis(cm)
    assert weight_matrix(cm).rank() == len(basis)


def test_equivalence_against_brute_force_unimodular(shioda, twisted):
    W = weight_matrix(shioda)
    reachable = {apply(W, perm, U).rows for perm in itertools.permutations(range(4))
                 for U in UNIMODULAR}
    canon = canonical_form(W)
    for rows in list(reachable)[:300]:
        assert canonical_form(WeightMatrix(rows)) == canon
    # RHO_M is reached with entries in {-1, 0, 1}; RHO_S is not reachable at all
    assert RHO_M.rows in reachable
    assert weight_matrix_equivalent(W, RHO_M)
    assert weight_matrix_equivalent(weight_matrix(twisted), RHO_M)


def signed_relations(W):
    """Sign patterns e with sum e_i row_i = 0, up to overall sign.

    Invariant under row permutations (as a multiset of +1 counts) and under
    any column change of basis, so it separates inequivalent matrices.
    """
    found = Counter()
    for signs in itertools.product((1, -1), repeat=W.g):
        if signs[0] == 1 and not any(sum(e * r[c] for e, r in zip(signs, W.rows))
                                     for c in range(W.r)):
            found[min(signs.count(1), signs.count(-1))] += 1
    return found


def test_rho_s_is_not_equivalent_to_the_shioda_matrix(shioda):
    # the row relation of W is r1 - r2 + r3 - r4 = 0 (two +, two -);
    # of RHO_S it is r1 + r2 + r3 - r4 = 0 (three +, one -)
    W = weight_matrix(shioda)
    assert signed_relations(W) == signed_relations(RHO_M) == Counter({2: 1})
    assert signed_relations(RHO_S) == Counter({1: 1})
    assert not weight_matrix_equivalent(W, RHO_S)


def test_equivalence_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        weight_matrix_equivalent(RHO_S, IDENTITY4)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3).filter(any),
                min_size=4, max_size=4),
       st.permutations(range(4)), st.sampled_from(UNIMODULAR))
def test_canonical_form_is_invariant(rows, perm, U):
    W = WeightMatrix(tuple(map(tuple, rows)))
    assert canonical_form(apply(W, perm, U)) == canonical_form(W)
    assert is_mumford_type(apply(W, perm, U)) == is_mumford_type(W)


def test_class_counts(shioda, twisted, elliptic_flip):
    for cm in (shioda, twisted, elliptic_flip):
        W = weight_matrix(cm)
        counts = [hodge_class_count(W, k) for k in range(1, 5)]
        assert counts == [4, 8, 4, 1]
        assert counts == [hodge_class_count_by_types(cm, k) for k in range(1, 5)]
        assert counts == [brute_force_class_count(W, k) for k in range(1, 5)]
    assert hodge_class_count(IDENTITY4, 2) == 6
    assert [generic_class_count(4, k) for k in range(1, 5)] == [4, 6, 4, 1]
    with pytest.raises(ValueError):
        hodge_class_count(IDENTITY4, 5)


@settings(max_examples=60, deadline=None)
@given(cm_types(max_g=4))
def test_class_count_oracles_agree(cm):
    W = weight_matrix(cm)
    for k in range(1, W.g + 1):
        expected = brute_force_class_count(W, k)
        assert hodge_class_count(W, k) == expected
        assert hodge_class_count_by_types(cm, k) == expected
        assert hodge_class_count(W, k) >= comb(W.g, k)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3).filter(any),
                min_size=2, max_size=5), st.randoms(use_true_random=False),
       st.sampled_from(UNIMODULAR))
def test_class_count_depends_only_on_weight_multiset(rows, rnd, U):
    W = WeightMatrix(tuple(map(tuple, rows)))
    perm = list(range(W.g))
    rnd.shuffle(perm)
    V = apply(W, perm, U)
    for k in range(1, W.g + 1):
        assert hodge_class_count(W, k) == hodge_class_count(V, k)
        assert hodge_class_count(W, k) == hodge_class_count(dual_rep(W), k)


def test_dual_and_sum():
    W = WeightMatrix(((1, 0), (0, 1)))
    assert dual_rep(W).rows == ((-1, 0), (0, -1))
    assert dual_rep(dual_rep(W)) == W
    S = sum_rep(W, dual_rep(W))
    assert S.g == 4 and Counter(S.full_weights()) == Counter(W.full_weights()) + Counter(W.full_weights())
    with pytest.raises(DimensionMismatch):
        sum_rep(W, WeightMatrix(((1,),)))
    with pytest.raises(ValueError):
        WeightMatrix(((1, 0), (0, 0)))


def test_rank_bounds(shioda):
    assert rank_bounds_from_class_counts(shioda) == (3, 3)
    assert rank_bounds_from_class_counts(CMType.parse("[3,4]:{0:1,1:1}")) == (1, 2)


def test_sym2_tables(shioda, twisted, elliptic_flip):
    expected = [(1, (0, 1, 0)), (2, (1, 0, 1)), (3, (0, 3, 0)), (6, (1, 4, 1)),
                (6, (1, 4, 1)), (6, (2, 2, 2)), (6, (2, 2, 2)), (6, (3, 0, 3))]
    for cm in (shioda, twisted, elliptic_flip):
        reports = sym2_substructures(weight_matrix(cm), cm)
        assert [(r.dimension, r.hodge_numbers) for r in reports] == expected
        assert sym2_totals(reports) == (10, 16, 10)


@settings(max_examples=60, deadline=None)
@given(cm_types())
def test_sym2_partitions_the_basis(cm):
    W = weight_matrix(cm)
    reports = sym2_substructures(W, cm)
    g = cm.algebra.g
    assert sum(r.dimension for r in reports) == comb(2 * g + 1, 2)
    assert sym2_totals(reports) == (g * (g + 1) // 2, g * g, g * (g + 1) // 2)
    for r in reports:
        # orbits are closed under complex conjugation, so Hodge numbers are symmetric
        assert r.hodge_numbers[0] == r.hodge_numbers[2]
        assert Counter(r.weights) == Counter(tuple(-x for x in w) for w in r.weights)


def test_sym2_dimension_mismatch(shioda):
    with pytest.raises(DimensionMismatch):
        sym2_substructures(WeightMatrix(((1,),)), shioda)


def test_mumford_form_on_literal_matrices():
    assert is_mumford_type(RHO_M)
    assert brute_force_mumford(RHO_M)
    assert not is_mumford_type(RHO_S)
    assert not brute_force_mumford(RHO_S)
    assert not is_mumford_type(IDENTITY4)
    literal_flip = WeightMatrix(((1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)))
    assert not is_mumford_type(literal_flip) and not brute_force_mumford(literal_flip)
    assert mumford_pairing(RHO_S) is None
    with pytest.raises(WrongDimension):
        mumford_pairing(WeightMatrix(((1,),)))


def test_mumford_form_of_computed_matrices(shioda, twisted, elliptic_flip):
    # honest outcome: all three types share one weight matrix up to equivalence
    for cm in (shioda, twisted, elliptic_flip):
        W = weight_matrix(cm)
        assert is_mumford_type(W) == brute_force_mumford(W) is True


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3).filter(any),
                min_size=4, max_size=4))
def test_mumford_test_agrees_with_brute_force(rows):
    W = WeightMatrix(tuple(map(tuple, rows)))
    assert is_mumford_type(W) == brute_force_mumford(W)


def test_twisted_type_is_galois_conjugate_of_elliptic_flip(twisted, elliptic_flip):
    assert elliptic_flip.galois(5) == twisted
    assert shioda_cm_type().galois(5) != twisted
