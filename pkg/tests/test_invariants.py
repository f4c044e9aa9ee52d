"""
invariants 模块测试：Smith 标准形、det(I-A)、Bowen-Franks 群与 Franks 判定
"""
import pytest
import sympy
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf
from sympy.polys.domains import ZZ

from flowcalc.core.errors import NotIrreducible, TrivialSFT
from flowcalc.core.invariants import (
    bowen_franks_group, determinant, flow_invariants, franks_equivalent, is_trivial_sft, matmul,
    smith_normal_form,
)
from flowcalc.core.sft import EdgeShift, IntMatrix, higher_block

from .strategies import SEED, integer_matrices, irreducible_matrices, square_integer_matrices


def _m(*rows) -> IntMatrix:
    return IntMatrix(tuple(tuple(r) for r in rows))


@pytest.mark.parametrize("rows, ps, factors, free_rank, group", [
    (((2,),), -1, (), 0, "0"),
    (((3,),), -2, (2,), 0, "Z/2"),
    (((1, 1), (1, 0)), -1, (), 0, "0"),
    (((1, 2), (2, 1)), -4, (2, 2), 0, "Z/2 + Z/2"),
    (((5,),), -4, (4,), 0, "Z/4"),
    (((2, 1), (1, 2)), 0, (), 1, "Z"),
    (((1, 3), (3, 1)), -9, (3, 3), 0, "Z/3 + Z/3"),
])
def test_flow_invariants(rows, ps, factors, free_rank, group):
    inv = flow_invariants(_m(*rows))
    assert inv.ps_number == ps
    assert inv.bf_factors == factors
    assert inv.free_rank == free_rank
    assert inv.group == group


def test_full_shift_and_golden_mean_are_flow_equivalent():
    decision = franks_equivalent(_m((2,)), _m((1, 1), (1, 0)))
    assert decision.equivalent
    assert decision.verdict == "equivalent"


def test_different_determinants():
    decision = franks_equivalent(_m((2,)), _m((3,)))
    assert not decision.equivalent
    assert "det(I-A)" in decision.reason


def test_same_determinant_different_groups():
    decision = franks_equivalent(_m((5,)), _m((1, 2), (2, 1)))
    assert decision.verdict == "not_equivalent"
    assert "Bowen-Franks" in decision.reason


def test_reducible_input_refused():
    with pytest.raises(NotIrreducible):
        franks_equivalent(_m((1, 2), (0, 1)), _m((2,)))


@pytest.mark.parametrize("rows", [((1,),), ((0, 1), (1, 0))])
def test_single_orbit_refused(rows):
    with pytest.raises(TrivialSFT):
        franks_equivalent(_m(*rows), _m((2,)))


def test_inessential_vertices_are_trimmed_first():
    # v2 没有入边，本质化后只剩全 2 移位
    A = _m((2, 0, 0), (0, 0, 0), (1, 0, 0))
    assert franks_equivalent(A, _m((2,))).equivalent


def test_bowen_franks_group():
    assert bowen_franks_group(_m((1, 2), (2, 1))) == ((2, 2), 0)


def test_smith_normal_form_known_matrix():
    M = [[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]]
    assert smith_normal_form(M).diagonal == (1, 10, 30, 0)


def _check_smith_normal_form(M):
    snf = smith_normal_form(M)
    rows, cols = len(M), len(M[0])
    d = snf.diagonal

    diag = tuple(tuple(d[i] if i == j and i < len(d) else 0 for j in range(cols)) for i in range(rows))
    assert matmul(matmul(snf.left, M), snf.right) == diag
    assert abs(determinant(snf.left)) == 1
    assert abs(determinant(snf.right)) == 1

    nonzero = [x for x in d if x != 0]
    assert all(x > 0 for x in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert d[len(nonzero):] == (0,) * (len(d) - len(nonzero))

    expected = sympy_snf(sympy.Matrix(M), domain=ZZ)
    oracle = [abs(int(expected[i, i])) for i in range(min(rows, cols))]
    assert sorted(x for x in oracle if x) == nonzero


@seed(SEED)
@settings(max_examples=500, deadline=None)
@given(integer_matrices())
def test_smith_normal_form_against_sympy(M):
    _check_smith_normal_form(M)


@seed(SEED)
@settings(max_examples=500, deadline=None)
@given(square_integer_matrices(max_n=5, bound=9))
def test_smith_normal_form_of_square_matrices(M):
    _check_smith_normal_form(M)
    assert abs(determinant(M)) == abs(sympy.Matrix(M).det())


@pytest.mark.parametrize("rows, trivial", [
    ([[1]], True),
    ([[0, 1], [1, 0]], True),
    ([[2]], False),
    ([[1, 1], [1, 0]], False),
])
def test_trivial_sft(rows, trivial):
    assert is_trivial_sft(EdgeShift.from_matrix(rows)) is trivial


@seed(SEED)
@settings(max_examples=200, deadline=None)
@given(irreducible_matrices(max_n=4, max_entry=2), irreducible_matrices(max_n=4, max_entry=2), st.data())
def test_franks_decision_is_an_equivalence(A, B, data):
    assert franks_equivalent(A, A).equivalent
    assert franks_equivalent(A, B).equivalent == franks_equivalent(B, A).equivalent
    perm = data.draw(st.permutations(range(A.n)))
    assert franks_equivalent(A.permuted(perm), A).equivalent
    assert flow_invariants(A.permuted(perm)).key() == flow_invariants(A).key()


@seed(SEED)
@settings(max_examples=100, deadline=None)
@given(irreducible_matrices(max_n=3, max_entry=2), st.sampled_from([2, 3]))
def test_higher_block_keeps_flow_invariants(A, m):
    X = EdgeShift.presented_by(A.to_graph())
    block, _ = higher_block(X, m)
    assert flow_invariants(block.matrix).key() == flow_invariants(X.matrix).key()
    assert franks_equivalent(block.matrix, X.matrix).equivalent
