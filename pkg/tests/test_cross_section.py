"""
cross_section 模块测试：合法性、首次返回系统、拉回、不相交化与首次命中分解
"""
from fractions import Fraction

import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from flowcalc.core.cross_section import (
    CrossSection, check_intertwining, disjoint_in_suspension, disjointify, disjointify_all,
    hitting_times, ps_case1, pullback, require_valid, return_system, validate,
)
from flowcalc.core.errors import FlowCalcInputError, InvalidSection, NotDisjoint
from flowcalc.core.fixtures import collapse_code
from flowcalc.core.sft import EdgeShift, PeriodicOrbit, SlidingBlockCode, periodic_orbits, words_of_length

from .strategies import SEED, irreducible_matrices


def test_section_data_is_checked(golden):
    with pytest.raises(FlowCalcInputError):
        CrossSection(golden, 0, frozenset({("a",)}), Fraction(1))
    with pytest.raises(FlowCalcInputError):
        CrossSection(golden, 1, frozenset({("a",)}))
    with pytest.raises(FlowCalcInputError):
        CrossSection(golden, 1, frozenset({("a", "b", "a")}))


def test_valid_section_and_return_time(golden):
    verdict = validate(golden, CrossSection.of_symbols(golden, ["a", "b"]))
    assert verdict.valid
    assert verdict.max_return == 2
    assert validate(golden, CrossSection.full(golden)).max_return == 1


def test_invalid_section_witness(golden):
    C = CrossSection.of_symbols(golden, ["a"])
    verdict = validate(golden, C)
    assert not verdict.valid
    assert verdict.witness == PeriodicOrbit(("b",))
    with pytest.raises(InvalidSection) as err:
        require_valid(C)
    assert err.value.witness == PeriodicOrbit(("b",))


def test_radius_refinement_and_coarsening(full2):
    C = CrossSection.of_symbols(full2, ["a"])
    fine = C.at_radius(2)
    assert fine.radius == 2
    assert len(fine.centers) == 16
    assert fine.same_set(C)
    coarse = fine.coarsen()
    assert coarse.radius == 0
    assert coarse.centers == frozenset({("a",)})


def test_return_system_of_paired_shift(paired, paired_anchors):
    rs = return_system(paired_anchors)
    assert rs.symbols == ("[a1a2]", "[b]")
    assert rs.return_words == (("a1", "a2"), ("b",))
    assert rs.max_return == 2
    assert rs.factor(PeriodicOrbit(("a1", "a2", "b"))) == ("[a1a2]", "[b]")
    assert rs.unfold(("[b]", "[a1a2]")) == PeriodicOrbit(("a1", "a2", "b"))


def test_return_symbols_keep_block_paths_apart(full2):
    # 半径 1 时返回字 a 来自四条不同的块路径
    C = CrossSection.full(full2).at_radius(1)
    assert validate(full2, C).valid
    rs = return_system(C)
    assert len(rs.symbols) == 8
    assert [s for s in rs.symbols if rs.words[s] == ("a",)] == ["[a]", "[a]#2", "[a]#3", "[a]#4"]
    assert rs.return_words == (("a",), ("b",))
    assert len({rs.paths[s] for s in rs.symbols}) == 8


def test_factor_on_full_sections(full2):
    rs = return_system(CrossSection.full(full2))
    assert rs.factor(PeriodicOrbit(("a", "b"))) == ("[a]", "[b]")
    other = return_system(CrossSection.of_symbols(EdgeShift.from_matrix([[1, 1], [1, 1]]), ["a", "b", "c", "d"]))
    assert other.max_return == 1


def test_eta_gives_one_symbol_per_return(paired, paired_anchors):
    eta = return_system(paired_anchors).eta()
    assert eta.M == 0
    assert eta.apply_cycle(("[a1a2]", "[b]")) == ("[[a1a2]]", "[[b]]")


def test_pullback_along_one_block_code(paired, full2):
    phi = collapse_code(paired, full2)
    C = pullback(phi, CrossSection.of_symbols(full2, ["a"], "1/4"))
    assert C.same_set(CrossSection.of_symbols(paired, ["a1", "a2"]))
    assert C.height == Fraction(1, 4)


def test_disjointify(golden):
    C = CrossSection.of_symbols(golden, ["a", "b"])
    D = CrossSection.of_symbols(golden, ["a'"])
    assert disjoint_in_suspension(C, D)
    assert disjointify(C, D) is D
    assert disjointify(C, C).height == Fraction(1, 2)
    heights = [S.height for S in disjointify_all([C, C, C])]
    assert heights == [0, Fraction(1, 2), Fraction(1, 4)]


def test_hitting_times(golden_pair):
    C1, C2 = golden_pair
    word = ("a", "a'", "a", "a'", "b")
    assert hitting_times(C1, C2, word, 1, 2) == (2, Fraction(3, 2))
    tau1, tau2 = hitting_times(C1, C2, ("a", "a'", "b", "a"), 1, 2)
    assert (tau1, tau2) == (1, Fraction(3, 2))


def test_first_hit_decomposition(golden, golden_pair):
    C1, C2 = golden_pair
    result = ps_case1(golden, C1, C2)
    assert result.delta == Fraction(1, 2)
    assert result.D.radius == 1
    assert result.D.same_set(CrossSection(golden, 1, frozenset(
        {("b", "b", "a"), ("b", "b", "b"), ("a'", "b", "a"), ("a'", "b", "b"), ("a", "a'", "a")})))
    assert result.D2.same_set(CrossSection(golden, 1, frozenset(
        {("b", "b", "a"), ("b", "b", "b"), ("a'", "b", "a"), ("a'", "b", "b"), ("a'", "a", "a'")})))
    assert result.D.height == 0 and result.D2.height == Fraction(1, 2)
    assert check_intertwining(result, 7).holds


def test_first_hit_on_same_height_disjoint_sets(two_cycle):
    C1 = CrossSection.of_symbols(two_cycle, ["a", "b"])
    C2 = CrossSection.of_symbols(two_cycle, ["c", "d"])
    result = ps_case1(two_cycle, C1, C2)
    assert result.delta == 0
    assert result.D.same_set(C1)
    assert result.D2.same_set(C2)


def test_first_hit_refusals(golden):
    C = CrossSection.of_symbols(golden, ["a", "b"])
    with pytest.raises(NotDisjoint):
        ps_case1(golden, C, C)
    with pytest.raises(InvalidSection):
        ps_case1(golden, CrossSection.of_symbols(golden, ["a"]), C.with_height("1/2"))


@seed(SEED)
@settings(max_examples=100, deadline=None)
@given(irreducible_matrices(max_entry=1), st.data())
def test_return_words_tile_every_orbit(A, data):
    X = EdgeShift.presented_by(A.to_graph())
    symbols = data.draw(st.sets(st.sampled_from(X.alphabet), min_size=1))
    C = CrossSection.of_symbols(X, sorted(symbols, key=X.index))
    verdict = validate(X, C)
    orbits = periodic_orbits(X, 5)
    misses = [o for o in orbits if not any(s in symbols for s in o.primitive_word)]
    if not verdict.valid:
        assert not any(s in symbols for s in verdict.witness.primitive_word)
        return
    assert not misses
    rs = return_system(C)
    for orbit in orbits:
        assert rs.unfold(rs.factor(orbit)) == orbit
        assert len(rs.factor(orbit)) == len(rs.anchors(orbit))


def test_first_hit_when_c1_points_hit_c2_first(golden):
    # 高度 0 的 {a, b} 与高度 1/2 的 {a', b}：x_0 = b 时 τ2 = 1/2，x_0 = a 时 τ2 = 3/2 < τ1 = 2
    C1 = CrossSection.of_symbols(golden, ["a", "b"])
    C2 = CrossSection.of_symbols(golden, ["a'", "b"], "1/2")
    result = ps_case1(golden, C1, C2)
    assert result.delta == Fraction(1, 2)
    assert result.D.same_set(C1)
    assert not result.D.same_set(CrossSection.of_symbols(golden, ["a"]))
    assert check_intertwining(result, 6).holds


def test_pullback_along_identity(full2):
    C = CrossSection(full2, 1, frozenset({("a", "b", "a"), ("b", "b", "b")}), Fraction(1, 3))
    back = pullback(SlidingBlockCode.identity(full2), C)
    assert (back.radius, back.centers, back.height) == (C.radius, C.centers, C.height)


def test_pullback_through_composition(paired, full2):
    phi = collapse_code(paired, full2)
    swap = SlidingBlockCode.from_symbol_map(full2, full2, {"a": "b", "b": "a"})
    C = CrossSection(full2, 1, frozenset({("a", "b", "a"), ("b", "b", "b"), ("a", "a", "b")}))
    assert pullback(phi.then(swap), C).same_set(pullback(phi, pullback(swap, C)))
    assert pullback(swap.then(swap), C).same_set(C)


def _longest_gap(C, orbits):
    gaps = [0]
    for orbit in orbits:
        w = orbit.primitive_word
        hits = [i for i in range(len(w)) if C.contains_at(w, i)]
        gaps.extend(b - a for a, b in zip(hits, hits[1:] + [hits[0] + len(w)]))
    return max(gaps)


@seed(SEED)
@settings(max_examples=100, deadline=None)
@given(irreducible_matrices(max_n=3, max_entry=1), st.integers(0, 1), st.data())
def test_max_return_matches_orbit_gaps(A, radius, data):
    X = EdgeShift.presented_by(A.to_graph())
    words = words_of_length(X, 2 * radius + 1)
    centers = data.draw(st.sets(st.sampled_from(words), min_size=1))
    C = CrossSection(X, radius, frozenset(centers))
    verdict = validate(X, C)
    orbits = periodic_orbits(X, 8)
    if not verdict.valid:
        assert not any(C.contains_at(verdict.witness.primitive_word, i)
                       for i in range(verdict.witness.least_period))
        return
    longest = _longest_gap(C, orbits)
    assert longest <= verdict.max_return
    # 长为 max_return 的返回段加上回到起点的路径可以闭成周期不超过 8 的轨道
    if verdict.max_return + 2 * radius + len(X.graph.vertices) <= 8:
        assert longest == verdict.max_return


@seed(SEED)
@settings(max_examples=40, deadline=None)
@given(irreducible_matrices(max_n=3, max_entry=1), st.data())
def test_first_hit_map_intertwines(A, data):
    X = EdgeShift.presented_by(A.to_graph())
    first = data.draw(st.sets(st.sampled_from(X.alphabet), min_size=1))
    second = data.draw(st.sets(st.sampled_from(X.alphabet), min_size=1))
    height = data.draw(st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)]))
    if not first & second and data.draw(st.booleans()):
        height = Fraction(0)
    C1 = CrossSection.of_symbols(X, sorted(first, key=X.index))
    C2 = CrossSection.of_symbols(X, sorted(second, key=X.index), height)
    if not (validate(X, C1).valid and validate(X, C2).valid):
        return
    result = ps_case1(X, C1, C2)
    verdict = check_intertwining(result, 6)
    assert verdict.holds, verdict.reason
    assert verdict.checked > 0
