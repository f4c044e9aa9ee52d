"""
flow_code 模块测试：字块码的构造、作用、截面条件、证书与开性
"""
from fractions import Fraction

import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from flowcalc.core.cross_section import CrossSection, ps_case1
from flowcalc.core.errors import (
    EmptyImageWord, MissingBlock, NonComposableImage, NotIrreducible, ResolutionMismatch, UnknownSymbol,
)
from flowcalc.core.fixtures import collapse_code
from flowcalc.core.flow_code import (
    apply_periodic, build_code, conjugacy_certificate, expansion_code, from_one_block, higher_block_code,
    identity_code, induced_code, openness_check, return_time_profile, verify_isotopy_certificate,
    verify_section_condition,
)
from flowcalc.core.livsic import LocalFunction
from flowcalc.core.moves import symbol_expansion
from flowcalc.core.sft import EdgeShift, PeriodicOrbit, periodic_orbits

from .strategies import SEED, irreducible_matrices


@pytest.fixture
def collapse(paired, full2, paired_anchors):
    return from_one_block(paired_anchors, collapse_code(paired, full2))


@pytest.fixture
def expansion(full2):
    _, record = symbol_expansion(full2, "a")
    return expansion_code(record)


def test_build_code_from_table(paired_anchors, full2):
    code = build_code(paired_anchors, 0, {("[a1a2]",): ("a", "a"), ("[b]",): ("b",)}, full2)
    assert code.M == 0
    assert code.ratio(("[a1a2]",)) == 1
    assert dict(code.time_change().ratios) == {("[a1a2]",): 1, ("[b]",): 1}


def test_build_code_errors(paired_anchors, full2, golden):
    with pytest.raises(MissingBlock):
        build_code(paired_anchors, 0, {("[b]",): ("b",)}, full2)
    with pytest.raises(EmptyImageWord):
        build_code(paired_anchors, 0, {("[a1a2]",): (), ("[b]",): ("b",)}, full2)
    with pytest.raises(UnknownSymbol):
        build_code(paired_anchors, 0, {("[a1a2]",): ("z",), ("[b]",): ("b",)}, full2)
    with pytest.raises(NonComposableImage):
        build_code(paired_anchors, 0, {("[a1a2]",): ("a", "a"), ("[b]",): ("b",)}, golden)
    with pytest.raises(NonComposableImage):
        build_code(paired_anchors, 0, {("[a1a2]",): ("a",), ("[b]",): ("a",)}, golden)


def test_apply_to_periodic_orbit(collapse):
    image = apply_periodic(collapse, PeriodicOrbit(("a1", "a2", "b")))
    assert image.orbit == PeriodicOrbit(("a", "a", "b"))
    assert image.anchors == (0, 2)
    assert (image.domain_length, image.image_length, image.hits) == (3, 3, 2)


def test_expansion_code_lengthens_orbits(expansion):
    image = apply_periodic(expansion, PeriodicOrbit(("a", "b")))
    assert str(image.orbit) == "(a a' b)"
    assert (image.domain_length, image.image_length, image.hits) == (2, 3, 2)


def test_higher_block_code(full2):
    code = higher_block_code(full2, 2)
    assert code.M == 1
    image = apply_periodic(code, PeriodicOrbit(("a", "b")))
    assert image.orbit == PeriodicOrbit(("ab", "ba"))


def test_section_condition(expansion):
    golden = expansion.target
    holds = verify_section_condition(expansion, expansion.section, CrossSection.of_symbols(golden, ["a", "b"]), 6)
    assert holds.holds
    fails = verify_section_condition(expansion, expansion.section, CrossSection.full(golden), 6)
    assert not fails.holds
    assert fails.witness == PeriodicOrbit(("a",))
    assert fails.position == 1


def test_identity_code_is_certified(golden):
    verdict = conjugacy_certificate(identity_code(CrossSection.of_symbols(golden, ["a", "b"])))
    assert verdict.certified
    assert verdict.potential is not None


def test_expansion_certificate_is_refused(expansion):
    verdict = conjugacy_certificate(expansion)
    assert not verdict.certified
    assert verdict.witness == PeriodicOrbit(("a",))
    assert verdict.total == 1


def test_certificate_needs_irreducible_shift():
    X = EdgeShift.from_matrix([[1, 2], [0, 1]])
    with pytest.raises(NotIrreducible):
        conjugacy_certificate(identity_code(CrossSection.full(X)))


def test_isotopy_certificate(full2):
    code = identity_code(CrossSection.full(full2))
    D = CrossSection.full(full2)
    assert verify_isotopy_certificate(LocalFunction.zero(full2), code, code.section, D).valid
    verdict = verify_isotopy_certificate(LocalFunction.from_symbol_values({"a": 1, "b": 0}), code, code.section, D)
    assert not verdict.valid
    assert verdict.witness == (("a",), ("b",))
    assert (verdict.lhs, verdict.rhs) == (Fraction(-1), Fraction(0))


def test_isotopy_certificate_needs_values_on_every_window(full2):
    code = identity_code(CrossSection.full(full2))
    with pytest.raises(ResolutionMismatch):
        verify_isotopy_certificate(LocalFunction(0, {("a",): 0}), code, code.section, CrossSection.full(full2))


def test_expansion_image_is_open(expansion):
    verdict = openness_check(expansion, 2, 6)
    assert verdict.open
    assert verdict.radius == 0


@pytest.mark.parametrize("k_max, P", [(2, 10), (3, 12)])
def test_collapsed_section_is_not_open(collapse, k_max, P):
    verdict = openness_check(collapse, k_max, P)
    assert not verdict.open
    assert [w.k for w in verdict.witnesses] == list(range(k_max + 1))
    for w in verdict.witnesses:
        assert w.window == ("a",) * (2 * w.k + 1)
        assert w.member.orbit == PeriodicOrbit(("a",))
        assert w.non_member.orbit == PeriodicOrbit(("a",) * (2 * w.k + 2) + ("b",))


def test_return_time_is_not_locally_constant(collapse):
    profile = return_time_profile(collapse, 0, 8)
    assert set(profile.times[("a",)]) >= {1, 2}
    assert ("a",) in profile.discontinuous


def test_induced_code_of_first_hit_map(golden, golden_pair):
    C1, C2 = golden_pair
    code = induced_code(ps_case1(golden, C1, C2).psi)
    assert apply_periodic(code, PeriodicOrbit(("b",))).orbit == PeriodicOrbit(("b",))
    image = apply_periodic(code, PeriodicOrbit(("a", "a'")))
    assert image.orbit == PeriodicOrbit(("a", "a'"))


@seed(SEED)
@settings(max_examples=50, deadline=None)
@given(irreducible_matrices(max_n=3, max_entry=1), st.sampled_from([2, 3]))
def test_higher_block_code_is_certified(A, m):
    X = EdgeShift.presented_by(A.to_graph())
    code = higher_block_code(X, m)
    assert conjugacy_certificate(code).certified
    for orbit in periodic_orbits(X, 8):
        image = apply_periodic(code, orbit)
        assert image.image_length == image.domain_length == image.orbit.least_period
