"""
工作示例流水线
每个示例串起若干模块，把观察值和预期值逐项对比
"""
from typing import Callable, Dict, List

import networkx as nx

from .config import Config
from .cross_section import CrossSection, return_system, validate
from .errors import NotIrreducible
from .fixtures import (
    collapse_code, full_shift, golden_mean, paired_golden, paired_section, reducible_matrix,
)
from .flow_code import (
    conjugacy_certificate, expansion_code, from_one_block, openness_check, verify_section_condition,
)
from .invariants import franks_equivalent
from .livsic import EdgePotential, graph_potential, zero_on_cycles
from .logger import logger
from .moves import symbol_expansion
from .reports import CheckReport, ExampleReport
from .sft import EdgeShift, IntMatrix, PeriodicOrbit, format_word, is_irreducible, trim_essential


def _check(name: str, expected, observed) -> CheckReport:
    return CheckReport(name=name, expected=str(expected), observed=str(observed), passed=expected == observed)


def _report(name: str, checks: List[CheckReport]) -> ExampleReport:
    report = ExampleReport(name=name, passed=all(c.passed for c in checks), checks=checks)
    for c in checks:
        logger.info(f"{'✓' if c.passed else '✗'} {name}/{c.name}: {c.observed}")
    return report


def same_labelled_graph(X: EdgeShift, Y: EdgeShift) -> bool:
    """存在保持边标号的图同构"""
    return nx.is_isomorphic(X.graph.to_networkx(), Y.graph.to_networkx(),
                            edge_match=lambda e1, e2: set(e1) == set(e2))


def symbol_expansion_example() -> ExampleReport:
    """全 2 移位对 a 扩张得到黄金分割移位：流等价，但圆周长度不守恒"""
    X = full_shift()
    Xp, record = symbol_expansion(X, "a")
    code = expansion_code(record)
    certificate = conjugacy_certificate(code)
    anchors = CrossSection.of_symbols(Xp, ["a", "b"])
    condition = verify_section_condition(code, code.section, anchors, Config.CHECK_PERIOD)
    openness = openness_check(code, 2, Config.CHECK_PERIOD)

    checks = [
        _check("expansion graph is the golden mean graph", True, same_labelled_graph(Xp, golden_mean())),
        _check("fresh symbol", "a'", record.fresh_symbol),
        _check("decide-fe", "equivalent", franks_equivalent(X.matrix, Xp.matrix).verdict),
        _check("certificate", "refused", "certified" if certificate.certified else "refused"),
        _check("certificate witness", "(a)", str(certificate.witness)),
        _check("certificate witness sum", "1", str(certificate.total)),
        _check("section condition for {a, b}", True, condition.holds),
        _check("image of the section is open", 0, openness.radius),
    ]
    return _report("symbol-expansion", checks)


def non_open_image_example(k_max: int = 3, P: int = 12) -> ExampleReport:
    """a1, a2 ↦ a 把截面 {a1, b} 映成一个不是开集的集合"""
    X = paired_golden()
    Y = full_shift()
    C = paired_section(X)
    code = from_one_block(C, collapse_code(X, Y))
    verdict = openness_check(code, k_max, P)
    section = validate(X, C)
    rs = return_system(C)

    checks = [
        _check("section is valid", True, section.valid),
        _check("max return time", 2, section.max_return),
        _check("return words", "a1 a2 | b", " | ".join(format_word(w) for w in sorted(rs.return_words))),
        _check("first-return graph is the full 2-shift", IntMatrix(((2,),)), rs.graph.matrix),
        _check("image of the section is open", False, verdict.open),
        _check("witnesses", k_max + 1, len(verdict.witnesses)),
    ]
    for w in verdict.witnesses:
        checks += [
            _check(f"k={w.k} window", format_word(("a",) * (2 * w.k + 1)), format_word(w.window)),
            _check(f"k={w.k} member", str(PeriodicOrbit(("a",))), str(w.member.orbit)),
            _check(f"k={w.k} non-member", str(PeriodicOrbit(("a",) * (2 * w.k + 2) + ("b",))),
                   str(w.non_member.orbit)),
        ]
    return _report("non-open-image", checks)


def reducible_guard_example() -> ExampleReport:
    """可约矩阵上拒绝给出结论"""
    A = reducible_matrix()

    def refused(step: Callable[[], object]) -> str:
        try:
            step()
        except NotIrreducible:
            return "NotIrreducible"
        return "answered"

    g = trim_essential(A.to_graph())
    zero = EdgePotential(g, {e.label: 0 for e in g.edges})
    checks = [
        _check("irreducible", False, is_irreducible(g)),
        _check("decide-fe refuses", "NotIrreducible", refused(lambda: franks_equivalent(A, IntMatrix(((2,),))))),
        _check("graph potential refuses", "NotIrreducible", refused(lambda: graph_potential(zero))),
        _check("cycle sums per component", True, zero_on_cycles(zero).zero),
    ]
    return _report("reducible-guard", checks)


EXAMPLES: Dict[str, Callable[..., ExampleReport]] = {
    "symbol-expansion": symbol_expansion_example,
    "non-open-image": non_open_image_example,
    "reducible-guard": reducible_guard_example,
}

# 命令行也接受的别名
EXAMPLE_ALIASES: Dict[str, str] = {
    "expansion-5.6": "symbol-expansion",
    "not-open-5.9": "non-open-image",
    "reducible-3.4": "reducible-guard",
}


def example_named(name: str) -> str:
    """别名 → 规范名"""
    return EXAMPLE_ALIASES.get(name, name)
