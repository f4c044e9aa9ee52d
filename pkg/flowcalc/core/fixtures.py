"""
工作示例用到的移位与截面
"""
from typing import Sequence

from .cross_section import CrossSection
from .sft import DirectedGraph, Edge, EdgeShift, IntMatrix, SlidingBlockCode


def _shift(vertices: Sequence[str], edges: Sequence[Sequence[str]]) -> EdgeShift:
    return EdgeShift(DirectedGraph(tuple(vertices), tuple(Edge(e[0], e[1], e[2], e[0]) for e in edges)))


def full_shift(symbols: Sequence[str] = ("a", "b")) -> EdgeShift:
    """单顶点、每个符号一个自环"""
    return _shift(["v0"], [(s, "v0", "v0") for s in symbols])


def golden_mean() -> EdgeShift:
    """a: u→v, a': v→u, b: u→u，即全 2 移位对 a 做符号扩张的结果"""
    return _shift(["u", "v"], [("a", "u", "v"), ("a'", "v", "u"), ("b", "u", "u")])


def paired_golden() -> EdgeShift:
    """((a1 a2)* b*)*：a1: u→w, a2: w→u, b: u→u"""
    return _shift(["u", "w"], [("a1", "u", "w"), ("a2", "w", "u"), ("b", "u", "u")])


def bipartite() -> EdgeShift:
    """[[0,2],[2,0]]，没有不动点"""
    return EdgeShift.from_matrix([[0, 2], [2, 0]])


def reducible_matrix() -> IntMatrix:
    """[[1,2],[0,1]]：两个不可约分量之间有单向的边"""
    return IntMatrix(((1, 2), (0, 1)))


def paired_section(X: EdgeShift) -> CrossSection:
    """{x : x_0 ∈ {a1, b}}"""
    return CrossSection.of_symbols(X, ["a1", "b"])


def collapse_code(X: EdgeShift, Y: EdgeShift) -> SlidingBlockCode:
    """a1, a2 ↦ a，b ↦ b"""
    return SlidingBlockCode.from_symbol_map(X, Y, {"a1": "a", "a2": "a", "b": "b"})
