"""
上同调模块
图上的势函数构造（边权沿每个圈求和为零 ⇔ 边权是顶点势的差）与 SFT 上局部常值函数的上边缘求解
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
from tqdm import tqdm

from .config import Config
from .errors import CycleObstruction, IncompleteTable, NotIrreducible
from .logger import logger
from .sft import (
    DirectedGraph, EdgeShift, PeriodicOrbit, Word, cyclic_window, format_word, higher_block,
    is_irreducible, periodic_orbits, primitive_root, words_of_length,
)


# ============================================================ 数据类型

@dataclass(frozen=True, eq=False)
class EdgePotential:
    """边上的有理数权，按边标号索引"""
    graph: DirectedGraph
    weights: Mapping[str, Fraction]

    def __post_init__(self):
        missing = [e.label for e in self.graph.edges if e.label not in self.weights]
        if missing:
            raise IncompleteTable(f"no weight for edges {missing}")

    def __getitem__(self, label: str) -> Fraction:
        return Fraction(self.weights[label])

    def cycle_sum(self, word: Sequence[str]) -> Fraction:
        return sum((self[s] for s in word), Fraction(0))


@dataclass(frozen=True, eq=False)
class VertexPotential:
    """顶点势 h，基点取值为 0"""
    graph: DirectedGraph
    values: Mapping[str, Fraction]
    base: str

    def __getitem__(self, v: str) -> Fraction:
        return self.values[v]

    def check(self, f: EdgePotential) -> Optional[str]:
        """返回第一条不满足 f(e) = h(τe) - h(ιe) 的边，全部满足时返回 None"""
        for e in self.graph.edges:
            if f[e.label] != self.values[e.target] - self.values[e.source]:
                return e.label
        return None


@dataclass(frozen=True)
class CycleVerdict:
    """zero_on_cycles 的结论；不为零时给出一个本原闭路及其和"""
    zero: bool
    witness: Optional[Word] = None
    total: Fraction = Fraction(0)


@dataclass(frozen=True, eq=False)
class LocalFunction:
    """
    局部常值函数：f(x) 由窗口 x[-r, r] 决定

    table 的键是长为 2r+1 的字，值是有理数
    """
    radius: int
    table: Mapping[Word, Fraction] = field(default_factory=dict)

    @classmethod
    def from_symbol_values(cls, values: Mapping[str, object]) -> "LocalFunction":
        return cls(0, {(s,): Fraction(v) for s, v in values.items()})

    @classmethod
    def zero(cls, X: EdgeShift, radius: int = 0) -> "LocalFunction":
        return cls(radius, {w: Fraction(0) for w in words_of_length(X, 2 * radius + 1)})

    def check_total(self, X: EdgeShift) -> None:
        for w in words_of_length(X, 2 * self.radius + 1):
            if w not in self.table:
                raise IncompleteTable(f"no value for window {format_word(w)}")

    def value_at(self, word: Sequence[str], i: int) -> Fraction:
        """循环字在位置 i 处的取值"""
        window = cyclic_window(word, i - self.radius, 2 * self.radius + 1)
        try:
            return Fraction(self.table[window])
        except KeyError:
            raise IncompleteTable(f"no value for window {format_word(window)}") from None

    def orbit_sum(self, orbit: PeriodicOrbit) -> Fraction:
        w = orbit.primitive_word
        return sum((self.value_at(w, i) for i in range(len(w))), Fraction(0))


# ============================================================ 图上的势

def _bfs_potential(g: DirectedGraph, f: EdgePotential, sub: nx.MultiDiGraph,
                   root: str) -> Tuple[Dict[str, Fraction], Dict[str, str]]:
    """在分量子图上从 root 出发的广度优先生成树：h(τ) = h(ι) + f(e)，返回 (h, 树边)"""
    h = {root: Fraction(0)}
    parent: Dict[str, str] = {}
    for u, v in nx.bfs_edges(sub, root):
        # 平行边取声明顺序靠前者
        label = next(e.label for e in g.out_of(u) if e.target == v)
        h[v] = h[u] + f[label]
        parent[v] = label
    return h, parent


def _tree_path(g: DirectedGraph, parent: Mapping[str, str], root: str, v: str) -> Word:
    path: List[str] = []
    while v != root:
        label = parent[v]
        path.append(label)
        v = g.edge(label).source
    return tuple(reversed(path))


def _shortest_path(g: DirectedGraph, sub: nx.MultiDiGraph, u: str, v: str) -> Word:
    """u 到 v 的最短边路径（平行边取声明顺序靠前者）"""
    if u == v:
        return ()
    vertices = nx.shortest_path(sub, u, v)
    return tuple(next(e.label for e in g.out_of(a) if e.target == b)
                 for a, b in zip(vertices, vertices[1:]))


def _canonical(g: DirectedGraph, word: Word) -> Word:
    root = primitive_root(word)
    return min((root[i:] + root[:i] for i in range(len(root))), key=lambda w: tuple(g.index(s) for s in w))


def _witness(g: DirectedGraph, f: EdgePotential, sub: nx.MultiDiGraph, root: str,
             h: Mapping[str, Fraction], parent: Mapping[str, str], label: str) -> Tuple[Word, Fraction]:
    e = g.edge(label)
    if e.source == e.target:
        return (label,), f[label]
    back = _shortest_path(g, sub, e.target, e.source)
    candidates = [(label,) + back]
    # 后两条闭路的和之差等于 e 的偏差
    home = _shortest_path(g, sub, e.target, root)
    candidates.append(_tree_path(g, parent, root, e.source) + (label,) + home)
    candidates.append(_tree_path(g, parent, root, e.target) + home)
    for walk in candidates:
        if walk and f.cycle_sum(walk) != 0:
            witness = _canonical(g, walk)
            return witness, f.cycle_sum(witness)
    raise AssertionError(f"edge {label} is inconsistent but no cycle witnesses it")


def zero_on_cycles(f: EdgePotential) -> CycleVerdict:
    """
    判断边权是否沿每个圈求和为零

    在每个强连通分量上从声明顺序最靠前的顶点做广度优先生成树，
    再逐条检查非树边；第一条不一致的边给出见证闭路。
    分量之间的边不在任何圈上，不参与判断。
    """
    g = f.graph
    nxg = g.to_networkx()
    components = sorted(nx.strongly_connected_components(nxg), key=lambda c: min(g.vertices.index(v) for v in c))
    for comp in components:
        members = frozenset(comp)
        root = next(v for v in g.vertices if v in members)
        sub = nxg.subgraph(members)
        h, parent = _bfs_potential(g, f, sub, root)
        for e in g.edges:
            if e.source not in members or e.target not in members:
                continue
            if f[e.label] != h[e.target] - h[e.source]:
                witness, total = _witness(g, f, sub, root, h, parent, e.label)
                logger.debug(f"圈 ({format_word(witness)}) 的和为 {total}")
                return CycleVerdict(False, witness, total)
    return CycleVerdict(True)


def graph_potential(f: EdgePotential) -> VertexPotential:
    """
    构造顶点势 h，使 f(e) = h(τ(e)) - h(ι(e))，h(v0) = 0

    Raises:
        NotIrreducible: 图不是强连通的
        CycleObstruction: 有圈的权和不为零
    """
    g = f.graph
    if not is_irreducible(g):
        raise NotIrreducible("graph potential needs an irreducible graph")
    verdict = zero_on_cycles(f)
    if not verdict.zero:
        raise CycleObstruction(PeriodicOrbit(verdict.witness), verdict.total)
    root = g.vertices[0]
    values, _ = _bfs_potential(g, f, g.to_networkx(), root)
    potential = VertexPotential(g, values, root)
    bad = potential.check(f)
    if bad is not None:
        raise AssertionError(f"potential fails on edge {bad}")
    return potential


# ============================================================ SFT 上的上边缘

def coboundary(X: EdgeShift, f: LocalFunction) -> LocalFunction:
    """
    求局部常值的 b，使 f = b∘σ - b

    在 (2r+1) 块表示上 f 只依赖一条边，解出图上的势 h 后令 b(x) = h(ι(x_0 所在的块边))，
    b 的半径与 f 相同。

    Args:
        X: 不可约边移位
        f: 半径 r 的局部常值函数

    Returns:
        b，半径 r 的局部常值函数

    Raises:
        NotIrreducible: X 可约
        CycleObstruction: 某条周期轨道上 f 的和不为零（见证为 X 的轨道）
    """
    f.check_total(X)
    if not is_irreducible(X):
        raise NotIrreducible("coboundary equation needs an irreducible shift")
    r = f.radius
    block, rec = higher_block(X, 2 * r + 1)
    weights = EdgePotential(block.graph, {label: Fraction(f.table[w]) for label, w in rec.window_of.items()})

    verdict = zero_on_cycles(weights)
    if not verdict.zero:
        orbit = rec.decode_orbit(PeriodicOrbit.of_cycle(block, verdict.witness))
        total = f.orbit_sum(orbit)
        logger.info(f"上边缘方程无解: 轨道 {orbit} 上的和为 {total}")
        raise CycleObstruction(orbit, total)

    h = graph_potential(weights)
    b = LocalFunction(r, {w: h[block.edge(label).source] for w, label in rec.label_of.items()})

    for w in words_of_length(X, 2 * r + 2):
        if f.table[w[:-1]] != b.table[w[1:]] - b.table[w[:-1]]:
            raise AssertionError(f"f = b∘σ - b fails on {format_word(w)}")
    orbits = periodic_orbits(X, Config.VERIFY_PERIOD)
    for orbit in tqdm(orbits, desc="verify coboundary", disable=not Config.SHOW_PROGRESS):
        w = orbit.primitive_word
        for i in range(len(w)):
            if f.value_at(w, i) != b.value_at(w, i + 1) - b.value_at(w, i):
                raise AssertionError(f"f = b∘σ - b fails on orbit {orbit} at {i}")
    logger.info(f"上边缘方程已解: 半径 {r}, {len(b.table)} 个窗口, 已在 {len(orbits)} 条轨道上复核")
    return b
