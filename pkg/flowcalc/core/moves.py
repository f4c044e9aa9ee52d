"""
基本变换模块
符号扩张与出分裂（以及借助转置得到的入分裂），每个变换同时返回新移位和实现它的编码数据
"""
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

from .errors import BadPartition
from .logger import logger
from .sft import (
    DirectedGraph, Edge, EdgeShift, PeriodicOrbit, SlidingBlockCode, Word, _Namer,
    transpose, words_of_length,
)


def fresh_symbol(X: EdgeShift, s: str) -> str:
    """s 加撇号，必要时再加计数，保证不在字母表里"""
    taken = set(X.alphabet) | {e.id for e in X.graph.edges}
    candidate = f"{s}'"
    k = 2
    while candidate in taken:
        candidate = f"{s}'{k}"
        k += 1
    return candidate


@dataclass(frozen=True, eq=False)
class ExpansionRecord:
    """符号扩张的编码记录：s ↦ s s'，其余符号照抄"""
    symbol: str
    fresh_symbol: str
    source: EdgeShift = field(repr=False)
    target: EdgeShift = field(repr=False)
    kind: str = "symbol-expansion"

    def word_map(self, s: str) -> Word:
        return (s, self.fresh_symbol) if s == self.symbol else (s,)

    def image_word(self, word: Sequence[str]) -> Word:
        return tuple(t for s in word for t in self.word_map(s))

    def image_orbit(self, orbit: PeriodicOrbit) -> PeriodicOrbit:
        return PeriodicOrbit.of_cycle(self.target, self.image_word(orbit.primitive_word))

    def as_dict(self) -> Dict[str, str]:
        return {"kind": self.kind, "symbol": self.symbol, "fresh_symbol": self.fresh_symbol}


def symbol_expansion(X: EdgeShift, s: str) -> Tuple[EdgeShift, ExpansionRecord]:
    """
    符号扩张：把边 s (u→v) 换成 s: u→w 与 s': w→v，w 为新顶点

    Args:
        X: 边移位
        s: 要扩张的符号

    Returns:
        (X', 扩张记录)

    Raises:
        UnknownSymbol: s 不在字母表中
    """
    e = X.edge(s)
    s_new = fresh_symbol(X, s)
    w = _Namer(X.graph.vertices)(f"{e.source}.{s}")

    edges: List[Edge] = []
    for f in X.graph.edges:
        if f.label == s:
            edges.append(Edge(f.id, f.source, w, f.label))
            edges.append(Edge(s_new, w, f.target, s_new))
        else:
            edges.append(f)
    Xp = EdgeShift(DirectedGraph(X.graph.vertices + (w,), tuple(edges)))
    logger.info(f"符号扩张 {s} ↦ {s} {s_new}: {len(Xp.graph.vertices)} 个顶点, {len(edges)} 条边")
    return Xp, ExpansionRecord(s, s_new, X, Xp)


@dataclass(frozen=True, eq=False)
class SplitConjugacy:
    """
    分裂变换的共轭编码

    encode: X → X'，指向被分裂顶点的边按下一条边所在的类选择副本（2 块码）；
    decode: X' → X，副本映回原边（1 块码）。
    入分裂时在转置图上做同样的事，字要反向读。
    """
    source: EdgeShift
    target: EdgeShift
    vertex: str
    class_of: Mapping[str, int]
    copy_of: Mapping[Tuple[str, int], str]
    to_original: Mapping[str, str]
    reverse: bool = False

    def _encode(self, word: Word) -> Word:
        out = []
        for i, s in enumerate(word):
            nxt = word[(i + 1) % len(word)]
            j = self.class_of.get(nxt)
            if j is not None and (s, j) in self.copy_of:
                out.append(self.copy_of[(s, j)])
            else:
                out.append(s)
        return tuple(out)

    def encode_cyclic(self, word: Sequence[str]) -> Word:
        word = tuple(word)
        if self.reverse:
            return self._encode(word[::-1])[::-1]
        return self._encode(word)

    def encode_orbit(self, orbit: PeriodicOrbit) -> PeriodicOrbit:
        return PeriodicOrbit.of_cycle(self.target, self.encode_cyclic(orbit.primitive_word))

    def decode_orbit(self, orbit: PeriodicOrbit) -> PeriodicOrbit:
        return PeriodicOrbit.of_cycle(self.source, [self.to_original[s] for s in orbit.primitive_word])

    def decoding_code(self) -> SlidingBlockCode:
        return SlidingBlockCode.from_symbol_map(self.target, self.source, self.to_original)

    def encoding_code(self) -> SlidingBlockCode:
        """半径 1 的滑动块码 X → X'"""
        table = {w: self.encode_cyclic(w)[1] for w in words_of_length(self.source, 3)}
        return SlidingBlockCode(self.source, self.target, 1, table)


def _check_partition(g: DirectedGraph, v: str, partition: Sequence[Sequence[str]],
                     incoming: bool = False) -> Dict[str, int]:
    if v not in g.vertices:
        raise BadPartition(f"unknown vertex {v!r}")
    expected = {e.label for e in (g.into(v) if incoming else g.out_of(v))}
    class_of: Dict[str, int] = {}
    for j, cls in enumerate(partition, start=1):
        if not cls:
            raise BadPartition(f"class {j} is empty")
        for label in cls:
            if label not in expected:
                raise BadPartition(f"{label!r} is not an edge at vertex {v!r}")
            if label in class_of:
                raise BadPartition(f"{label!r} appears in two classes")
            class_of[label] = j
    missing = expected - set(class_of)
    if missing:
        raise BadPartition(f"edges {sorted(missing)} are not covered")
    return class_of


def _out_split_graph(g: DirectedGraph, v: str, partition: Sequence[Sequence[str]]):
    class_of = _check_partition(g, v, partition)
    k = len(partition)
    namer = _Namer(u for u in g.vertices if u != v)
    split = {j: namer(f"{v}.{j}") for j in range(1, k + 1)}
    vertices: List[str] = []
    for u in g.vertices:
        vertices.extend(split.values() if u == v else [u])

    labels = _Namer(e.label for e in g.edges)
    ids = _Namer(e.id for e in g.edges)
    copy_of: Dict[Tuple[str, int], str] = {}
    to_original: Dict[str, str] = {}
    edges: List[Edge] = []
    for e in g.edges:
        source = split[class_of[e.label]] if e.source == v else e.source
        if e.target == v:
            for j in range(1, k + 1):
                label = labels(f"{e.label}_{j}")
                edges.append(Edge(ids(f"{e.id}_{j}"), source, split[j], label))
                copy_of[(e.label, j)] = label
                to_original[label] = e.label
        else:
            edges.append(Edge(e.id, source, e.target, e.label))
            to_original[e.label] = e.label
    return DirectedGraph(tuple(vertices), tuple(edges)), class_of, copy_of, to_original


def out_split(X: EdgeShift, v: str, partition: Sequence[Sequence[str]]) -> Tuple[EdgeShift, SplitConjugacy]:
    """
    出分裂：把顶点 v 的出边分成若干非空类，v 随之分成同样多个顶点

    Raises:
        BadPartition: 划分不是非空、互不相交且覆盖 v 的全部出边
    """
    if len(partition) == 1:
        class_of = _check_partition(X.graph, v, partition)
        ident = {s: s for s in X.alphabet}
        return X, SplitConjugacy(X, X, v, class_of, {}, ident)
    g, class_of, copy_of, to_original = _out_split_graph(X.graph, v, partition)
    Xp = EdgeShift(g)
    logger.info(f"出分裂 {v}: {len(partition)} 类, {len(g.edges)} 条边")
    return Xp, SplitConjugacy(X, Xp, v, class_of, copy_of, to_original)


def in_split(X: EdgeShift, v: str, partition: Sequence[Sequence[str]]) -> Tuple[EdgeShift, SplitConjugacy]:
    """入分裂 = 转置 ∘ 出分裂 ∘ 转置"""
    _check_partition(X.graph, v, partition, incoming=True)
    XT = EdgeShift(transpose(X.graph))
    YT, conj = out_split(XT, v, partition)
    Y = EdgeShift(transpose(YT.graph))
    return Y, SplitConjugacy(X, Y, v, conj.class_of, conj.copy_of, conj.to_original, reverse=True)
