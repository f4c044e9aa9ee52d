"""
有限型子移位基础模块
有向图、邻接矩阵、字、周期轨道与滑动块重编码，是其它模块共享的底层
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import sympy

from .config import Config
from .errors import EmptyShift, FlowCalcInputError, NotEssential, PartialCode, UnknownSymbol
from .logger import logger

Word = Tuple[str, ...]


def format_word(word: Sequence[str]) -> str:
    """字的文本形式（符号之间空格分隔，与文件格式一致）"""
    return " ".join(word)


def block_label(word: Sequence[str]) -> str:
    """把一个字当作新字母表里的一个符号"""
    return "".join(word)


class _Namer:
    """生成互不相同的名字：冲突时追加 #k"""

    def __init__(self, taken: Iterable[str] = ()):
        self.taken = set(taken)

    def __call__(self, base: str) -> str:
        name = base
        k = 2
        while name in self.taken:
            name = f"{base}#{k}"
            k += 1
        self.taken.add(name)
        return name


def _generated_label(i: int) -> str:
    return chr(ord("a") + i) if i < 26 else f"e{i}"


# ============================================================ 图与矩阵

@dataclass(frozen=True)
class Edge:
    """一条带标号的边，标号即边移位的字母"""
    id: str
    source: str
    target: str
    label: str


@dataclass(frozen=True)
class DirectedGraph:
    """有序顶点集与有序边集；边标号两两不同"""
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise FlowCalcInputError("duplicate vertex id")
        declared = set(self.vertices)
        ids, labels = set(), set()
        for e in self.edges:
            if e.source not in declared or e.target not in declared:
                raise FlowCalcInputError(f"edge {e.id} uses an undeclared vertex")
            if e.id in ids:
                raise FlowCalcInputError(f"duplicate edge id {e.id}")
            if e.label in labels:
                raise FlowCalcInputError(f"duplicate edge label {e.label}")
            ids.add(e.id)
            labels.add(e.label)

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(e.label for e in self.edges)

    @cached_property
    def _by_label(self) -> Dict[str, Edge]:
        return {e.label: e for e in self.edges}

    @cached_property
    def _order(self) -> Dict[str, int]:
        return {e.label: i for i, e in enumerate(self.edges)}

    @cached_property
    def _out(self) -> Dict[str, Tuple[Edge, ...]]:
        out: Dict[str, List[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.source].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def _in(self) -> Dict[str, Tuple[Edge, ...]]:
        into: Dict[str, List[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            into[e.target].append(e)
        return {v: tuple(es) for v, es in into.items()}

    def edge(self, label: str) -> Edge:
        try:
            return self._by_label[label]
        except KeyError:
            raise UnknownSymbol(f"unknown symbol {label!r}") from None

    def edge_by_id(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise UnknownSymbol(f"unknown edge id {edge_id!r}")

    def index(self, label: str) -> int:
        """边在声明顺序中的位置（字典序比较用）"""
        try:
            return self._order[label]
        except KeyError:
            raise UnknownSymbol(f"unknown symbol {label!r}") from None

    def out_of(self, v: str) -> Tuple[Edge, ...]:
        return self._out[v]

    def into(self, v: str) -> Tuple[Edge, ...]:
        return self._in[v]

    def is_path(self, word: Sequence[str]) -> bool:
        """字是否是可拼接的边路径"""
        try:
            edges = [self.edge(s) for s in word]
        except UnknownSymbol:
            return False
        return all(a.target == b.source for a, b in zip(edges, edges[1:]))

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.vertices)
        for e in self.edges:
            g.add_edge(e.source, e.target, key=e.label)
        return g

    def adjacency_matrix(self) -> "IntMatrix":
        pos = {v: i for i, v in enumerate(self.vertices)}
        rows = [[0] * len(self.vertices) for _ in self.vertices]
        for e in self.edges:
            rows[pos[e.source]][pos[e.target]] += 1
        return IntMatrix(tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class IntMatrix:
    """非负整数方阵，A[u][v] 为 u→v 的边数"""
    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if any(len(r) != len(rows) for r in rows):
            raise FlowCalcInputError("matrix must be square")
        if any(x < 0 for r in rows for x in r):
            raise FlowCalcInputError("matrix entries must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.rows)

    def to_sympy(self) -> sympy.Matrix:
        return sympy.Matrix(self.n, self.n, [x for r in self.rows for x in r])

    def trace_power(self, k: int) -> int:
        """tr(A^k)，精确整数"""
        if self.n == 0:
            return 0
        return int((self.to_sympy() ** k).trace())

    def permuted(self, perm: Sequence[int]) -> "IntMatrix":
        """同时置换行和列"""
        return IntMatrix(tuple(tuple(self.rows[perm[i]][perm[j]] for j in range(self.n))
                               for i in range(self.n)))

    def to_graph(self) -> DirectedGraph:
        """按行优先顺序把每个计数展开成带标号的边"""
        vertices = tuple(f"v{i}" for i in range(self.n))
        edges = []
        for i, row in enumerate(self.rows):
            for j, count in enumerate(row):
                for _ in range(count):
                    label = _generated_label(len(edges))
                    edges.append(Edge(label, vertices[i], vertices[j], label))
        return DirectedGraph(vertices, tuple(edges))


def transpose(g: DirectedGraph) -> DirectedGraph:
    """所有边反向"""
    return DirectedGraph(g.vertices, tuple(Edge(e.id, e.target, e.source, e.label) for e in g.edges))


def trim_essential(g: DirectedGraph) -> DirectedGraph:
    """
    本质化：反复删除入度或出度为 0 的顶点

    Returns:
        最大的本质子图（幂等）

    Raises:
        EmptyShift: 结果中没有边
    """
    keep = set(g.vertices)
    edges = list(g.edges)
    while True:
        live = [e for e in edges if e.source in keep and e.target in keep]
        sources = {e.source for e in live}
        targets = {e.target for e in live}
        trimmed = {v for v in keep if v in sources and v in targets}
        edges = live
        if trimmed == keep:
            break
        keep = trimmed
    if not edges:
        raise EmptyShift("no bi-infinite path survives trimming")
    return DirectedGraph(tuple(v for v in g.vertices if v in keep), tuple(edges))


def is_essential(g: DirectedGraph) -> bool:
    return all(g.out_of(v) and g.into(v) for v in g.vertices)


def is_irreducible(g: Union[DirectedGraph, "EdgeShift"]) -> bool:
    """强连通即不可约"""
    graph = g.graph if isinstance(g, EdgeShift) else g
    if not graph.vertices:
        return False
    return nx.is_strongly_connected(graph.to_networkx())


# ============================================================ 边移位

@dataclass(frozen=True)
class EdgeShift:
    """本质图上的边移位，字母表即边标号集"""
    graph: DirectedGraph

    def __post_init__(self):
        if not self.graph.edges:
            raise EmptyShift("edge shift has no edges")
        if not is_essential(self.graph):
            raise NotEssential("every vertex needs an incoming and an outgoing edge")

    @classmethod
    def presented_by(cls, g: DirectedGraph) -> "EdgeShift":
        return cls(trim_essential(g))

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[int]]) -> "EdgeShift":
        return cls.presented_by(IntMatrix(tuple(tuple(r) for r in rows)).to_graph())

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return self.graph.labels

    @cached_property
    def matrix(self) -> IntMatrix:
        return self.graph.adjacency_matrix()

    def edge(self, label: str) -> Edge:
        return self.graph.edge(label)

    def index(self, label: str) -> int:
        return self.graph.index(label)

    def follows(self, a: str, b: str) -> bool:
        """b 能否接在 a 后面"""
        return self.edge(a).target == self.edge(b).source

    @cached_property
    def _successors(self) -> Dict[str, Tuple[str, ...]]:
        return {e.label: tuple(f.label for f in self.graph.out_of(e.target)) for e in self.graph.edges}

    def successors(self, label: str) -> Tuple[str, ...]:
        return self._successors[label]

    def is_word(self, word: Sequence[str]) -> bool:
        return self.graph.is_path(word)

    def is_cycle(self, word: Sequence[str]) -> bool:
        return bool(word) and self.is_word(word) and self.follows(word[-1], word[0])

    def sort_key(self, word: Sequence[str]) -> Tuple[int, ...]:
        return tuple(self.index(s) for s in word)


def words_of_length(X: EdgeShift, n: int) -> List[Word]:
    """
    长度为 n 的全部可拼接边路径，按边的声明顺序做字典序

    Raises:
        FlowCalcInputError: 枚举规模超过 Config.MAX_WINDOW_WORDS
    """
    if n < 0:
        raise FlowCalcInputError("word length must be nonnegative")
    words: List[Word] = [()]
    for _ in range(n):
        nxt: List[Word] = []
        for w in words:
            candidates = X.alphabet if not w else X.successors(w[-1])
            nxt.extend(w + (s,) for s in candidates)
        if len(nxt) > Config.MAX_WINDOW_WORDS:
            raise FlowCalcInputError(
                f"more than {Config.MAX_WINDOW_WORDS} words of length {n}; raise FLOWCALC_MAX_WINDOW_WORDS")
        words = nxt
    return words


def cyclic_window(word: Sequence[str], start: int, length: int) -> Word:
    """循环字从 start 开始长为 length 的片段（start 可为负）"""
    n = len(word)
    return tuple(word[(start + i) % n] for i in range(length))


def primitive_root(word: Sequence[str]) -> Word:
    n = len(word)
    word = tuple(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


# ============================================================ 周期轨道

@dataclass(frozen=True)
class PeriodicOrbit:
    """周期轨道，以本原字的字典序最小旋转为代表"""
    primitive_word: Word

    @property
    def least_period(self) -> int:
        return len(self.primitive_word)

    @classmethod
    def of_cycle(cls, X: EdgeShift, word: Sequence[str]) -> "PeriodicOrbit":
        """由任意闭路（可以是幂、可以任意旋转）得到规范代表"""
        word = tuple(word)
        if not X.is_cycle(word):
            raise FlowCalcInputError(f"{format_word(word)} is not a closed path")
        root = primitive_root(word)
        best = min((root[i:] + root[:i] for i in range(len(root))), key=X.sort_key)
        return cls(best)

    def rotation(self, phase: int) -> Word:
        return cyclic_window(self.primitive_word, phase, self.least_period)

    def __str__(self) -> str:
        return f"({format_word(self.primitive_word)})"


@dataclass(frozen=True)
class PeriodicPoint:
    """轨道上的一个点：从 phase 处读起的周期字"""
    orbit: PeriodicOrbit
    phase: int

    @property
    def word(self) -> Word:
        return self.orbit.rotation(self.phase)

    def __str__(self) -> str:
        return f"({format_word(self.word)})^inf"


def _canonical_cycles(X: EdgeShift, n: int) -> Iterator[Word]:
    """长度为 n、本身即为最小旋转的闭路（首边为其中序号最小的边）"""
    for first in X.alphabet:
        low = X.index(first)
        home = X.edge(first).source
        stack: List[Word] = [(first,)]
        while stack:
            path = stack.pop()
            if len(path) == n:
                if X.edge(path[-1]).target == home:
                    yield path
                continue
            # 逆序压栈，保证出栈顺序为字典序
            for s in reversed(X.successors(path[-1])):
                if X.index(s) >= low:
                    stack.append(path + (s,))


def periodic_orbits(X: EdgeShift, n_max: int) -> List[PeriodicOrbit]:
    """
    最小周期不超过 n_max 的全部周期轨道，每个旋转类一个代表

    Returns:
        按 (周期, 字典序) 排好的轨道列表
    """
    if n_max < 1:
        raise FlowCalcInputError("n_max must be positive")
    orbits: List[PeriodicOrbit] = []
    for n in range(1, n_max + 1):
        for word in _canonical_cycles(X, n):
            if primitive_root(word) != word:
                continue
            if min((word[i:] + word[:i] for i in range(n)), key=X.sort_key) != word:
                continue
            orbits.append(PeriodicOrbit(word))
    logger.debug(f"周期 ≤ {n_max} 的轨道: {len(orbits)} 条")
    return orbits


def count_periodic_points(orbits: Iterable[PeriodicOrbit], n: int) -> int:
    """σ^n 的不动点个数 = Σ_{p | n} p·#(周期 p 的轨道)"""
    return sum(o.least_period for o in orbits if n % o.least_period == 0)


# ============================================================ 高阶块表示

@dataclass(frozen=True, eq=False)
class BlockRecoding:
    """X 到其 m 块表示 X^[m] 的重编码（共轭）"""
    source: EdgeShift
    target: EdgeShift
    m: int
    window_of: Mapping[str, Word]
    label_of: Mapping[Word, str]

    def encode_word(self, word: Sequence[str]) -> Word:
        word = tuple(word)
        return tuple(self.label_of[word[i:i + self.m]] for i in range(len(word) - self.m + 1))

    def decode_word(self, word: Sequence[str]) -> Word:
        if not word:
            return ()
        head = tuple(self.window_of[s][0] for s in word)
        return head + self.window_of[word[-1]][1:]

    def encode_orbit(self, orbit: PeriodicOrbit) -> PeriodicOrbit:
        w = orbit.primitive_word
        blocks = [self.label_of[cyclic_window(w, i, self.m)] for i in range(len(w))]
        return PeriodicOrbit.of_cycle(self.target, blocks)

    def decode_orbit(self, orbit: PeriodicOrbit) -> PeriodicOrbit:
        return PeriodicOrbit.of_cycle(self.source, [self.window_of[s][0] for s in orbit.primitive_word])


def higher_block(X: EdgeShift, m: int) -> Tuple[EdgeShift, BlockRecoding]:
    """
    m 块表示：顶点为长 m-1 的路径，边为长 m 的路径，边标号为路径字

    Returns:
        (X^[m], 重编码)；m=1 时原样返回 X 与恒等重编码
    """
    if m < 1:
        raise FlowCalcInputError("block length must be positive")
    if m == 1:
        ident = {s: (s,) for s in X.alphabet}
        return X, BlockRecoding(X, X, 1, ident, {w: s for s, w in ident.items()})

    vertex_namer = _Namer()
    vertex_of = {w: vertex_namer(block_label(w)) for w in words_of_length(X, m - 1)}
    edge_namer = _Namer()
    window_of: Dict[str, Word] = {}
    label_of: Dict[Word, str] = {}
    edges = []
    for w in words_of_length(X, m):
        label = edge_namer(block_label(w))
        window_of[label] = w
        label_of[w] = label
        edges.append(Edge(label, vertex_of[w[:-1]], vertex_of[w[1:]], label))
    block = EdgeShift(DirectedGraph(tuple(vertex_of.values()), tuple(edges)))
    logger.debug(f"{m} 块表示: {len(block.graph.vertices)} 个顶点, {len(edges)} 条边")
    return block, BlockRecoding(X, block, m, window_of, label_of)


# ============================================================ 滑动块码

@dataclass(frozen=True, eq=False)
class SlidingBlockCode:
    """半径 r 的滑动块码：X 的 (2r+1) 字 → X' 的符号"""
    source: EdgeShift
    target: EdgeShift
    radius: int
    table: Mapping[Word, str] = field(default_factory=dict)

    @classmethod
    def identity(cls, X: EdgeShift) -> "SlidingBlockCode":
        return cls(X, X, 0, {(s,): s for s in X.alphabet})

    @classmethod
    def from_symbol_map(cls, X: EdgeShift, target: EdgeShift, mapping: Mapping[str, str]) -> "SlidingBlockCode":
        """1 块码"""
        return cls(X, target, 0, {(s,): mapping[s] for s in X.alphabet if s in mapping})

    def check_total(self) -> None:
        """每个 (2r+1) 字都要有像符号"""
        for w in words_of_length(self.source, 2 * self.radius + 1):
            if w not in self.table:
                raise PartialCode(f"no image for window {format_word(w)}")

    def image_word(self, word: Sequence[str]) -> Word:
        """长 L 的字映成长 L-2r 的字"""
        word = tuple(word)
        span = 2 * self.radius + 1
        out = []
        for i in range(len(word) - span + 1):
            try:
                out.append(self.table[word[i:i + span]])
            except KeyError:
                raise PartialCode(f"no image for window {format_word(word[i:i + span])}") from None
        return tuple(out)

    def apply_cyclic(self, word: Sequence[str]) -> Word:
        """循环字的像（同长度，位置 i 的像由以 i 为中心的窗口决定）"""
        n = len(word)
        span = 2 * self.radius + 1
        out = []
        for i in range(n):
            window = cyclic_window(word, i - self.radius, span)
            try:
                out.append(self.table[window])
            except KeyError:
                raise PartialCode(f"no image for window {format_word(window)}") from None
        return tuple(out)

    def apply_orbit(self, orbit: PeriodicOrbit) -> PeriodicOrbit:
        return PeriodicOrbit.of_cycle(self.target, self.apply_cyclic(orbit.primitive_word))

    def then(self, other: "SlidingBlockCode") -> "SlidingBlockCode":
        """先用 self 再用 other 的复合（other∘self）"""
        radius = self.radius + other.radius
        table: Dict[Word, str] = {}
        for w in words_of_length(self.source, 2 * radius + 1):
            middle = self.image_word(w)
            try:
                table[w] = other.table[middle]
            except KeyError:
                raise PartialCode(f"no image for window {format_word(middle)}") from None
        return SlidingBlockCode(self.source, other.target, radius, table)
