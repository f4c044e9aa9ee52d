"""
离散截面模块
柱集截面的合法性检查、首次返回系统、拉回、悬挂空间中的不相交化，以及两截面的首次命中分解
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
from tqdm import tqdm

from .config import Config
from .errors import (
    FlowCalcInputError, InvalidSection, NotDisjoint, NotIntertwining, OrbitMissesSection, PartialCode,
)
from .logger import logger
from .sft import (
    BlockRecoding, DirectedGraph, Edge, EdgeShift, PeriodicOrbit, SlidingBlockCode, Word, _Namer,
    block_label, cyclic_window, format_word, higher_block, periodic_orbits, words_of_length,
)


# ============================================================ 截面

@dataclass(frozen=True, eq=False)
class CrossSection:
    """
    柱集截面：x 属于截面当且仅当 x[-κ, κ] ∈ centers

    height 是截面在悬挂空间 X × [0,1) 中的高度（精确有理数）
    """
    shift: EdgeShift
    radius: int
    centers: FrozenSet[Word]
    height: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "centers", frozenset(tuple(w) for w in self.centers))
        object.__setattr__(self, "height", Fraction(self.height))
        if self.radius < 0:
            raise FlowCalcInputError("section radius must be nonnegative")
        if not 0 <= self.height < 1:
            raise FlowCalcInputError(f"section height {self.height} is outside [0, 1)")
        span = 2 * self.radius + 1
        for w in self.centers:
            if len(w) != span:
                raise FlowCalcInputError(f"center word {format_word(w)} should have length {span}")
            if not self.shift.is_word(w):
                raise FlowCalcInputError(f"center word {format_word(w)} is not a path")

    @classmethod
    def full(cls, X: EdgeShift, height=Fraction(0)) -> "CrossSection":
        return cls(X, 0, frozenset((s,) for s in X.alphabet), height)

    @classmethod
    def of_symbols(cls, X: EdgeShift, symbols: Iterable[str], height=Fraction(0)) -> "CrossSection":
        """{x : x_0 ∈ symbols}"""
        for s in symbols:
            X.edge(s)
        return cls(X, 0, frozenset((s,) for s in symbols), height)

    def with_height(self, height) -> "CrossSection":
        return CrossSection(self.shift, self.radius, self.centers, Fraction(height))

    def contains_at(self, word: Sequence[str], i: int) -> bool:
        """循环字在位置 i 处的点是否属于截面"""
        return cyclic_window(word, i - self.radius, 2 * self.radius + 1) in self.centers

    def contains_window(self, word: Sequence[str], i: int) -> bool:
        """有限字在位置 i 处的点是否属于截面（窗口必须落在字内）"""
        lo, hi = i - self.radius, i + self.radius + 1
        if lo < 0 or hi > len(word):
            raise AssertionError(f"window around {i} leaves the word")
        return tuple(word[lo:hi]) in self.centers

    def at_radius(self, R: int) -> "CrossSection":
        """同一集合在更大半径下的柱集表示"""
        if R < self.radius:
            raise FlowCalcInputError(f"cannot refine radius {self.radius} down to {R}")
        d = R - self.radius
        centers = frozenset(w for w in words_of_length(self.shift, 2 * R + 1)
                            if w[d:len(w) - d] in self.centers)
        return CrossSection(self.shift, R, centers, self.height)

    def coarsen(self) -> "CrossSection":
        """表示同一集合的最小半径"""
        words = words_of_length(self.shift, 2 * self.radius + 1)
        for k in range(self.radius):
            d = self.radius - k
            verdict: Dict[Word, bool] = {}
            consistent = True
            for w in words:
                core = w[d:len(w) - d]
                member = w in self.centers
                if verdict.setdefault(core, member) != member:
                    consistent = False
                    break
            if consistent:
                return CrossSection(self.shift, k, frozenset(c for c, m in verdict.items() if m), self.height)
        return self

    def _common(self, other: "CrossSection") -> Tuple["CrossSection", "CrossSection"]:
        if other.shift is not self.shift and other.shift.graph != self.shift.graph:
            raise FlowCalcInputError("sections live on different shifts")
        R = max(self.radius, other.radius)
        return self.at_radius(R), other.at_radius(R)

    def same_set(self, other: "CrossSection") -> bool:
        """底空间中是同一个集合（不比较高度）"""
        a, b = self._common(other)
        return a.centers == b.centers

    def intersects(self, other: "CrossSection") -> bool:
        """底空间中是否相交（不比较高度）"""
        a, b = self._common(other)
        return bool(a.centers & b.centers)

    def describe(self) -> str:
        return f"radius {self.radius}, height {self.height}, {len(self.centers)} center words"


# ============================================================ 合法性

@dataclass(frozen=True)
class SectionVerdict:
    """validate 的结论：合法时给出最大返回时间，否则给出避开截面的周期轨道"""
    valid: bool
    max_return: Optional[int] = None
    witness: Optional[PeriodicOrbit] = None


def _block_presentation(C: CrossSection) -> Tuple[EdgeShift, BlockRecoding, FrozenSet[str]]:
    """(2κ+1) 块图以及被标记的块边"""
    block, rec = higher_block(C.shift, 2 * C.radius + 1)
    marked = frozenset(label for label, w in rec.window_of.items() if w in C.centers)
    return block, rec, marked


def _unmarked_graph(block: EdgeShift, marked: FrozenSet[str]) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    g.add_nodes_from(block.graph.vertices)
    for e in block.graph.edges:
        if e.label not in marked:
            g.add_edge(e.source, e.target, key=e.label)
    return g


def validate(X: EdgeShift, C: CrossSection) -> SectionVerdict:
    """
    截面合法当且仅当块图中每个圈都经过被标记的块

    Returns:
        合法: max_return = 最长无标记路径 + 1；不合法: 一条无标记圈对应的轨道
    """
    if C.shift.graph != X.graph:
        raise FlowCalcInputError("section belongs to a different shift")
    block, rec, marked = _block_presentation(C)
    free = _unmarked_graph(block, marked)
    if nx.is_directed_acyclic_graph(free):
        longest = nx.dag_longest_path_length(free) if free.number_of_edges() else 0
        logger.debug(f"截面合法: {C.describe()}, 最大返回时间 {longest + 1}")
        return SectionVerdict(True, max_return=longest + 1)
    cycle = [key for _, _, key in nx.find_cycle(free)]
    witness = rec.decode_orbit(PeriodicOrbit.of_cycle(block, cycle))
    logger.debug(f"截面不合法: 轨道 {witness} 不经过截面")
    return SectionVerdict(False, witness=witness)


def require_valid(C: CrossSection) -> int:
    """合法则返回最大返回时间，否则抛出 InvalidSection"""
    verdict = validate(C.shift, C)
    if not verdict.valid:
        raise InvalidSection(f"orbit {verdict.witness} misses the section", verdict.witness)
    return verdict.max_return


# ============================================================ 首次返回系统

@dataclass(frozen=True, eq=False)
class ReturnSystem:
    """
    首次返回系统：每条首次返回路径是返回图的一条边，也是一个返回符号

    paths: 返回符号 → 块图上的路径；words: 返回符号 → X 上的返回字
    """
    section: CrossSection
    block: EdgeShift = field(repr=False)
    recoding: BlockRecoding = field(repr=False)
    graph: EdgeShift = field(repr=False)
    paths: Mapping[str, Word] = field(repr=False)
    words: Mapping[str, Word] = field(repr=False)

    @cached_property
    def _symbol_of_path(self) -> Dict[Word, str]:
        return {p: s for s, p in self.paths.items()}

    @property
    def symbols(self) -> Tuple[str, ...]:
        return self.graph.alphabet

    @property
    def return_words(self) -> Tuple[Word, ...]:
        """去重后的返回字，按返回符号的声明顺序"""
        seen: List[Word] = []
        for s in self.symbols:
            if self.words[s] not in seen:
                seen.append(self.words[s])
        return tuple(seen)

    @property
    def max_return(self) -> int:
        return max(len(w) for w in self.words.values())

    def anchors(self, orbit: PeriodicOrbit) -> List[int]:
        """轨道本原字中属于截面的位置"""
        w = orbit.primitive_word
        return [i for i in range(len(w)) if self.section.contains_at(w, i)]

    def anchor_phase(self, orbit: PeriodicOrbit) -> int:
        """字典序最小的锚点旋转"""
        anchors = self.anchors(orbit)
        if not anchors:
            raise OrbitMissesSection(f"orbit {orbit} does not meet the section")
        X = self.section.shift
        return min(anchors, key=lambda i: X.sort_key(orbit.rotation(i)))

    def symbol_of(self, word: Sequence[str], start: int, end: int) -> str:
        """循环字 [start, end) 段对应的返回符号"""
        k = self.section.radius
        path = tuple(self.recoding.label_of[cyclic_window(word, i - k, 2 * k + 1)] for i in range(start, end))
        try:
            return self._symbol_of_path[path]
        except KeyError:
            raise AssertionError(f"{format_word(path)} is not a first-return path") from None

    def factor(self, orbit: PeriodicOrbit) -> Word:
        """
        把轨道分解为返回符号序列（一个周期，从最小锚点开始）

        Raises:
            OrbitMissesSection: 轨道不经过截面
        """
        phase = self.anchor_phase(orbit)
        word = orbit.rotation(phase)
        cuts = [i for i in range(len(word)) if self.section.contains_at(word, i)] + [len(word)]
        return tuple(self.symbol_of(word, a, b) for a, b in zip(cuts, cuts[1:]))

    def encode_orbit(self, orbit: PeriodicOrbit) -> PeriodicOrbit:
        return PeriodicOrbit.of_cycle(self.graph, self.factor(orbit))

    def unfold(self, symbols: Sequence[str]) -> PeriodicOrbit:
        """返回符号闭路 → X 的周期轨道"""
        word = tuple(s for sym in symbols for s in self.words[sym])
        return PeriodicOrbit.of_cycle(self.section.shift, word)

    def unfold_word(self, symbols: Sequence[str]) -> Word:
        return tuple(s for sym in symbols for s in self.words[sym])

    def eta(self) -> "ReturnMorphism":
        """每个返回字变成一个符号的共轭，落在返回移位的全截面上"""
        target = return_system(CrossSection.full(self.graph))
        table = {(s,): target.symbol_of((s,), 0, 1) for s in self.symbols}
        return ReturnMorphism(self, target, 0, table)


def return_system(C: CrossSection) -> ReturnSystem:
    """
    枚举块图上的全部首次返回路径：一条标记边后接若干无标记边，停在有标记出边的顶点

    Raises:
        InvalidSection: 截面不合法
    """
    require_valid(C)
    block, rec, marked = _block_presentation(C)
    g = block.graph
    k = C.radius
    has_marked_out = {v: any(e.label in marked for e in g.out_of(v)) for v in g.vertices}

    found: List[Word] = []
    for e in g.edges:
        if e.label not in marked:
            continue
        stack: List[Word] = [(e.label,)]
        while stack:
            path = stack.pop()
            end = g.edge(path[-1]).target
            if has_marked_out[end]:
                found.append(path)
            for f in reversed(g.out_of(end)):
                if f.label not in marked:
                    stack.append(path + (f.label,))

    namer = _Namer()
    paths: Dict[str, Word] = {}
    words: Dict[str, Word] = {}
    edges: List[Edge] = []
    for path in found:
        word = tuple(rec.window_of[label][k] for label in path)
        symbol = namer(f"[{block_label(word)}]")
        paths[symbol] = path
        words[symbol] = word
        edges.append(Edge(symbol, g.edge(path[0]).source, g.edge(path[-1]).target, symbol))
    used = {e.source for e in edges}
    graph = EdgeShift(DirectedGraph(tuple(v for v in g.vertices if v in used), tuple(edges)))
    logger.info(f"返回系统: {len(edges)} 个返回符号, {len(graph.graph.vertices)} 个状态")
    return ReturnSystem(C, block, rec, graph, paths, words)


# ============================================================ 返回系统之间的映射

@dataclass(frozen=True, eq=False)
class ReturnMorphism:
    """返回符号上半径 M 的滑动映射"""
    source: ReturnSystem
    target: ReturnSystem
    M: int
    table: Mapping[Word, str]

    def apply_cycle(self, symbols: Sequence[str]) -> Word:
        span = 2 * self.M + 1
        out = []
        for i in range(len(symbols)):
            window = cyclic_window(symbols, i - self.M, span)
            try:
                out.append(self.table[window])
            except KeyError:
                raise PartialCode(f"no image for return block {format_word(window)}") from None
        return tuple(out)

    def check_total(self) -> None:
        for w in words_of_length(self.source.graph, 2 * self.M + 1):
            if w not in self.table:
                raise PartialCode(f"no image for return block {format_word(w)}")


# ============================================================ 拉回

def pullback(phi: SlidingBlockCode, C_prime: CrossSection) -> CrossSection:
    """
    沿滑动块码 φ: X → X' 拉回截面：x ∈ C 当且仅当 φ(x) ∈ C'

    半径为 κ' + r，高度不变

    Raises:
        PartialCode: φ 在某个窗口上没有定义
    """
    if C_prime.shift.graph != phi.target.graph:
        raise FlowCalcInputError("section does not live on the code's target shift")
    R = C_prime.radius + phi.radius
    centers = frozenset(w for w in words_of_length(phi.source, 2 * R + 1)
                        if phi.image_word(w) in C_prime.centers)
    return CrossSection(phi.source, R, centers, C_prime.height)


# ============================================================ 不相交化

def _next_dyadic(used: Iterable[Fraction]) -> Fraction:
    used = set(used)
    k = 1
    while Fraction(1, 2 ** k) in used:
        k += 1
    return Fraction(1, 2 ** k)


def disjoint_in_suspension(C: CrossSection, C2: CrossSection) -> bool:
    return C.height != C2.height or not C.intersects(C2)


def disjointify(C: CrossSection, C_prime: CrossSection) -> CrossSection:
    """必要时把 C' 移到新的二进高度，使两者在悬挂空间中不相交"""
    if disjoint_in_suspension(C, C_prime):
        return C_prime
    return C_prime.with_height(_next_dyadic([C.height, C_prime.height]))


def disjointify_all(sections: Sequence[CrossSection]) -> List[CrossSection]:
    """依次放置，与已放置者冲突时取最小未用的 1/2^k"""
    placed: List[CrossSection] = []
    for C in sections:
        if any(not disjoint_in_suspension(P, C) for P in placed):
            C = C.with_height(_next_dyadic([P.height for P in placed] + [C.height]))
        placed.append(C)
    return placed


# ============================================================ 首次命中分解

def _first_return(C1: CrossSection, word: Sequence[str], p: int, limit: int) -> int:
    for j in range(1, limit + 1):
        if C1.contains_window(word, p + j):
            return j
    raise AssertionError(f"no return to C1 within {limit} steps")


def _first_hit(C2: CrossSection, delta: Fraction, word: Sequence[str], p: int, limit: int) -> int:
    """最小的 j ≥ 0 使 j + δ > 0 且 σ^j x ∈ C2；limit 步内没有则返回 -1"""
    for j in range(0 if delta > 0 else 1, limit + 1):
        if C2.contains_window(word, p + j):
            return j
    return -1


def hitting_times(C1: CrossSection, C2: CrossSection, word: Sequence[str], p: int,
                  r1: int) -> Tuple[Fraction, Optional[Fraction]]:
    """
    x = word 在位置 p 处的点（x ∈ C1，高度 h1）沿流方向到 C1、C2 的首次命中时间

    τ2 只在 τ1 之前或同时有意义，否则返回 None
    """
    delta = C2.height - C1.height
    j1 = _first_return(C1, word, p, r1)
    j2 = _first_hit(C2, delta, word, p, j1)
    return Fraction(j1), (j2 + delta if j2 >= 0 else None)


def _in_d(C1: CrossSection, C2: CrossSection, word: Sequence[str], p: int, r1: int) -> bool:
    if not C1.contains_window(word, p):
        return False
    tau1, tau2 = hitting_times(C1, C2, word, p, r1)
    if tau2 == tau1:
        raise AssertionError("C1 and C2 meet in the suspension")
    return tau2 is not None and tau2 < tau1


def _in_d2(C1: CrossSection, C2: CrossSection, word: Sequence[str], p: int, r1: int) -> bool:
    """z ∈ C2 且它之前最近的事件是 C1 事件"""
    if not C2.contains_window(word, p):
        return False
    delta = C2.height - C1.height
    latest: Optional[Tuple[Fraction, int]] = None
    for m in range(-r1 - 1, 1):
        candidates = []
        if m + C1.height < C2.height and C1.contains_window(word, p + m):
            candidates.append((m + C1.height - C2.height, 1))
        if m < 0 and C2.contains_window(word, p + m):
            candidates.append((Fraction(m), 2))
        for c in candidates:
            if latest is None or c[0] > latest[0]:
                latest = c
    if latest is None:
        raise AssertionError(f"no event before position {p} (delta {delta})")
    return latest[1] == 1


def _section_from_predicate(X: EdgeShift, radius: int, height: Fraction,
                            predicate: Callable[[Word, int], bool]) -> CrossSection:
    centers = frozenset(w for w in words_of_length(X, 2 * radius + 1) if predicate(w, radius))
    return CrossSection(X, radius, centers, height).coarsen()


@dataclass(frozen=True, eq=False)
class Case1Result:
    """D ⊆ C1、D'' ⊆ C2 与首次命中映射 ψ: D → D''"""
    C1: CrossSection
    C2: CrossSection
    D: CrossSection
    D2: CrossSection
    psi: ReturnMorphism

    @property
    def delta(self) -> Fraction:
        return self.C2.height - self.C1.height


def _psi_table(C1: CrossSection, C2: CrossSection, rs_d: ReturnSystem, rs_d2: ReturnSystem,
               r1: int, M: int) -> Dict[Word, str]:
    delta = C2.height - C1.height
    k2 = rs_d2.section.radius
    table: Dict[Word, str] = {}
    for window in words_of_length(rs_d.graph, 2 * M + 1):
        word = rs_d.unfold_word(window)
        start = len(rs_d.unfold_word(window[:M]))
        nxt = start + len(rs_d.words[window[M]])
        j = _first_hit(C2, delta, word, start, r1)
        j_next = _first_hit(C2, delta, word, nxt, r1)
        path = tuple(rs_d2.recoding.label_of[tuple(word[i - k2:i + k2 + 1])]
                     for i in range(start + j, nxt + j_next))
        try:
            table[window] = rs_d2._symbol_of_path[path]
        except KeyError:
            raise AssertionError(f"first hit of {format_word(window)} is not a D'' return path") from None
    return table


def ps_case1(X: EdgeShift, C1: CrossSection, C2: CrossSection) -> Case1Result:
    """
    两个在悬挂空间中不相交的截面：D = {x ∈ C1 : τ2(x) < τ1(x)}，D'' 为 D 的首次 C2 命中，
    ψ 把 D 的返回符号映到对应的 D'' 返回符号

    Raises:
        InvalidSection: C1 或 C2 不合法
        NotDisjoint: 两截面高度相同且底集相交
    """
    r1 = require_valid(C1)
    require_valid(C2)
    if not disjoint_in_suspension(C1, C2):
        raise NotDisjoint(f"sections share height {C1.height} and intersect")

    kappa = max(C1.radius, C2.radius)
    D = _section_from_predicate(X, r1 + kappa, C1.height, lambda w, c: _in_d(C1, C2, w, c, r1))
    D2 = _section_from_predicate(X, r1 + 1 + kappa, C2.height, lambda w, c: _in_d2(C1, C2, w, c, r1))
    rs_d = return_system(D)
    rs_d2 = return_system(D2)

    M = max(kappa, D.radius, D2.radius) + 1
    psi = ReturnMorphism(rs_d, rs_d2, M, _psi_table(C1, C2, rs_d, rs_d2, r1, M))
    result = Case1Result(C1, C2, D, D2, psi)
    verdict = check_intertwining(result, Config.VERIFY_PERIOD)
    if not verdict.holds:
        logger.error(f"✗ 首次命中映射在 {verdict.witness} 上失败: {verdict.reason}")
        raise NotIntertwining(verdict.witness)
    logger.info(f"首次命中分解: D {D.describe()}; D'' {D2.describe()}; ψ 半径 {M}")
    return result


@dataclass(frozen=True)
class IntertwiningVerdict:
    holds: bool
    checked: int
    witness: Optional[PeriodicOrbit] = None
    reason: str = ""


def check_intertwining(result: Case1Result, P: int) -> IntertwiningVerdict:
    """
    在周期 ≤ P 的全部轨道上逐条检查：D 与 D'' 的事件在时间上交替出现，
    且 ψ 的查表结果就是每个 D 点的首次 C2 命中
    """
    X = result.C1.shift
    rs_d, rs_d2 = result.psi.source, result.psi.target
    orbits = periodic_orbits(X, P)
    for orbit in tqdm(orbits, desc="check intertwining", disable=not Config.SHOW_PROGRESS):
        w = orbit.primitive_word
        events = []
        for i in range(len(w)):
            if result.D.contains_at(w, i):
                events.append((i + result.D.height, 1))
            if result.D2.contains_at(w, i):
                events.append((i + result.D2.height, 2))
        events.sort()
        if not events:
            return IntertwiningVerdict(False, 0, orbit, "orbit meets neither D nor D''")
        tags = [t for _, t in events]
        if any(tags[i] == tags[(i + 1) % len(tags)] for i in range(len(tags))):
            return IntertwiningVerdict(False, 0, orbit, "D and D'' events do not alternate")
        if len(set(time for time, _ in events)) != len(events):
            return IntertwiningVerdict(False, 0, orbit, "D and D'' events coincide")
        image = PeriodicOrbit.of_cycle(rs_d2.graph, result.psi.apply_cycle(rs_d.factor(orbit)))
        if image != rs_d2.encode_orbit(orbit):
            return IntertwiningVerdict(False, 0, orbit, "psi disagrees with the first C2 hit")
    return IntertwiningVerdict(True, len(orbits))
