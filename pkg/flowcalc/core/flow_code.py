"""
字块码模块
返回字上的块码：构造、作用在周期轨道上、截面条件与开性的有界检查、共轭证书与同痕证书
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from tqdm import tqdm

from .config import Config
from .cross_section import CrossSection, ReturnMorphism, ReturnSystem, require_valid, return_system
from .errors import (
    EmptyImageWord, FlowCalcInputError, MissingBlock, NonComposableImage, NotIntertwining,
    NotIrreducible, ResolutionMismatch,
)
from .livsic import EdgePotential, VertexPotential, graph_potential, zero_on_cycles
from .logger import logger
from .moves import ExpansionRecord
from .sft import (
    DirectedGraph, Edge, EdgeShift, PeriodicOrbit, PeriodicPoint, SlidingBlockCode, Word,
    cyclic_window, format_word, higher_block, is_irreducible, periodic_orbits, words_of_length,
)


# ============================================================ 字块码

@dataclass(frozen=True, eq=False)
class WordBlockCode:
    """
    截面 C 上的字块码：返回符号的 (2M+1) 窗口 → 目标移位上的非空字

    table 的键是返回符号组成的窗口，值是目标字
    """
    section: CrossSection
    returns: ReturnSystem = field(repr=False)
    target: EdgeShift = field(repr=False)
    M: int = 0
    table: Mapping[Word, Word] = field(default_factory=dict, repr=False)

    def image_of(self, window: Sequence[str]) -> Word:
        try:
            return self.table[tuple(window)]
        except KeyError:
            raise MissingBlock(format_word(window)) from None

    def ratio(self, window: Sequence[str]) -> Fraction:
        """时间变换系数 c = |W'_0| / |W_0|"""
        return Fraction(len(self.image_of(window)), len(self.returns.words[window[self.M]]))

    def time_change(self) -> "TimeChange":
        return TimeChange({w: self.ratio(w) for w in self.table})


@dataclass(frozen=True)
class TimeChange:
    """每个返回窗口上的线性时间变换系数"""
    ratios: Mapping[Word, Fraction]

    def __post_init__(self):
        if any(c <= 0 for c in self.ratios.values()):
            raise AssertionError("time change ratios must be positive")


def build_code(C: CrossSection, M: int, table: Mapping[Sequence[str], Sequence[str]],
               target: EdgeShift) -> WordBlockCode:
    """
    构造并检查字块码

    Args:
        C: 合法截面
        M: 窗口半径
        table: 返回符号窗口 → 目标字
        target: 目标移位

    Raises:
        InvalidSection: C 不合法
        MissingBlock: 返回图中出现的某个窗口没有像
        EmptyImageWord: 像字为空
        NonComposableImage: 像字本身或相邻像字不可拼接
    """
    if M < 0:
        raise FlowCalcInputError("window radius M must be nonnegative")
    rs = return_system(C)
    table = {tuple(k): tuple(v) for k, v in table.items()}
    occurring = words_of_length(rs.graph, 2 * M + 1)
    for window in occurring:
        if window not in table:
            raise MissingBlock(format_word(window))
        image = table[window]
        if not image:
            raise EmptyImageWord(f"empty image for return block {format_word(window)}")
        for s in image:
            target.edge(s)
        if not target.is_word(image):
            raise NonComposableImage((window,), "image word is not a path")
    for long in words_of_length(rs.graph, 2 * M + 2):
        left, right = table[long[:-1]], table[long[1:]]
        if not target.follows(left[-1], right[0]):
            raise NonComposableImage((long[:-1], long[1:]))
    extra = set(table) - set(occurring)
    if extra:
        logger.debug(f"忽略 {len(extra)} 个不出现的返回窗口")
    code = WordBlockCode(C, rs, target, M, {w: table[w] for w in occurring})
    logger.info(f"字块码: M={M}, {len(occurring)} 个返回窗口")
    return code


def from_block_map(C: CrossSection, target: EdgeShift, M: int,
                   rule: Callable[[Tuple[Word, ...]], Word]) -> WordBlockCode:
    """按返回字窗口逐个调用 rule 生成码表"""
    rs = return_system(C)
    table = {w: tuple(rule(tuple(rs.words[s] for s in w))) for w in words_of_length(rs.graph, 2 * M + 1)}
    return build_code(C, M, table, target)


def from_one_block(C: CrossSection, phi: SlidingBlockCode) -> WordBlockCode:
    """1 块码在返回字上的重编码"""
    if phi.radius != 0:
        raise FlowCalcInputError("from_one_block needs a 1-block code")
    return from_block_map(C, phi.target, 0, lambda ws: phi.image_word(ws[0]))


def identity_code(C: CrossSection) -> WordBlockCode:
    return from_one_block(C, SlidingBlockCode.identity(C.shift))


def expansion_code(record: ExpansionRecord, C: Optional[CrossSection] = None) -> WordBlockCode:
    """符号扩张 s ↦ s s' 作为字块码（默认取全截面）"""
    C = C if C is not None else CrossSection.full(record.source)
    return from_block_map(C, record.target, 0, lambda ws: record.image_word(ws[0]))


def higher_block_code(X: EdgeShift, m: int) -> WordBlockCode:
    """X → X^[m] 的重编码：全截面上，位置 i 映到块 x[i, i+m)"""
    block, rec = higher_block(X, m)
    M = m - 1
    return from_block_map(CrossSection.full(X), block, M,
                          lambda ws: (rec.label_of[tuple(w[0] for w in ws[M:M + m])],))


# ============================================================ 作用在周期轨道上

@dataclass(frozen=True)
class CodeImage:
    """周期轨道的像：一个周期的像字、像字中锚点的位置与长度记录"""
    orbit: PeriodicOrbit
    word: Word
    anchors: Tuple[int, ...]
    domain_length: int
    image_length: int
    hits: int


def apply_periodic(code: WordBlockCode, x: PeriodicOrbit) -> CodeImage:
    """
    Raises:
        OrbitMissesSection: x 不经过截面
    """
    symbols = code.returns.factor(x)
    word: List[str] = []
    anchors: List[int] = []
    for i in range(len(symbols)):
        anchors.append(len(word))
        word.extend(code.image_of(cyclic_window(symbols, i - code.M, 2 * code.M + 1)))
    word = tuple(word)
    orbit = PeriodicOrbit.of_cycle(code.target, word)
    if len(word) % orbit.least_period:
        raise AssertionError("image period must divide the image length")
    return CodeImage(orbit, word, tuple(anchors), x.least_period, len(word), len(symbols))


# ============================================================ 截面条件

@dataclass(frozen=True)
class SectionConditionVerdict:
    holds: bool
    period_bound: int
    witness: Optional[PeriodicOrbit] = None
    position: Optional[int] = None


def verify_section_condition(code: WordBlockCode, C: CrossSection, C_prime: CrossSection,
                             P: int) -> SectionConditionVerdict:
    """
    有界检查 h⁻¹(C') = C：周期 ≤ P 的每条轨道上，锚点的像属于 C'，其余像位置不属于 C'

    违反时给出定义域轨道和像字中的位置
    """
    if not C.same_set(code.section):
        raise FlowCalcInputError("C is not the section the code is defined on")
    require_valid(C_prime)
    for orbit in tqdm(periodic_orbits(C.shift, P), desc="section condition",
                      disable=not Config.SHOW_PROGRESS):
        image = apply_periodic(code, orbit)
        anchors = set(image.anchors)
        for i in range(image.image_length):
            if C_prime.contains_at(image.word, i) != (i in anchors):
                logger.debug(f"截面条件在轨道 {orbit} 的像位置 {i} 处不成立")
                return SectionConditionVerdict(False, P, orbit, i)
    return SectionConditionVerdict(True, P)


# ============================================================ 诱导码

def induced_code(psi: ReturnMorphism) -> WordBlockCode:
    """
    返回系统之间的映射诱导的字块码：每个返回符号映成 ψ 像符号展开后的返回字

    Raises:
        NotIntertwining: ψ 把返回图的某个闭路映成不可拼接的序列
    """
    psi.check_total()
    for orbit in periodic_orbits(psi.source.graph, Config.VERIFY_PERIOD):
        image = psi.apply_cycle(orbit.primitive_word)
        if not psi.target.graph.is_cycle(image):
            raise NotIntertwining(orbit)
    table = {w: psi.target.words[s] for w, s in psi.table.items()}
    return build_code(psi.source.section, psi.M, table, psi.target.section.shift)


# ============================================================ 共轭证书

@dataclass(frozen=True)
class CertificateVerdict:
    """certified 时 potential 满足 g = b∘σ - b；否则给出 g 和不为零的轨道"""
    certified: bool
    potential: Optional[VertexPotential] = None
    witness: Optional[PeriodicOrbit] = None
    total: Fraction = Fraction(0)


def _subdivided_weights(code: WordBlockCode) -> Tuple[EdgePotential, Callable[[Word], Word]]:
    """
    (2M+1) 返回块图的每条边细分成 |W_0| 条边，每条的权为 |W'_0|/|W_0| - 1

    同时返回把细分图上的闭路还原成返回符号闭路的函数
    """
    rs, M = code.returns, code.M
    block, rec = higher_block(rs.graph, 2 * M + 1)
    vertices = list(block.graph.vertices)
    edges: List[Edge] = []
    weights: Dict[str, Fraction] = {}
    center: Dict[str, str] = {}
    for e in block.graph.edges:
        window = rec.window_of[e.label]
        n = len(rs.words[window[M]])
        weight = code.ratio(window) - 1
        stops = [e.source] + [f"{e.label}/{t}" for t in range(1, n)] + [e.target]
        vertices.extend(stops[1:-1])
        for t in range(n):
            label = f"{e.label}:{t}"
            edges.append(Edge(label, stops[t], stops[t + 1], label))
            weights[label] = weight
            if t == 0:
                center[label] = window[M]
    f = EdgePotential(DirectedGraph(tuple(vertices), tuple(edges)), weights)
    return f, lambda cycle: tuple(center[s] for s in cycle if s in center)


def conjugacy_certificate(code: WordBlockCode) -> CertificateVerdict:
    """
    圆周长度证书：g = c - 1 沿每个圈求和为零时解出 b，否则给出见证轨道

    Raises:
        NotIrreducible: X 可约
    """
    X = code.section.shift
    if not is_irreducible(X):
        raise NotIrreducible("circle-length certificate needs an irreducible shift")
    f, collapse = _subdivided_weights(code)
    verdict = zero_on_cycles(f)
    if not verdict.zero:
        orbit = code.returns.unfold(collapse(verdict.witness))
        image = apply_periodic(code, orbit)
        total = Fraction(image.image_length - image.domain_length)
        logger.info(f"圆周长度不守恒: 轨道 {orbit} 的像长 {image.image_length} ≠ {image.domain_length}")
        return CertificateVerdict(False, witness=orbit, total=total)
    potential = graph_potential(f)
    logger.info(f"圆周长度证书: {len(potential.values)} 个顶点")
    return CertificateVerdict(True, potential=potential)


# ============================================================ 同痕证书

@dataclass(frozen=True)
class IsotopyVerdict:
    valid: bool
    witness: Optional[Tuple[Word, Word]] = None
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None


def _beta(beta, word: Sequence[str], p: int) -> Fraction:
    r = beta.radius
    window = tuple(word[p - r:p + r + 1])
    try:
        return Fraction(beta.table[window])
    except KeyError:
        raise ResolutionMismatch(f"beta has no value on window {format_word(window)}") from None


def verify_isotopy_certificate(beta, code: WordBlockCode, C: CrossSection, D: CrossSection) -> IsotopyVerdict:
    """
    检查 β(ρ_C(y)) - β(y) = τ_D(h(y)) - τ_C(y)

    在返回图的 (2K+1) 路径上逐条检查，K 足够大使 β、码表与 D 的柱集窗口都落在展开字内。

    Args:
        beta: C 上的局部常值函数（LocalFunction，窗口取在 X 上）
        code: 定义在 C 上的字块码
        C: 定义域截面
        D: 目标移位上的截面

    Raises:
        ResolutionMismatch: β 在某个出现的窗口上没有定义
    """
    if not C.same_set(code.section):
        raise FlowCalcInputError("C is not the section the code is defined on")
    rs, M = code.returns, code.M
    r_d = require_valid(D)
    K = max(beta.radius + 1, M + r_d + D.radius)
    for window in tqdm(words_of_length(rs.graph, 2 * K + 1), desc="isotopy certificate",
                       disable=not Config.SHOW_PROGRESS):
        word = rs.unfold_word(window)
        start = len(rs.unfold_word(window[:K]))
        tau_c = len(rs.words[window[K]])

        images = [code.image_of(window[i - M:i + M + 1]) for i in range(M, 2 * K + 1 - M)]
        image_word = tuple(s for img in images for s in img)
        origin = sum(len(img) for img in images[:K - M])
        tau_d = next((j for j in range(1, r_d + 1) if D.contains_window(image_word, origin + j)), None)
        if tau_d is None:
            raise AssertionError(f"image of {format_word(window)} does not return to D")

        lhs = _beta(beta, word, start + tau_c) - _beta(beta, word, start)
        rhs = Fraction(tau_d - tau_c)
        if lhs != rhs:
            r = beta.radius
            witness = (tuple(word[start - r:start + r + 1]), tuple(word[start + tau_c - r:start + tau_c + r + 1]))
            logger.debug(f"同痕方程在 {format_word(witness[0])} 处不成立: {lhs} ≠ {rhs}")
            return IsotopyVerdict(False, witness, lhs, rhs)
    return IsotopyVerdict(True)


# ============================================================ 开性

@dataclass(frozen=True)
class OpennessWitness:
    """半径 k 下的反例：窗口、带该窗口的成员点与非成员点"""
    k: int
    window: Word
    member: PeriodicPoint
    non_member: PeriodicPoint


@dataclass(frozen=True)
class OpennessVerdict:
    open: bool
    radius: Optional[int] = None
    k_max: int = 0
    period_bound: int = 0
    witnesses: Tuple[OpennessWitness, ...] = ()


def _image_points(code: WordBlockCode, P: int) -> Tuple[List[PeriodicPoint], set]:
    """周期 ≤ P 的轨道的像的全部相位，以及其中的锚点（φ(C) 的成员）"""
    orbits: Dict[PeriodicOrbit, None] = {}
    members = set()
    for x in tqdm(periodic_orbits(code.section.shift, P), desc="image points",
                  disable=not Config.SHOW_PROGRESS):
        image = apply_periodic(code, x)
        orbits.setdefault(image.orbit, None)
        p = image.orbit.least_period
        for a in image.anchors:
            members.add(cyclic_window(image.word, a, p))
    target = code.target
    ordered = sorted(orbits, key=lambda o: (o.least_period, target.sort_key(o.primitive_word)))
    points = []
    for o in ordered:
        phases = sorted(range(o.least_period), key=lambda i: target.sort_key(o.rotation(i)))
        points.extend(PeriodicPoint(o, i) for i in phases)
    return points, members


def openness_check(code: WordBlockCode, k_max: int, P: int) -> OpennessVerdict:
    """
    φ(C) 在有界意义下是否是开集

    对 k = 0..k_max：R_k 为成员点的中心 (2k+1) 窗口集合；若所有中心窗口落在 R_k 的点都是成员，
    则 φ(C) 以半径 k 开；否则记录第一个非成员点作为见证
    """
    points, members = _image_points(code, P)
    witnesses: List[OpennessWitness] = []
    for k in range(k_max + 1):
        first_member: Dict[Word, PeriodicPoint] = {}
        for pt in points:
            if pt.word in members:
                first_member.setdefault(cyclic_window(pt.word, -k, 2 * k + 1), pt)
        bad = next((pt for pt in points if pt.word not in members
                    and cyclic_window(pt.word, -k, 2 * k + 1) in first_member), None)
        if bad is None:
            logger.info(f"φ(C) 以半径 {k} 为开集（周期 ≤ {P}）")
            return OpennessVerdict(True, radius=k, k_max=k_max, period_bound=P, witnesses=tuple(witnesses))
        window = cyclic_window(bad.word, -k, 2 * k + 1)
        witnesses.append(OpennessWitness(k, window, first_member[window], bad))
        logger.debug(f"半径 {k}: 窗口 {format_word(window)} 上有非成员点 {bad}")
    return OpennessVerdict(False, k_max=k_max, period_bound=P, witnesses=tuple(witnesses))


@dataclass(frozen=True)
class ReturnTimeProfile:
    """成员点的中心窗口 → 观察到的到 φ(C) 的返回时间"""
    k: int
    times: Mapping[Word, Tuple[int, ...]]

    @property
    def discontinuous(self) -> Tuple[Word, ...]:
        """返回时间不唯一的窗口"""
        return tuple(w for w, ts in self.times.items() if len(ts) > 1)


def return_time_profile(code: WordBlockCode, k: int, P: int) -> ReturnTimeProfile:
    points, members = _image_points(code, P)
    seen: Dict[Word, set] = {}
    for pt in points:
        if pt.word not in members:
            continue
        p = pt.orbit.least_period
        gap = next(j for j in range(1, p + 1) if pt.orbit.rotation(pt.phase + j) in members)
        seen.setdefault(cyclic_window(pt.word, -k, 2 * k + 1), set()).add(gap)
    return ReturnTimeProfile(k, {w: tuple(sorted(ts)) for w, ts in seen.items()})
