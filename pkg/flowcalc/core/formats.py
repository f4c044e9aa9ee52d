"""
文本文件格式
图、矩阵、截面、字块码与势函数的逐行格式；解析错误带文件名、行号和出错记号
"""
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .config import normalize_path
from .cross_section import CrossSection
from .errors import FlowCalcInputError, ParseError
from .livsic import EdgePotential, LocalFunction
from .sft import DirectedGraph, Edge, EdgeShift, IntMatrix, Word


def read_text(path) -> str:
    path = normalize_path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise FlowCalcInputError(f"cannot read {path}: {e.strerror}") from None


def _records(text: str) -> Iterator[Tuple[int, List[str]]]:
    """跳过空行和以 # 开头的注释行，逐行给出 (行号, 记号列表)"""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line.split()


def parse_rational(token: str, path: Optional[str] = None, line: Optional[int] = None) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError("expected a rational p/q", path, line, token) from None


def parse_int(token: str, path: Optional[str] = None, line: Optional[int] = None) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError("expected an integer", path, line, token) from None


# ============================================================ 图

def parse_graph(text: str, path: Optional[str] = None) -> DirectedGraph:
    """`vertex <id>` 与 `edge <id> <source> <target> <label>` 记录"""
    vertices: List[str] = []
    edges: List[Edge] = []
    lines: Dict[str, int] = {}
    for number, tokens in _records(text):
        kind = tokens[0]
        if kind == "vertex" and len(tokens) == 2:
            vertices.append(tokens[1])
        elif kind == "edge" and len(tokens) == 5:
            edges.append(Edge(*tokens[1:]))
            lines[tokens[1]] = number
        elif kind in ("vertex", "edge"):
            raise ParseError(f"wrong number of fields for {kind}", path, number, " ".join(tokens))
        else:
            raise ParseError("unknown record", path, number, kind)
    declared = set(vertices)
    for e in edges:
        for v in (e.source, e.target):
            if v not in declared:
                raise ParseError(f"edge {e.id} uses an undeclared vertex", path, lines[e.id], v)
    return DirectedGraph(tuple(vertices), tuple(edges))


def format_graph(g: DirectedGraph) -> str:
    lines = [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {e.id} {e.source} {e.target} {e.label}" for e in g.edges]
    return "\n".join(lines) + "\n"


def load_shift(path) -> EdgeShift:
    """读取图文件，本质化后作为边移位"""
    return EdgeShift.presented_by(parse_graph(read_text(path), str(path)))


# ============================================================ 矩阵

def parse_matrix(text: str, path: Optional[str] = None) -> IntMatrix:
    """每行一行矩阵，空格分隔的非负整数"""
    rows: List[Tuple[int, ...]] = []
    for number, tokens in _records(text):
        row = tuple(parse_int(t, path, number) for t in tokens)
        negative = next((t for t, x in zip(tokens, row) if x < 0), None)
        if negative is not None:
            raise ParseError("entries must be nonnegative", path, number, negative)
        rows.append(row)
    if any(len(r) != len(rows) for r in rows):
        raise ParseError(f"matrix must be square, got {len(rows)} rows", path)
    return IntMatrix(tuple(rows))


def load_matrix(path) -> IntMatrix:
    return parse_matrix(read_text(path), str(path))


# ============================================================ 截面

def parse_section(text: str, X: EdgeShift, path: Optional[str] = None) -> CrossSection:
    """`radius <κ>`、`height <p>/<q>`，其后每行一个中心字"""
    radius: Optional[int] = None
    height = Fraction(0)
    centers: List[Word] = []
    for number, tokens in _records(text):
        if tokens[0] == "radius" and len(tokens) == 2:
            radius = parse_int(tokens[1], path, number)
        elif tokens[0] == "height" and len(tokens) == 2:
            height = parse_rational(tokens[1], path, number)
        else:
            for s in tokens:
                if s not in X.alphabet:
                    raise ParseError("unknown symbol", path, number, s)
            centers.append(tuple(tokens))
            if radius is not None and len(tokens) != 2 * radius + 1:
                raise ParseError(f"center word should have {2 * radius + 1} symbols", path, number,
                                 " ".join(tokens))
    if radius is None:
        raise ParseError("missing `radius` record", path)
    try:
        return CrossSection(X, radius, frozenset(centers), height)
    except FlowCalcInputError as e:
        raise ParseError(str(e), path) from None


def load_section(path, X: EdgeShift) -> CrossSection:
    return parse_section(read_text(path), X, str(path))


# ============================================================ 字块码

@dataclass(frozen=True)
class CodeDocument:
    """字块码文件的内容：截面文件路径、窗口半径与码表"""
    section_path: str
    M: int
    table: Dict[Word, Word]


def parse_code(text: str, path: Optional[str] = None) -> CodeDocument:
    """首行 `section <file> M <int>`，其后 `<返回符号...> -> <目标字>`"""
    records = list(_records(text))
    if not records:
        raise ParseError("empty code file", path)
    number, header = records[0]
    if len(header) != 4 or header[0] != "section" or header[2] != "M":
        raise ParseError("expected header `section <file> M <int>`", path, number, " ".join(header))
    section_path = header[1]
    if path is not None and not os.path.isabs(section_path):
        section_path = os.path.join(os.path.dirname(path), section_path)
    M = parse_int(header[3], path, number)
    table: Dict[Word, Word] = {}
    for number, tokens in records[1:]:
        if tokens.count("->") != 1:
            raise ParseError("expected `<return symbols> -> <target word>`", path, number, " ".join(tokens))
        arrow = tokens.index("->")
        window, image = tuple(tokens[:arrow]), tuple(tokens[arrow + 1:])
        if len(window) != 2 * M + 1:
            raise ParseError(f"window should have {2 * M + 1} return symbols", path, number, " ".join(window))
        if window in table:
            raise ParseError("duplicate window", path, number, " ".join(window))
        table[window] = image
    return CodeDocument(section_path, M, table)


def load_code(path) -> CodeDocument:
    return parse_code(read_text(path), str(path))


# ============================================================ 势函数

def parse_local_function(text: str, X: EdgeShift, path: Optional[str] = None) -> LocalFunction:
    """
    `edge <id> <p>/<q>`：只依赖 x_0 的函数；
    `window <s_-r> ... <s_r> <p>/<q>`：依赖 x[-r, r] 的函数
    """
    table: Dict[Word, Fraction] = {}
    radius: Optional[int] = None
    for number, tokens in _records(text):
        if tokens[0] == "edge" and len(tokens) == 3:
            try:
                label = X.graph.edge_by_id(tokens[1]).label
            except FlowCalcInputError:
                raise ParseError("unknown edge id", path, number, tokens[1]) from None
            window, r = (label,), 0
        elif tokens[0] == "window" and len(tokens) >= 3 and len(tokens) % 2 == 1:
            window, r = tuple(tokens[1:-1]), (len(tokens) - 3) // 2
            if not X.is_word(window):
                raise ParseError("window is not a path", path, number, " ".join(window))
        else:
            raise ParseError("expected `edge <id> <p>/<q>` or `window <word> <p>/<q>`", path, number,
                             " ".join(tokens))
        if radius is not None and r != radius:
            raise ParseError("all windows must have the same length", path, number, " ".join(tokens))
        radius = r
        table[window] = parse_rational(tokens[-1], path, number)
    if radius is None:
        raise ParseError("no values", path)
    return LocalFunction(radius, table)


def load_local_function(path, X: EdgeShift) -> LocalFunction:
    return parse_local_function(read_text(path), X, str(path))


def edge_potential_of(f: LocalFunction, g: DirectedGraph) -> EdgePotential:
    """半径 0 的函数看作边权"""
    if f.radius != 0:
        raise FlowCalcInputError("edge weights need a function of x_0 only")
    return EdgePotential(g, {w[0]: v for w, v in f.table.items()})
