"""
流等价不变量模块
Smith 标准形、Parry-Sullivan 数 det(I-A)、Bowen-Franks 群 coker(I-A)，以及 Franks 判定
"""
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import sympy

from .errors import NotIrreducible, TrivialSFT
from .logger import logger
from .sft import EdgeShift, IntMatrix, is_irreducible, trim_essential

Matrix = Tuple[Tuple[int, ...], ...]


def _identity(n: int) -> List[List[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _freeze(rows: List[List[int]]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    """整数矩阵乘法"""
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


@dataclass(frozen=True)
class SmithForm:
    """U·M·V = diag(d_1, ..., d_n)，d_i | d_{i+1}，U、V 幺模"""
    diagonal: Tuple[int, ...]
    left: Matrix
    right: Matrix


def smith_normal_form(M: Sequence[Sequence[int]]) -> SmithForm:
    """
    Smith 标准形

    主元取剩余子矩阵中绝对值最小的非零元（并列时行号小者、再列号小者优先），
    对角元非负。

    Args:
        M: 整数矩阵（行列表）

    Returns:
        SmithForm，包含对角元和左右变换矩阵
    """
    A = [list(map(int, r)) for r in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    U = _identity(rows)
    V = _identity(cols)

    def swap_rows(i: int, j: int):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst: int, src: int, q: int):
        # row_dst += q * row_src
        A[dst] = [x + q * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst: int, src: int, q: int):
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    for t in range(min(rows, cols)):
        while True:
            pivot = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if A[i][j] != 0 and (pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = A[t][t]

            clean = True
            for i in range(t + 1, rows):
                q = A[i][t] // p
                if q:
                    add_row(i, t, -q)
                if A[i][t] != 0:
                    clean = False
            for j in range(t + 1, cols):
                q = A[t][j] // p
                if q:
                    add_col(j, t, -q)
                if A[t][j] != 0:
                    clean = False
            if not clean:
                continue

            # 整除链：p 必须整除剩余子矩阵的每个元素
            offender = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                             if A[i][j] % p != 0), None)
            if offender is None:
                break
            add_row(t, offender[0], 1)

        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]

    diagonal = tuple(A[i][i] for i in range(min(rows, cols)))
    return SmithForm(diagonal, _freeze(U), _freeze(V))


def determinant(M: Sequence[Sequence[int]]) -> int:
    """精确行列式"""
    n = len(M)
    if n == 0:
        return 1
    return int(sympy.Matrix([list(r) for r in M]).det(method="bareiss"))


@dataclass(frozen=True)
class FlowInvariants:
    """(det(I-A), coker(I-A)) 的规范形式"""
    ps_number: int
    bf_factors: Tuple[int, ...]
    free_rank: int

    def key(self) -> Tuple[int, Tuple[int, ...], int]:
        return (self.ps_number, self.bf_factors, self.free_rank)

    @property
    def group(self) -> str:
        """群的文本形式，例如 0、Z/2、Z + Z/3"""
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.bf_factors]
        return " + ".join(parts) if parts else "0"


def bowen_franks_group(A: IntMatrix) -> Tuple[Tuple[int, ...], int]:
    """coker(I-A) 的不变因子（>1 的部分）与自由秩"""
    n = A.n
    I_minus_A = [[int(i == j) - A.rows[i][j] for j in range(n)] for i in range(n)]
    diag = smith_normal_form(I_minus_A).diagonal
    return tuple(d for d in diag if d > 1), sum(1 for d in diag if d == 0)


def flow_invariants(A: IntMatrix) -> FlowInvariants:
    """
    计算 Parry-Sullivan 数与 Bowen-Franks 群

    Args:
        A: 非负整数方阵

    Returns:
        FlowInvariants
    """
    n = A.n
    I_minus_A = [[int(i == j) - A.rows[i][j] for j in range(n)] for i in range(n)]
    ps = determinant(I_minus_A)
    factors, free_rank = bowen_franks_group(A)

    product = 1
    for d in factors:
        product *= d
    if free_rank == 0 and abs(ps) != product:
        raise AssertionError(f"|det(I-A)|={abs(ps)} but invariant factors multiply to {product}")
    if (ps == 0) != (free_rank > 0):
        raise AssertionError("det(I-A) = 0 must coincide with a free summand")
    return FlowInvariants(ps, factors, free_rank)


def is_trivial_sft(X: EdgeShift) -> bool:
    """本质图是一条简单圈（子移位只有一条有限轨道）"""
    g = X.graph
    return len(g.edges) == len(g.vertices) and is_irreducible(g)


@dataclass(frozen=True)
class FlowDecision:
    """Franks 判定结果"""
    equivalent: bool
    reason: str
    left: FlowInvariants = field(repr=False)
    right: FlowInvariants = field(repr=False)

    @property
    def verdict(self) -> str:
        return "equivalent" if self.equivalent else "not_equivalent"


def _guarded_shift(A: IntMatrix, name: str) -> EdgeShift:
    X = EdgeShift(trim_essential(A.to_graph()))
    if not is_irreducible(X.graph):
        raise NotIrreducible(f"{name} is reducible; the complete-invariant theorem needs an irreducible SFT")
    if is_trivial_sft(X):
        raise TrivialSFT(f"{name} is a single finite orbit; the complete-invariant theorem excludes it")
    return X


def franks_equivalent(A: IntMatrix, B: IntMatrix) -> FlowDecision:
    """
    判断两个非平凡不可约 SFT 是否流等价

    Raises:
        NotIrreducible: 任一输入（本质化后）可约
        TrivialSFT: 任一输入只是一条有限轨道
    """
    X = _guarded_shift(A, "A")
    Y = _guarded_shift(B, "B")
    left = flow_invariants(X.matrix)
    right = flow_invariants(Y.matrix)

    if left.ps_number != right.ps_number:
        reason = f"det(I-A) differs: {left.ps_number} vs {right.ps_number}"
    elif (left.bf_factors, left.free_rank) != (right.bf_factors, right.free_rank):
        reason = f"Bowen-Franks groups differ: {left.group} vs {right.group}"
    else:
        reason = f"det(I-A) = {left.ps_number} and Bowen-Franks group {left.group} agree"
    decision = FlowDecision(left.key() == right.key(), reason, left, right)
    logger.info(f"Franks 判定: {decision.verdict} ({reason})")
    return decision
