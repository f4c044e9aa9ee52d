"""
异常定义

两条分支：
- FlowCalcInputError: 输入不合法或超出契约（CLI 退出码 2）
- GuardedRefusal: 定理假设不成立，过程拒绝给出结论（CLI 退出码 1）
"""
from typing import Any, Optional


class FlowCalcError(RuntimeError):
    """flowcalc 基础异常"""


class FlowCalcInputError(FlowCalcError):
    """输入/文件格式错误"""


class GuardedRefusal(FlowCalcError):
    """假设检查失败，拒绝而不是猜测"""


# ---------------------------------------------------------------- 输入错误

class ParseError(FlowCalcInputError):
    """文本文件解析失败，携带行号和出错的记号"""

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, token: Optional[str] = None):
        self.path = path
        self.line = line
        self.token = token
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        if token is not None:
            message = f"{message} (token {token!r})"
        super().__init__(f"{where}: {message}" if where else message)


class EmptyShift(FlowCalcInputError):
    """本质化后没有剩余的边"""


class NotEssential(FlowCalcInputError):
    """存在入度或出度为 0 的顶点"""


class UnknownSymbol(FlowCalcInputError):
    """符号不在字母表里"""


class BadPartition(FlowCalcInputError):
    """出边划分不是非空、互不相交且覆盖的"""


class PartialCode(FlowCalcInputError):
    """滑动块码在某个窗口上没有定义"""


class IncompleteTable(FlowCalcInputError):
    """局部常值函数的窗口表不完整"""


class MissingBlock(FlowCalcInputError):
    """字块码缺少某个出现过的返回块"""

    def __init__(self, block: Any):
        self.block = block
        super().__init__(f"no image for return block {block}")


class NonComposableImage(FlowCalcInputError):
    """像字不可拼接"""

    def __init__(self, blocks: Any, message: str = "images do not compose"):
        self.blocks = blocks
        super().__init__(f"{message}: {blocks}")


class EmptyImageWord(FlowCalcInputError):
    """像字为空"""


class OrbitMissesSection(FlowCalcInputError):
    """周期轨道不经过截面"""


class ResolutionMismatch(FlowCalcInputError):
    """β 的柱集无法细化到块图上"""


# ---------------------------------------------------------------- 拒绝

class NotIrreducible(GuardedRefusal):
    """图不是强连通的"""


class TrivialSFT(GuardedRefusal):
    """子移位只是一条有限轨道"""


class CycleObstruction(GuardedRefusal):
    """存在和不为零的圈，附带见证轨道与和值"""

    def __init__(self, witness: Any, total: Any):
        self.witness = witness
        self.total = total
        super().__init__(f"cycle {witness} sums to {total}, not 0")


class InvalidSection(GuardedRefusal):
    """截面不合法，附带避开截面的周期轨道"""

    def __init__(self, message: str, witness: Any = None):
        self.witness = witness
        super().__init__(message)


class NotDisjoint(GuardedRefusal):
    """两个截面在悬挂空间中相交"""


class NotIntertwining(GuardedRefusal):
    """返回系统之间的映射不与移位交换"""

    def __init__(self, witness: Any):
        self.witness = witness
        super().__init__(f"map does not intertwine on cycle {witness}")
