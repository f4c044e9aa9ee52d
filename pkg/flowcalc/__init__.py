"""
flowcalc - 有限型子移位的流等价计算器
精确算术计算流等价不变量、离散截面与流编码，并输出可验证的证书
"""

__version__ = "1.0.0"
__license__ = "MIT"
