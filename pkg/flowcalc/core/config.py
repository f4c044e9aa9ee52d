"""
配置管理模块
"""
import os
from typing import Optional

from dotenv import load_dotenv

# 允许本地 .env 覆盖默认值
load_dotenv()


def _env_flag(name: str, default: str = "0") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class Config:
    """配置类"""

    # 日志
    LOG_LEVEL = os.getenv("FLOWCALC_LOG_LEVEL", "WARNING")

    # 随机性质测试的种子（复现用）
    SEED = int(os.getenv("FLOWCALC_SEED", "20240607"))

    # 有界验证的周期上限
    VERIFY_PERIOD = int(os.getenv("FLOWCALC_VERIFY_PERIOD", "6"))
    CHECK_PERIOD = int(os.getenv("FLOWCALC_CHECK_PERIOD", "8"))

    # 窗口枚举的规模保护
    MAX_WINDOW_WORDS = int(os.getenv("FLOWCALC_MAX_WINDOW_WORDS", "200000"))

    # 长时间搜索是否显示进度条
    SHOW_PROGRESS = _env_flag("FLOWCALC_SHOW_PROGRESS")


def normalize_path(path) -> Optional[str]:
    """路径统一成 str；argparse 的 nargs 可能给出列表"""
    if path is None:
        return None
    if isinstance(path, (list, tuple)):
        path = path[0] if path else None
    if path is None:
        return None
    return str(path)
