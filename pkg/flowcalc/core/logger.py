"""
日志模块
"""
import logging
import sys

from .config import Config


def get_logger(name: str = "flowcalc") -> logging.Logger:
    """获取配置好的日志记录器（输出到 stderr，stdout 只留给报告）"""
    logger = logging.getLogger(name)

    if not logger.handlers:
        level = getattr(logging, Config.LOG_LEVEL.upper(), logging.WARNING)
        logger.setLevel(level)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.DEBUG)

        formatter = logging.Formatter(
            "%(asctime)s | %(levelname)s | %(message)s",
            datefmt="%H:%M:%S"
        )
        console_handler.setFormatter(formatter)

        logger.addHandler(console_handler)

    return logger


# 全局日志实例
logger = get_logger()
