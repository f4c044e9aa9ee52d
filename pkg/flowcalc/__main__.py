#!/usr/bin/env python3
"""
flowcalc - 模块入口
用法: python -m flowcalc <子命令> ...
"""
from .cli import main

if __name__ == "__main__":
    main()
