#!/usr/bin/env python3
"""
快速启动脚本
"""
from flowcalc.cli import main

if __name__ == "__main__":
    main()
