#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
终端颜色与步骤输出工具
"""

import os
import sys


class Colors:
    """终端颜色"""
    HEADER = '\033[95m'
    BLUE = '\033[94m'
    CYAN = '\033[96m'
    GREEN = '\033[92m'
    YELLOW = '\033[93m'
    RED = '\033[91m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'

    @classmethod
    def disable(cls):
        """关闭颜色（输出被重定向或设置了 NO_COLOR 时）"""
        for name in ('HEADER', 'BLUE', 'CYAN', 'GREEN', 'YELLOW', 'RED', 'ENDC', 'BOLD'):
            setattr(cls, name, '')


if os.environ.get('NO_COLOR') or not sys.stdout.isatty():
    Colors.disable()


def banner(title: str, color: str = None):
    """打印粗体标题横幅"""
    color = color if color is not None else Colors.HEADER
    print(f"\n{Colors.BOLD}{color}{'=' * 80}{Colors.ENDC}")
    print(f"{Colors.BOLD}{color}{title}{Colors.ENDC}")
    print(f"{Colors.BOLD}{color}{'=' * 80}{Colors.ENDC}")


def step(index: int, title: str):
    """打印步骤标题，例如 【步骤3】PDO 层析重建"""
    print(f"\n{Colors.HEADER}【步骤{index}】{title}{Colors.ENDC}")
    print("-" * 80)


def ok(message: str):
    print(f"{Colors.GREEN}✓ {message}{Colors.ENDC}")


def warn(message: str):
    print(f"{Colors.YELLOW}⚠️  {message}{Colors.ENDC}")


def error(message: str):
    print(f"{Colors.RED}❌ {message}{Colors.ENDC}")
