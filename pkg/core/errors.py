#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
异常定义
"""

from typing import List, Optional


class PdoLabError(Exception):
    """所有工具异常的基类"""


class InvalidArgumentError(PdoLabError, ValueError):
    """参数不满足前置条件（维度不匹配、非厄米、非幺正等）"""


class NotADensityOperatorError(InvalidArgumentError):
    """输入不是半正定的密度算符"""


class IncompleteQuorumError(PdoLabError):
    """计数缺少部分测量设置"""

    def __init__(self, missing: List[str]):
        self.missing = list(missing)
        super().__init__(f"测量集不完整，缺少 {len(self.missing)} 个设置: {', '.join(self.missing)}")


class SpecError(PdoLabError):
    """实验描述文件的语法或语义错误"""

    def __init__(self, message: str, field: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.field = field
        self.line = line
        self.column = column
        location = ''
        if field:
            location = f" [{field}]"
        elif line is not None:
            location = f" [行 {line}, 列 {column}]"
        super().__init__(f"{message}{location}")


class NumericalError(PdoLabError):
    """内部数值失败（例如 Jacobi 迭代不收敛）"""
