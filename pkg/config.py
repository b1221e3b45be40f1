#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
配置文件 - 在这里修改数值容差、默认实验参数和输出位置

各模块在调用时通过 `import config` 读取这些常量，
因此运行时直接赋值 `config.XXX = ...` 即可覆盖。
"""

# ============================================================================
# 必须配置的参数
# ============================================================================

# 校准实验：Werner 可见度 V，使 F = (1+3V)/4 ≈ 0.964
CALIBRATION_VISIBILITY = 0.952

# 校准实验的随机种子（最低优先级的种子来源在环境变量之后）
CALIBRATION_SEED = 42

# 每个测量设置的默认采样次数
DEFAULT_SHOTS = 100000


# ============================================================================
# 可选配置参数
# ============================================================================

# 默认光源可见度与运行模式（exact / sampled）
DEFAULT_VISIBILITY = 1.0
DEFAULT_MODE = "sampled"

# 默认输出目录
OUTPUT_DIR = "pdolab_output"

# 固定的输出文件名
REPORT_FILENAME = "report.json"
COEFFICIENTS_FILENAME = "coefficients.csv"
COUNTS_FILENAME = "counts.csv"
SUMMARY_FILENAME = "summary.csv"

# 环境变量种子（优先级最低）
SEED_ENV_VAR = "PDOLAB_SEED"

# 数值容差
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
UNITARY_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
PHYSICALITY_TOL = 1e-8
DENSITY_TOL = 1e-8
PROBABILITY_TOL = 1e-12
AXIS_NORM_TOL = 1e-10

# 采样：固定批大小决定子随机流的划分，并行度不影响结果
SAMPLING_BATCH_SIZE = 50000
SAMPLING_WORKERS = 1

# C13 的 bootstrap 重采样次数
BOOTSTRAP_RESAMPLES = 200

# 参考实验值（仅用于 summary.csv 对照）: name -> (value, uncertainty)
EXPERIMENT_REFERENCE = {
    "C12": (2.69, 0.02),
    "C23": (2.84, 0.02),
    "C13": (2.73, None),
    "C12+C23": (5.52, 0.03),
    "C12+C13": (5.42, 0.07),
    "C23+C13": (5.55, 0.07),
    "F12": (0.964, None),
    "F13": (0.963, None),
}

TOOL_VERSION = "0.3.0"
