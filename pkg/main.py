#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
主入口文件 - 运行此文件即可复现校准实验（参数见 config.py）
"""

import sys

from cli import EXIT_OK, exit_code_for, run_experiment
from config import CALIBRATION_SEED, CALIBRATION_VISIBILITY, DEFAULT_SHOTS, OUTPUT_DIR
from core.errors import PdoLabError
from core.spec import ExperimentSpec


def main():
    """主函数"""
    print("=" * 80)
    print("开类时曲线 PDO 校准实验")
    print("=" * 80)

    spec = ExperimentSpec(
        seed=CALIBRATION_SEED,
        visibility=CALIBRATION_VISIBILITY,
        shots_per_setting=DEFAULT_SHOTS,
    )

    try:
        run_experiment(spec, output_dir=OUTPUT_DIR)
    except PdoLabError as e:
        print(f"\n❌ 校准实验失败: {e}")
        sys.exit(exit_code_for(e))

    print("\n✅ 校准实验完成！")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
