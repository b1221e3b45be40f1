#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行入口

用法：
    python cli.py run <spec.json> [--seed N] [--shots N] [--visibility V] [--exact | --sampled] [--out DIR]
    python cli.py tomo <spec.json>          # 只做 PDO 层析
    python cli.py chsh <spec.json>          # 层析 + CHSH/单配性
    python cli.py demo-disturbance [--visibility V]

示例：
    python cli.py run specs/calibration.json
    python cli.py run specs/ideal_exact.json --out out_exact
    PDOLAB_SEED=7 python cli.py chsh specs/calibration.json --shots 20000

退出码：0 成功；2 实验描述或参数错误；3 测量集不完整；4 数值失败或其他内部错误。
"""

import argparse
import sys
from typing import Dict, List, Optional, Sequence, Tuple

import config
from utils import colors
from core.errors import IncompleteQuorumError, PdoLabError, SpecError
from core.experiment import STAGES, ExperimentRunner, RunReport
from core.report import ReportGenerator
from core.spec import ExperimentSpec, parse_spec
from core.tomography import disturbance_demo

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_QUORUM = 3
EXIT_INTERNAL = 4

COMMAND_STAGES = {
    'run': STAGES,
    'tomo': ('tomography',),
    'chsh': ('tomography', 'bell'),
}


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, SpecError):
        return EXIT_SPEC
    if isinstance(error, IncompleteQuorumError):
        return EXIT_QUORUM
    return EXIT_INTERNAL


def load_spec(path: str, overrides: Dict = None) -> ExperimentSpec:
    """读取实验描述文件；命令行参数优先于文件内容"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise SpecError(f"无法读取实验描述文件 {path}: {e.strerror}", field='spec_file') from e
    spec = parse_spec(text)
    return spec.with_overrides(**(overrides or {}))


def run_experiment(spec: ExperimentSpec, stages: Sequence[str] = STAGES,
                   output_dir: str = None, verbose: bool = True) -> Tuple[RunReport, Dict]:
    """运行实验并写出报告，返回 (RunReport, report.json 内容)"""
    output_dir = config.OUTPUT_DIR if output_dir is None else output_dir
    runner = ExperimentRunner(spec, stages=stages, verbose=verbose)
    run = runner.run()
    if verbose:
        colors.step(runner.step_count + 1, "生成报告")
    report = ReportGenerator(output_dir, spec.outputs, verbose=verbose).generate(run)
    return run, report


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=None, help='随机种子（覆盖文件与 PDOLAB_SEED）')
    common.add_argument('--shots', type=int, default=None, help='每个测量设置的采样次数')
    common.add_argument('--visibility', type=float, default=None, help='Werner 源可见度 V ∈ [0, 1]')
    mode = common.add_mutually_exclusive_group()
    mode.add_argument('--exact', action='store_const', const='exact', dest='mode',
                      help='精确模式：用无限采样极限代替采样')
    mode.add_argument('--sampled', action='store_const', const='sampled', dest='mode',
                      help='采样模式（覆盖文件中的 "mode": "exact"）')
    common.add_argument('--out', default=None, help=f'输出目录（默认 {config.OUTPUT_DIR}）')
    common.add_argument('--quiet', action='store_true', help='只输出最终结论')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog='pdolab',
        description='开类时曲线（OTC）赝密度算符模拟、层析与纠缠单配性检验',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    for name, text in (('run', '完整流程：层析 + CHSH + 单配性 + 扰动演示'),
                       ('tomo', '只做 PDO 层析重建'),
                       ('chsh', '层析 + CHSH 与单配性检验')):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument('spec_file', help='JSON 实验描述文件')

    p = sub.add_parser('demo-disturbance', parents=[common],
                       help='演示时间偏迹与"测量后平均"的差异')
    p.add_argument('--axis', default='Z', help='被比较的关联轴（默认 Z）')
    return parser


def _print_disturbance(visibility: float, axis: str):
    colors.banner("时间偏迹 vs 测量后平均")
    for intervening in ('X', 'Y', 'Z'):
        r = disturbance_demo(visibility, intervening=intervening, axis=axis)
        changed = abs(r.undisturbed - r.disturbed) > config.PROBABILITY_TOL
        mark = "⚠️  被扰动" if changed else "✓ 不变"
        print(f"  t1 插入 {intervening} 测量: "
              f"<{axis}_B {axis}_A(t2)> {r.undisturbed:+.4f} -> {r.disturbed:+.4f}  {mark}")


def main(argv: Optional[List[str]] = None) -> int:
    """命令行入口，返回退出码"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_SPEC

    try:
        if args.command == 'demo-disturbance':
            visibility = config.DEFAULT_VISIBILITY if args.visibility is None else args.visibility
            if not 0.0 <= visibility <= 1.0:
                raise SpecError(f"可见度必须在 [0, 1] 内，实际 {visibility}", field='--visibility')
            _print_disturbance(visibility, args.axis)
            return EXIT_OK

        overrides = {
            'seed': args.seed,
            'shots_per_setting': args.shots,
            'visibility': args.visibility,
            'mode': args.mode,
        }
        spec = load_spec(args.spec_file, overrides)
        if args.shots is not None and spec.mode == 'exact':
            colors.warn("精确模式下 --shots 不起作用；需要采样请加 --sampled")
        run, report = run_experiment(spec, COMMAND_STAGES[args.command], args.out, verbose=not args.quiet)
        print(f"\nbody_sha256: {report['body_sha256']}")
        return EXIT_OK

    except PdoLabError as e:
        stage = getattr(e, 'stage', None)
        where = f"（{stage}）" if stage else ""
        colors.error(f"{type(e).__name__}{where}: {e}")
        return exit_code_for(e)
    except Exception as e:
        colors.error(f"运行过程中发生未预期的错误: {e}")
        import traceback
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
