#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
实验主流程：测量集 → 模拟/精确计算 → PDO 层析 → CHSH 与单配性 → 报告
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

import config
from utils import colors
from utils.colors import Colors
from .bell import (PAIR_12, PAIR_13, PAIR_23, ChshResult, MonogamyReport,
                   chsh_from_counts, chsh_optimal, default_settings,
                   monogamy_check, pair_name, quartet_measures)
from .errors import PdoLabError
from .pauli import CorrelationTable, bloch_rotation, correlation_3x3
from .pdo import PhysicalityReport, otc_pdo, physicality, two_time_mixed, werner
from .spec import ExperimentSpec, spec_hash
from .simulator import exact_distribution, sample_distribution
from .tomography import (DisturbanceReport, QuorumPlan, ReconstructionReport,
                         acquire, bootstrap, build_quorum, build_timeline,
                         disturbance_demo, reconstruct)

STAGES = ('tomography', 'bell', 'disturbance')


@dataclass
class RunReport:
    spec: ExperimentSpec
    provenance: Dict[str, object]
    plan: QuorumPlan
    counts: Dict[str, object] = field(default_factory=dict)
    reconstruction: Optional[ReconstructionReport] = None
    chsh: Dict[Tuple[str, str], ChshResult] = field(default_factory=dict)
    chsh_counts: Dict[Tuple[str, str], list] = field(default_factory=dict)
    monogamy: Optional[MonogamyReport] = None
    physicality: Dict[str, PhysicalityReport] = field(default_factory=dict)
    disturbance: Optional[DisturbanceReport] = None


def _c13_statistic(table: CorrelationTable) -> float:
    return chsh_optimal(correlation_3x3(table, 0, 2))[0]


class ExperimentRunner:
    """一体化实验运行器"""

    def __init__(self, spec: ExperimentSpec, stages=STAGES, verbose: bool = True):
        unknown = [s for s in stages if s not in STAGES]
        if unknown:
            raise ValueError(f"未知阶段: {unknown}")
        self.spec = spec
        self.stages = tuple(stages)
        self.verbose = verbose
        self._step = 0
        self._stage = None

    @property
    def step_count(self) -> int:
        return self._step

    def _header(self, title: str):
        self._step += 1
        self._stage = title
        if self.verbose:
            colors.step(self._step, title)

    def _say(self, message: str):
        if self.verbose:
            print(message)

    def _ok(self, message: str):
        if self.verbose:
            colors.ok(message)

    def run(self) -> RunReport:
        """运行完整流程；同一 (spec, seed) 的结果完全确定"""
        spec = self.spec
        if self.verbose:
            colors.banner("开类时曲线 PDO 模拟与层析工具")
            print(f"\n配置:")
            print(f"  模式: {spec.mode}")
            print(f"  可见度 V: {spec.visibility}")
            print(f"  OTC 幺正变换: {spec.otc_unitary if isinstance(spec.otc_unitary, str) else '自定义矩阵'}")
            print(f"  每设置采样数: {spec.shots_per_setting}")
            print(f"  随机种子: {spec.seed}")

        try:
            report = self._run(spec)
        except PdoLabError as e:
            # 失败阶段随异常向上传递，CLI 据此给出上下文
            e.stage = self._stage
            if self.verbose:
                colors.error(f"【{self._stage}】运行过程中发生错误: {e}")
            raise

        if self.verbose:
            colors.banner("✅ 运行完成！", Colors.GREEN)
        return report

    def _run(self, spec: ExperimentSpec) -> RunReport:
        u = spec.unitary_matrix()
        exact = spec.mode == 'exact'

        # 步骤1: 测量集
        self._header("构建层析测量集")
        plan = build_quorum(max(1, spec.shots_per_setting))
        for e in plan.ensembles:
            self._say(f"  {e.name:<14} {len(e.settings)} 个设置")
        self._ok(f"共 {plan.total_settings} 个设置")

        report = RunReport(
            spec=spec,
            provenance={
                'spec_hash': spec_hash(spec),
                'seed': spec.seed,
                'tool_version': config.TOOL_VERSION,
                'mode': spec.mode,
            },
            plan=plan,
        )

        # 步骤2: 数据
        self._header("精确计算结果分布" if exact else "采样模拟测量")
        report.counts = acquire(plan, spec.visibility, u, spec.mode, spec.seed)
        self._ok(f"已获得 {len(report.counts)} 个设置的数据")

        # 步骤3: 重建
        self._header("PDO 层析重建")
        rec = reconstruct(report.counts, plan, u)
        report.reconstruction = rec
        self._ok(f"最大系数误差: {rec.max_coefficient_error:.3e}")
        self._say(f"  F12 = {rec.fidelities['F12']:.4f}, F13 = {rec.fidelities['F13']:.4f}")
        self._say(f"  重建 R123 最小特征值: {rec.physicality['R123'].min_eigenvalue:+.4f}")
        for note in rec.notes:
            if self.verbose:
                colors.warn(note)

        report.physicality = {
            'R12_two_time_canonical': physicality(two_time_mixed()),
            'R123_canonical': physicality(otc_pdo(u)),
        }
        report.physicality.update({f"{k}_reconstructed": v for k, v in rec.physicality.items()})

        if 'bell' in self.stages:
            self._header("CHSH 与纠缠单配性")
            self._run_bell(report, u, exact)

        if 'disturbance' in self.stages:
            self._header("时间偏迹与测量平均的差异")
            report.disturbance = disturbance_demo(spec.visibility)
            a, b = report.disturbance.as_pair()
            self._say(f"  无 t1 测量: <Z_B Z_A(t2)> = {a:+.4f}")
            self._say(f"  t1 插入 X 测量后平均: <Z_B Z_A(t2)> = {b:+.4f}")
        return report

    def _run_bell(self, report: RunReport, u: np.ndarray, exact: bool):
        spec = report.spec
        rotation = bloch_rotation(u)
        state = werner(spec.visibility)

        # CHSH 四元组的随机子流编号紧接在测量集设置之后
        stream = report.plan.total_settings
        for pair in (PAIR_12, PAIR_23):
            settings = default_settings(pair)
            if pair == PAIR_23:
                settings = settings.rotated(np.eye(3), rotation)
            tables = []
            for measures in quartet_measures(pair, settings):
                dist = exact_distribution(build_timeline(measures, state, u))
                if exact:
                    tables.append(dist)
                else:
                    tables.append(sample_distribution(dist, spec.shots_per_setting, spec.seed,
                                                      setting_index=stream))
                stream += 1
            report.chsh_counts[pair] = tables
            report.chsh[pair] = chsh_from_counts(tables, settings, pair)

        # C13 只能从重建的边缘态得到（直接测量需要 t1 时刻不碰 A）
        table = report.reconstruction.table
        value, best = chsh_optimal(correlation_3x3(table, 0, 2))
        err, _ = bootstrap(report.counts, _c13_statistic, report.plan, seed=spec.seed)
        report.chsh[PAIR_13] = ChshResult(value=value, stderr=err, settings_used=best,
                                          source='reconstructed_marginal', pair=PAIR_13)

        for pair, result in report.chsh.items():
            self._say(f"  {pair_name(pair)} = {result.value:.4f} ± {result.stderr:.4f}  ({result.source})")

        report.monogamy = monogamy_check(report.chsh)
        for key, (total, err) in report.monogamy.pair_sums.items():
            sigma = report.monogamy.sigmas[key]
            sigma_text = f"{sigma:.1f}σ" if sigma is not None else "精确"
            mark = f"{Colors.RED}违反{Colors.ENDC}" if total > report.monogamy.bound else "满足"
            self._say(f"  {key[0]} + {key[1]} = {total:.4f} ± {err:.4f}  [{mark} 界 4, {sigma_text}]")
