#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
PDO 层析：测量集规划、关联估计、R123 重建与理论对比

事件槽位：Q1 = B@t1（槽位 0），Q2 = A@t1（槽位 1），Q3 = A@t2（槽位 2）。
在 t1 与 t2 之间，A 经历 OTC 幺正变换 u（默认 I）。
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Tuple, Union

import numpy as np

import config
from utils.constants import (AXIS_LABELS, CARRIER_A, CARRIER_B, EVENT_Q1,
                             EVENT_Q2, EVENT_Q3, PAULI_MATRICES, TIME_T1,
                             TIME_T2)
from .errors import IncompleteQuorumError, InvalidArgumentError, NotADensityOperatorError
from .linalg import as_matrix, fidelity_pure, tensor
from .pauli import CorrelationTable, PauliString, all_strings, assemble, expand
from .pdo import (PhysicalityReport, PseudoDensityOperator, Provenance, marginal,
                  otc_pdo, physicality, projector_expectation, singlet_state,
                  werner)
from .simulator import (CountsTable, Measure, MeasurementTimeline,
                        OutcomeDistribution, PrepareUnitary, estimate_correlator,
                        exact_distribution, resample, sample_distribution)

TEMPORAL_AA = 'temporal_AA'
SPATIAL_BA_T1 = 'spatial_BA_t1'
SPATIAL_BA_T2 = 'spatial_BA_t2'
THREEPOINT = 'threepoint'
ENSEMBLE_NAMES = (TEMPORAL_AA, SPATIAL_BA_T1, SPATIAL_BA_T2, THREEPOINT)

ZERO_FILL = 'zero_fill'

# (载体, 时间) -> PDO 槽位
EVENT_SLOTS = {
    (CARRIER_B, TIME_T1): 0,
    (CARRIER_A, TIME_T1): 1,
    (CARRIER_A, TIME_T2): 2,
}
SLOT_EVENTS = (EVENT_Q1, EVENT_Q2, EVENT_Q3)

CountsLike = Union[CountsTable, OutcomeDistribution]


def setting_label(measures) -> str:
    return ' '.join(m.label for m in measures)


@dataclass(frozen=True)
class Ensemble:
    name: str
    settings: Tuple[Tuple[Measure, ...], ...]
    shots: int

    def labels(self) -> List[str]:
        return [setting_label(s) for s in self.settings]


@dataclass(frozen=True)
class QuorumPlan:
    ensembles: Tuple[Ensemble, ...]

    def settings(self) -> List[Tuple[str, Tuple[Measure, ...]]]:
        """按计划顺序列出 (集合名, 设置)；列表下标即随机子流编号"""
        return [(e.name, s) for e in self.ensembles for s in e.settings]

    def labels(self) -> List[str]:
        return [setting_label(s) for _, s in self.settings()]

    def ensemble(self, name: str) -> Ensemble:
        for e in self.ensembles:
            if e.name == name:
                return e
        raise InvalidArgumentError(f"测量集中没有 {name}")

    @property
    def total_settings(self) -> int:
        return sum(len(e.settings) for e in self.ensembles)


def build_quorum(shots_per_setting: int) -> QuorumPlan:
    """四个系综，共 9+9+9+9 = 36 个设置"""
    if shots_per_setting < 1:
        raise InvalidArgumentError("shots_per_setting 必须 >= 1")

    def A(time, axis):
        return Measure(CARRIER_A, time, axis)

    def B(axis):
        return Measure(CARRIER_B, TIME_T1, axis)

    temporal = tuple((A(TIME_T1, a), A(TIME_T2, b)) for a in AXIS_LABELS for b in AXIS_LABELS)
    spatial_t1 = tuple((B(b), A(TIME_T1, a)) for b in AXIS_LABELS for a in AXIS_LABELS)
    spatial_t2 = tuple((B(b), A(TIME_T2, a)) for b in AXIS_LABELS for a in AXIS_LABELS)
    # 顺序测量只取对易的一对：A 在 t1 与 t2 的测量轴相同
    threepoint = tuple((B(b), A(TIME_T1, a), A(TIME_T2, a)) for b in AXIS_LABELS for a in AXIS_LABELS)

    return QuorumPlan(ensembles=(
        Ensemble(TEMPORAL_AA, temporal, shots_per_setting),
        Ensemble(SPATIAL_BA_T1, spatial_t1, shots_per_setting),
        Ensemble(SPATIAL_BA_T2, spatial_t2, shots_per_setting),
        Ensemble(THREEPOINT, threepoint, shots_per_setting),
    ))


def build_timeline(measures, source_state=None, u=None) -> MeasurementTimeline:
    """按时间排列测量；A 的 OTC 幺正变换插在 A@t2 测量之前"""
    u = PAULI_MATRICES['I'] if u is None else as_matrix(u)
    events = [m for m in measures if m.time_tag == TIME_T1]
    events.append(PrepareUnitary(CARRIER_A, u))
    events.extend(m for m in measures if m.time_tag != TIME_T1)
    return MeasurementTimeline(events=events, initial_state=source_state)


def acquire(plan: QuorumPlan, visibility: float = 1.0, u=None, mode: str = 'sampled',
            seed: int = 0, workers: int = None) -> Dict[str, CountsLike]:
    """
    为测量集中的每个设置生成数据

    mode='exact' 返回精确分布（无限次采样极限），mode='sampled' 返回计数表。
    第 i 个设置的随机子流由 (seed, i) 派生，与并行调度无关。
    """
    if mode not in ('exact', 'sampled'):
        raise InvalidArgumentError(f"未知模式 {mode!r}")
    state = werner(visibility)
    jobs = []
    for index, (name, measures) in enumerate(plan.settings()):
        shots = plan.ensemble(name).shots
        jobs.append((index, measures, shots))

    def run(job):
        index, measures, shots = job
        dist = exact_distribution(build_timeline(measures, state, u))
        if mode == 'exact':
            return setting_label(measures), dist
        return setting_label(measures), sample_distribution(dist, shots, seed, setting_index=index)

    workers = config.SAMPLING_WORKERS if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    return dict(results)


def _slot_of(m: Measure) -> int:
    return EVENT_SLOTS[(m.carrier, m.time_tag)]


def _combine(estimates: List[Tuple[float, float]]) -> Tuple[float, float]:
    """逆方差加权平均；存在零方差估计时取它们的简单平均"""
    exact = [v for v, e in estimates if e == 0.0]
    if exact:
        return float(np.mean(exact)), 0.0
    weights = np.array([1.0 / (e * e) for _, e in estimates])
    values = np.array([v for v, _ in estimates])
    value = float(np.sum(weights * values) / np.sum(weights))
    return value, float(1.0 / np.sqrt(np.sum(weights)))


def check_quorum(counts: Mapping[str, CountsLike], plan: QuorumPlan):
    missing = [label for label in plan.labels() if label not in counts]
    if missing:
        raise IncompleteQuorumError(missing)


def reconstruct_table(counts: Mapping[str, CountsLike], plan: QuorumPlan = None) -> Tuple[CorrelationTable, List[str]]:
    """
    由测量数据组装三槽位相关表

    Returns:
        (相关表, 被补零的三体 Pauli 串列表)
    """
    plan = build_quorum(1) if plan is None else plan
    check_quorum(counts, plan)
    table = CorrelationTable(n_slots=3)
    table.set('III', 1.0, 0.0)

    # 单体：取自空间系综的单事件边缘分布，按系综顺序收集后逆方差合并
    one_body: Dict[PauliString, List[Tuple[float, float]]] = {}
    for name in (SPATIAL_BA_T1, SPATIAL_BA_T2):
        for measures in plan.ensemble(name).settings:
            data = counts[setting_label(measures)]
            for i, m in enumerate(measures):
                s = PauliString.local(3, {_slot_of(m): m.axis_label})
                one_body.setdefault(s, []).append(estimate_correlator(data, [i]))
    for s, estimates in one_body.items():
        table.set(s, *_combine(estimates))

    # 两体：系综 1-3 各提供一对槽位
    for name in (TEMPORAL_AA, SPATIAL_BA_T1, SPATIAL_BA_T2):
        for measures in plan.ensemble(name).settings:
            data = counts[setting_label(measures)]
            s = PauliString.local(3, {_slot_of(m): m.axis_label for m in measures})
            table.set(s, *estimate_correlator(data, [0, 1]))

    # 三体：只有 A 轴相同的 9 个串可测，其余 18 个补零
    for measures in plan.ensemble(THREEPOINT).settings:
        data = counts[setting_label(measures)]
        s = PauliString.local(3, {_slot_of(m): m.axis_label for m in measures})
        table.set(s, *estimate_correlator(data, [0, 1, 2]))
    zero_filled = []
    for s in all_strings(3):
        if s.weight == 3 and s not in table:
            table.set(s, 0.0)
            zero_filled.append(str(s))
    return table, zero_filled


@dataclass
class ReconstructionReport:
    pdo: PseudoDensityOperator
    table: CorrelationTable
    theory: PseudoDensityOperator
    max_coefficient_error: float
    fidelities: Dict[str, float]
    completion_policy: str = ZERO_FILL
    zero_filled: List[str] = field(default_factory=list)
    marginals: Dict[str, PseudoDensityOperator] = field(default_factory=dict)
    physicality: Dict[str, PhysicalityReport] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def threepoint_estimates(self) -> Dict[str, Tuple[float, float]]:
        """9 个直接测得的三体关联 (value, stderr)"""
        result = {}
        for s, c in self.table.items():
            if s.weight == 3 and str(s) not in self.zero_filled:
                result[str(s)] = (c.value, c.stderr or 0.0)
        return result


def _pair_key(i: int, j: int) -> str:
    return f"R{i + 1}{j + 1}"


def marginal_fidelity(r: PseudoDensityOperator, psi, notes: List[str] = None) -> float:
    """
    物理边缘态对目标纯态的保真度

    有限统计下的重建边缘态可能带有微小负特征值；此时退回到直接重叠 <ψ|R|ψ>，并记录说明。
    """
    try:
        return fidelity_pure(r.matrix, psi)
    except NotADensityOperatorError:
        value = min(1.0, max(0.0, projector_expectation(r, psi)))
        if notes is not None:
            notes.append(f"{'-'.join(r.events)} 边缘态有统计噪声导致的负特征值，保真度按 <ψ|R|ψ> 计算")
        return value


def reconstruct(counts: Mapping[str, CountsLike], plan: QuorumPlan = None, u=None) -> ReconstructionReport:
    """
    重建 R123，并与 otc_pdo(u) 的理论值比较

    不做任何正定性投影：PDO 的负特征值是信号。
    """
    table, zero_filled = reconstruct_table(counts, plan)
    pdo = PseudoDensityOperator(SLOT_EVENTS, assemble(table), Provenance.RECONSTRUCTED)
    theory = otc_pdo(u)
    theory_table = expand(theory.matrix, drop_zeros=False)
    error = max(abs(table.get(s) - theory_table.get(s)) for s in all_strings(3))

    notes: List[str] = []
    marginals = {}
    for i in range(3):
        for j in range(i + 1, 3):
            marginals[_pair_key(i, j)] = marginal(pdo, (SLOT_EVENTS[i], SLOT_EVENTS[j]))

    u_matrix = PAULI_MATRICES['I'] if u is None else as_matrix(u)
    target_12 = singlet_state()
    target_13 = tensor(np.eye(2), u_matrix) @ singlet_state()
    fidelities = {
        'F12': marginal_fidelity(marginals['R12'], target_12, notes),
        'F13': marginal_fidelity(marginals['R13'], target_13, notes),
    }
    checks = {'R123': physicality(pdo)}
    checks.update({k: physicality(m) for k, m in marginals.items()})

    return ReconstructionReport(
        pdo=pdo,
        table=table,
        theory=theory,
        max_coefficient_error=float(error),
        fidelities=fidelities,
        zero_filled=zero_filled,
        marginals=marginals,
        physicality=checks,
        notes=notes,
    )


def bootstrap(counts: Mapping[str, CountsLike], statistic: Callable[[CorrelationTable], float],
              plan: QuorumPlan = None, resamples: int = None, seed: int = 0,
              workers: int = None) -> Tuple[float, np.ndarray]:
    """
    对测量集计数做多项式重采样，返回 (统计量标准差, 各次取值)

    第 r 次重采样使用 (seed, r) 派生的随机流。精确分布没有统计涨落，直接返回 0。
    """
    plan = build_quorum(1) if plan is None else plan
    resamples = config.BOOTSTRAP_RESAMPLES if resamples is None else resamples
    if all(isinstance(c, OutcomeDistribution) for c in counts.values()) or resamples < 2:
        table, _ = reconstruct_table(counts, plan)
        return 0.0, np.array([statistic(table)])

    labels = plan.labels()

    def one(index: int) -> float:
        rng = np.random.default_rng(np.random.SeedSequence(
            entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(0xB007, index)))
        drawn = {label: resample(counts[label], rng) if isinstance(counts[label], CountsTable)
                 else counts[label] for label in labels}
        table, _ = reconstruct_table(drawn, plan)
        return statistic(table)

    workers = config.SAMPLING_WORKERS if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.array(list(pool.map(one, range(resamples))))
    else:
        values = np.array([one(r) for r in range(resamples)])
    return float(np.std(values, ddof=1)), values


@dataclass(frozen=True)
class DisturbanceReport:
    """同一关联 <Z_B Z_A(t2)>：t1 不测量 vs t1 插入测量后对结果求平均"""
    undisturbed: float
    disturbed: float
    intervening_axis: str
    visibility: float

    def as_pair(self) -> Tuple[float, float]:
        return self.undisturbed, self.disturbed

    def to_json(self) -> Dict:
        return {
            'undisturbed': self.undisturbed,
            'disturbed': self.disturbed,
            'intervening_axis': self.intervening_axis,
            'visibility': self.visibility,
        }


def disturbance_demo(visibility: float = 1.0, intervening: str = 'X', axis: str = 'Z') -> DisturbanceReport:
    """
    演示对时间自由度求迹不等于"测量后求平均"

    (a) A 在 t1 不测量：<Z_B Z_A(t2)> = -v
    (b) A 在 t1 先测 intervening 轴，再对其结果求平均：X 时为 0，Z 时不变
    """
    state = werner(visibility)
    b = Measure(CARRIER_B, TIME_T1, axis)
    a2 = Measure(CARRIER_A, TIME_T2, axis)
    plain = exact_distribution(MeasurementTimeline(events=[b, a2], initial_state=state))
    undisturbed, _ = estimate_correlator(plain, [0, 1])

    a1 = Measure(CARRIER_A, TIME_T1, intervening)
    probed = exact_distribution(MeasurementTimeline(events=[b, a1, a2], initial_state=state))
    disturbed, _ = estimate_correlator(probed, [0, 2])
    return DisturbanceReport(
        undisturbed=float(undisturbed),
        disturbed=float(disturbed),
        intervening_axis=a1.axis_label,
        visibility=float(visibility),
    )
