#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
CHSH 评估与纠缠单配性检验

CHSH 组合 S = E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)，E(a,b) = aᵀ T b。
单配性界：共享一个事件的两对 C_mk + C_nk <= 4。
"""

import itertools
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

import config
from utils.constants import (CARRIER_A, CARRIER_B, EVENT_Q1, EVENT_Q2,
                             EVENT_Q3, TIME_T1, TIME_T2)
from .errors import InvalidArgumentError
from .pauli import CorrelationTable, correlation_3x3
from .simulator import CountsTable, Measure, OutcomeDistribution, estimate_correlator

MONOGAMY_BOUND = 4.0
CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * np.sqrt(2.0)

PAIR_12 = (EVENT_Q1, EVENT_Q2)
PAIR_23 = (EVENT_Q2, EVENT_Q3)
PAIR_13 = (EVENT_Q1, EVENT_Q3)

# 事件 -> (载体, 时间)
EVENT_SITES = {
    EVENT_Q1: (CARRIER_B, TIME_T1),
    EVENT_Q2: (CARRIER_A, TIME_T1),
    EVENT_Q3: (CARRIER_A, TIME_T2),
}


def pair_name(pair: Sequence[str]) -> str:
    """('Q1@t1', 'Q2@t1') -> 'C12'"""
    return 'C' + ''.join(e.split('@')[0].lstrip('Q') for e in pair)


def _unit(v) -> np.ndarray:
    v = np.array(v, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise InvalidArgumentError(f"测量方向必须是三维向量，实际 {v!r}")
    return v


@dataclass(frozen=True)
class ChshSettings:
    side1_axes: Tuple[np.ndarray, np.ndarray]
    side2_axes: Tuple[np.ndarray, np.ndarray]

    def __post_init__(self):
        axes1 = tuple(_unit(a) for a in self.side1_axes)
        axes2 = tuple(_unit(b) for b in self.side2_axes)
        if len(axes1) != 2 or len(axes2) != 2:
            raise InvalidArgumentError("每一方需要恰好两个测量方向")
        for v in axes1 + axes2:
            if abs(np.linalg.norm(v) - 1.0) > config.AXIS_NORM_TOL:
                raise InvalidArgumentError(f"测量方向未归一化: {v}")
        object.__setattr__(self, 'side1_axes', axes1)
        object.__setattr__(self, 'side2_axes', axes2)

    def quartet(self) -> List[Tuple[np.ndarray, np.ndarray, float]]:
        """四个 (a, b, 符号)"""
        (a1, a2), (b1, b2) = self.side1_axes, self.side2_axes
        return [(a1, b1, 1.0), (a1, b2, 1.0), (a2, b1, 1.0), (a2, b2, -1.0)]

    def rotated(self, r1: np.ndarray, r2: np.ndarray) -> 'ChshSettings':
        return ChshSettings(tuple(r1 @ a for a in self.side1_axes),
                            tuple(r2 @ b for b in self.side2_axes))

    def to_json(self) -> Dict:
        return {
            'side1_axes': [a.tolist() for a in self.side1_axes],
            'side2_axes': [b.tolist() for b in self.side2_axes],
        }


_Z = np.array([0.0, 0.0, 1.0])
_X = np.array([1.0, 0.0, 0.0])
_R2 = np.sqrt(2.0)

# T = -I（单态）时达到 2√2 的设置
SPATIAL_SETTINGS = ChshSettings((_Z, _X), (-(_Z + _X) / _R2, (_X - _Z) / _R2))
# T = +I（时间边缘 R23）时达到 2√2 的设置
TEMPORAL_SETTINGS = ChshSettings((_Z, _X), ((_Z + _X) / _R2, (_Z - _X) / _R2))


def default_settings(pair: Sequence[str]) -> ChshSettings:
    """空间对（反关联）与时间对（正关联）的默认最优设置"""
    pair = tuple(pair)
    if pair == PAIR_23:
        return TEMPORAL_SETTINGS
    if pair in (PAIR_12, PAIR_13):
        return SPATIAL_SETTINGS
    raise InvalidArgumentError(f"没有为 {pair} 定义默认设置")


@dataclass
class ChshResult:
    value: float
    stderr: float
    settings_used: Union[ChshSettings, str]
    source: str
    pair: Tuple[str, str] = ()

    def __post_init__(self):
        if self.source not in ('exact', 'counts', 'reconstructed_marginal'):
            raise InvalidArgumentError(f"未知来源 {self.source!r}")
        if self.stderr < 0:
            raise InvalidArgumentError("标准误差不能为负")
        limit = TSIRELSON_BOUND + 4.0 * self.stderr + config.PHYSICALITY_TOL
        if abs(self.value) > limit:
            raise InvalidArgumentError(
                f"|CHSH| = {abs(self.value):.4f} 超过 2√2 + 4σ = {limit:.4f}")

    def to_json(self) -> Dict:
        settings = self.settings_used if isinstance(self.settings_used, str) else self.settings_used.to_json()
        return {
            'pair': list(self.pair),
            'value': self.value,
            'stderr': self.stderr,
            'settings': settings,
            'source': self.source,
        }


@dataclass
class MonogamyReport:
    pair_sums: Dict[Tuple[str, str], Tuple[float, float]]
    sigmas: Dict[Tuple[str, str], Optional[float]]
    bound: float = MONOGAMY_BOUND

    def violated(self) -> Dict[Tuple[str, str], bool]:
        return {k: s > self.bound for k, (s, _) in self.pair_sums.items()}

    def to_json(self) -> Dict:
        rows = []
        for key, (total, err) in self.pair_sums.items():
            rows.append({
                'pairs': list(key),
                'sum': total,
                'stderr': err,
                'sigmas': self.sigmas[key],
                'violated': total > self.bound,
            })
        return {'bound': self.bound, 'sums': rows}


def chsh_value(T, s: ChshSettings) -> float:
    """给定设置下的 CHSH 组合"""
    T = np.asarray(T, dtype=float)
    return float(sum(sign * (a @ T @ b) for a, b, sign in s.quartet()))


def chsh_optimal(T) -> Tuple[float, ChshSettings]:
    """
    全部设置上的最大 CHSH 值 2√(m1+m2)，m1、m2 为 TᵀT 最大的两个特征值

    最优设置由 T 的奇异向量给出：a_i = u_i，b_{1,2} = cosθ v1 ± sinθ v2，tanθ = s2/s1。
    """
    T = np.asarray(T, dtype=float)
    if T.shape != (3, 3):
        raise InvalidArgumentError(f"相关矩阵必须是 3x3，实际 {T.shape}")
    u, s, vt = np.linalg.svd(T)
    s1, s2 = float(s[0]), float(s[1])
    norm = np.hypot(s1, s2)
    if norm == 0.0:
        return 0.0, SPATIAL_SETTINGS
    cos_t, sin_t = s1 / norm, s2 / norm
    v1, v2 = vt[0], vt[1]
    settings = ChshSettings((u[:, 0], u[:, 1]),
                            (cos_t * v1 + sin_t * v2, cos_t * v1 - sin_t * v2))
    return float(2.0 * norm), settings


def chsh_from_table(table: CorrelationTable, slot_a: int, slot_b: int,
                    settings: ChshSettings = None) -> float:
    """相关表中某一对槽位的 CHSH 值；settings 为 None 时取最优值"""
    T = correlation_3x3(table, slot_a, slot_b)
    if settings is None:
        return chsh_optimal(T)[0]
    return chsh_value(T, settings)


def quartet_measures(pair: Sequence[str], settings: ChshSettings = None) -> List[Tuple[Measure, Measure]]:
    """CHSH 四个设置对应的测量（顺序 a1b1, a1b2, a2b1, a2b2）"""
    pair = tuple(pair)
    if any(e not in EVENT_SITES for e in pair) or len(pair) != 2:
        raise InvalidArgumentError(f"未知事件对 {pair}")
    settings = default_settings(pair) if settings is None else settings
    (c1, t1), (c2, t2) = EVENT_SITES[pair[0]], EVENT_SITES[pair[1]]
    return [(Measure(c1, t1, a), Measure(c2, t2, b)) for a, b, _ in settings.quartet()]


def _same_axis(m: Measure, v: np.ndarray) -> bool:
    return np.allclose(m.axis, v, atol=config.AXIS_NORM_TOL)


def chsh_from_counts(counts: Sequence[Union[CountsTable, OutcomeDistribution]],
                     settings: ChshSettings = None, pair: Sequence[str] = ()) -> ChshResult:
    """
    由四个设置的计数估计 CHSH 值，标准误差为四个关联误差的平方和开根

    counts 的顺序为 a1b1, a1b2, a2b1, a2b2；每个表的前两个测量事件分别属于两方。
    """
    counts = list(counts)
    if len(counts) != 4:
        raise InvalidArgumentError(f"CHSH 需要 4 个设置，实际 {len(counts)}")
    if settings is None:
        settings = ChshSettings((counts[0].measures[0].axis, counts[2].measures[0].axis),
                                (counts[0].measures[1].axis, counts[1].measures[1].axis))
    for c, (a, b, _) in zip(counts, settings.quartet()):
        if len(c.measures) < 2 or not (_same_axis(c.measures[0], a) and _same_axis(c.measures[1], b)):
            raise InvalidArgumentError(f"设置 {c.setting_label} 不属于该 CHSH 四元组")

    value, variance = 0.0, 0.0
    for c, (_, _, sign) in zip(counts, settings.quartet()):
        e, err = estimate_correlator(c, [0, 1])
        value += sign * e
        variance += err * err
    exact = all(isinstance(c, OutcomeDistribution) for c in counts)
    return ChshResult(value=float(value), stderr=float(np.sqrt(variance)),
                      settings_used=settings, source='exact' if exact else 'counts',
                      pair=tuple(pair))


def monogamy_check(results: Mapping[Tuple[str, str], ChshResult]) -> MonogamyReport:
    """对每两个共享事件的 CHSH 结果求和，并与界 4 比较"""
    sums, sigmas = {}, {}
    for p, q in itertools.combinations(results, 2):
        if not set(p) & set(q):
            continue
        total = results[p].value + results[q].value
        err = float(np.hypot(results[p].stderr, results[q].stderr))
        key = (pair_name(p), pair_name(q))
        sums[key] = (float(total), err)
        sigmas[key] = (total - MONOGAMY_BOUND) / err if err > 0 else None
    if not sums:
        raise InvalidArgumentError("没有共享事件的 CHSH 结果对")
    return MonogamyReport(pair_sums=sums, sigmas=sigmas)


def deterministic_strategies() -> List[Tuple[int, int, int, int]]:
    """2x2 设置上全部 16 种确定性 ±1 赋值 (a1, a2, b1, b2)"""
    return list(itertools.product((1, -1), repeat=4))


def strategy_chsh(strategy: Tuple[int, int, int, int]) -> float:
    a1, a2, b1, b2 = strategy
    return float(a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2)


def classical_bound_oracle() -> float:
    """穷举确定性策略得到的局域界"""
    return max(strategy_chsh(s) for s in deterministic_strategies())
