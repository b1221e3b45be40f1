#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
顺序投影测量模拟器

两个物理载体（光子 B 与 A）组成的双比特源；A 可以在 t1、t2 两个时刻被测量（测量后坍缩），
B 只在 t1 被测量一次。exact_distribution 给出精确的联合结果分布，
sample 按分布做可复现的有限次采样。
"""

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

import config
from utils.constants import AXIS_VECTORS, CARRIER_A, CARRIER_B, PAULI_MATRICES
from .errors import InvalidArgumentError
from .linalg import as_matrix, is_unitary, tensor
from .pdo import werner

Outcome = Tuple[int, ...]


def format_outcome(outcome: Outcome) -> str:
    return ' '.join('+1' if o > 0 else '-1' for o in outcome)


def _axis_vector(axis) -> Tuple[np.ndarray, str]:
    """把 'X'/'Y'/'Z' 或三维向量规范为 (单位向量, 标签)"""
    if isinstance(axis, str):
        key = axis.strip().upper()
        sign = 1.0
        if key.startswith('-'):
            sign, key = -1.0, key[1:]
        if key not in AXIS_VECTORS:
            raise InvalidArgumentError(f"未知测量轴 {axis!r}")
        return sign * AXIS_VECTORS[key], ('-' if sign < 0 else '') + key
    n = np.array(axis, dtype=float).reshape(-1)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > config.AXIS_NORM_TOL:
        raise InvalidArgumentError(f"测量轴必须是单位三维向量，实际 {axis!r}")
    for key, vec in AXIS_VECTORS.items():
        if np.allclose(n, vec, atol=config.AXIS_NORM_TOL):
            return vec.copy(), key
        if np.allclose(n, -vec, atol=config.AXIS_NORM_TOL):
            return -vec, '-' + key
    return n, '(' + ','.join(f"{x:.6f}" for x in n) + ')'


def axis_operator(n: np.ndarray) -> np.ndarray:
    """n·σ"""
    return sum(n[i] * PAULI_MATRICES[a] for i, a in enumerate('XYZ'))


def _time_key(tag: str) -> float:
    match = re.search(r'(-?\d+(?:\.\d+)?)$', tag)
    if not match:
        raise InvalidArgumentError(f"时间标签 {tag!r} 必须以数字结尾（如 t1）")
    return float(match.group(1))


@dataclass(frozen=True, eq=False)
class Measure:
    """在 time_tag 时刻对载体做 ±1 投影测量 Π± = (I ± n·σ)/2"""
    carrier: str
    time_tag: str
    axis: object

    def __post_init__(self):
        vec, label = _axis_vector(self.axis)
        vec.setflags(write=False)
        object.__setattr__(self, 'axis', vec)
        object.__setattr__(self, '_label', label)

    @property
    def axis_label(self) -> str:
        return self._label

    @property
    def label(self) -> str:
        return f"{self.carrier}@{self.time_tag}:{self.axis_label}"

    def projector(self, outcome: int) -> np.ndarray:
        return 0.5 * (np.eye(2, dtype=complex) + outcome * axis_operator(self.axis))

    def __eq__(self, other):
        return (isinstance(other, Measure) and self.carrier == other.carrier
                and self.time_tag == other.time_tag and np.array_equal(self.axis, other.axis))

    def __hash__(self):
        return hash((self.carrier, self.time_tag, tuple(self.axis)))


@dataclass(frozen=True)
class PrepareUnitary:
    """对载体施加单比特幺正变换"""
    carrier: str
    unitary: np.ndarray

    def __post_init__(self):
        u = as_matrix(self.unitary)
        if u.shape != (2, 2) or not is_unitary(u):
            raise InvalidArgumentError(f"载体 {self.carrier} 上的变换不是 2x2 幺正矩阵")
        object.__setattr__(self, 'unitary', u)


TimelineEvent = Union[Measure, PrepareUnitary]


@dataclass
class MeasurementTimeline:
    """
    初始双比特态 + 按时间顺序排列的事件

    carriers 给出初态张量积中各载体的顺序，默认 (B, A)。
    """
    events: List[TimelineEvent]
    initial_state: Optional[np.ndarray] = None
    carriers: Tuple[str, str] = (CARRIER_B, CARRIER_A)

    def __post_init__(self):
        self.initial_state = werner(1.0) if self.initial_state is None else as_matrix(self.initial_state)
        if self.initial_state.shape != (4, 4):
            raise InvalidArgumentError("初态必须是 4x4 的双载体密度矩阵")
        self.validate()

    def validate(self):
        seen = set()
        last_time: Dict[str, float] = {}
        for event in self.events:
            if event.carrier not in self.carriers:
                raise InvalidArgumentError(f"未知载体 {event.carrier!r}，可选 {self.carriers}")
            if isinstance(event, Measure):
                key = (event.carrier, event.time_tag)
                if key in seen:
                    raise InvalidArgumentError(f"载体 {event.carrier} 在 {event.time_tag} 被测量了两次")
                seen.add(key)
                t = _time_key(event.time_tag)
                if event.carrier in last_time and t <= last_time[event.carrier]:
                    raise InvalidArgumentError(f"载体 {event.carrier} 的时间标签必须严格递增")
                last_time[event.carrier] = t

    @property
    def measures(self) -> Tuple[Measure, ...]:
        return tuple(e for e in self.events if isinstance(e, Measure))

    @property
    def setting_label(self) -> str:
        return ' '.join(m.label for m in self.measures)

    def embed(self, carrier: str, op: np.ndarray) -> np.ndarray:
        """把单比特算符嵌入到双载体空间"""
        factors = [op if c == carrier else np.eye(2, dtype=complex) for c in self.carriers]
        return tensor(*factors)


@dataclass
class OutcomeDistribution:
    """±1 结果元组（按测量事件顺序）-> 概率"""
    measures: Tuple[Measure, ...]
    probabilities: Dict[Outcome, float]

    @property
    def setting_label(self) -> str:
        return ' '.join(m.label for m in self.measures)

    def outcomes(self) -> List[Outcome]:
        return sorted(self.probabilities, reverse=True)

    def marginalize(self, keep: Sequence[int]) -> Dict[Outcome, float]:
        result: Dict[Outcome, float] = {}
        for outcome, p in self.probabilities.items():
            key = tuple(outcome[i] for i in keep)
            result[key] = result.get(key, 0.0) + p
        return result

    def to_csv_rows(self) -> List[List]:
        """CSV 行：setting,outcome_tuple,probability（精确模式没有计数）"""
        return [[self.setting_label, format_outcome(o), repr(self.probabilities[o])] for o in self.outcomes()]


@dataclass
class CountsTable:
    """某一测量设置下的计数表"""
    measures: Tuple[Measure, ...]
    counts: Dict[Outcome, int] = field(default_factory=dict)
    shots: int = 0

    def __post_init__(self):
        total = sum(self.counts.values())
        if any(c < 0 for c in self.counts.values()):
            raise InvalidArgumentError("计数不能为负")
        if self.shots != total:
            raise InvalidArgumentError(f"计数总和 {total} 与 shots={self.shots} 不一致")

    @property
    def setting_label(self) -> str:
        return ' '.join(m.label for m in self.measures)

    def to_csv_rows(self) -> List[List]:
        """CSV 行：setting,outcome_tuple,count"""
        rows = []
        for outcome in sorted(self.counts, reverse=True):
            rows.append([self.setting_label, format_outcome(outcome), self.counts[outcome]])
        return rows


def _all_outcomes(k: int) -> List[Outcome]:
    outcomes = [()]
    for _ in range(k):
        outcomes = [o + (s,) for o in outcomes for s in (1, -1)]
    return outcomes


def exact_distribution(t: MeasurementTimeline) -> OutcomeDistribution:
    """
    按时间顺序对每个结果分支做投影夹心 ρ -> ΠρΠ，得到精确联合分布

    同一时刻、不同载体上的测量互相对易，先后顺序不影响结果。
    """
    branches: List[Tuple[Outcome, np.ndarray]] = [((), t.initial_state.copy())]
    for event in t.events:
        if isinstance(event, PrepareUnitary):
            g = t.embed(event.carrier, event.unitary)
            branches = [(o, g @ rho @ g.conj().T) for o, rho in branches]
            continue
        projectors = {s: t.embed(event.carrier, event.projector(s)) for s in (1, -1)}
        branches = [(o + (s,), projectors[s] @ rho @ projectors[s])
                     for o, rho in branches for s in (1, -1)]

    probabilities = {}
    for outcome, rho in branches:
        p = float(np.real(np.trace(rho)))
        probabilities[outcome] = p if p > config.PROBABILITY_TOL else 0.0
    total = sum(probabilities.values())
    if total <= 0:
        raise InvalidArgumentError("初态的迹为零")
    probabilities = {o: p / total for o, p in probabilities.items()}
    return OutcomeDistribution(measures=t.measures, probabilities=probabilities)


def _seed_sequence(seed: int, setting_index: int, batch_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
                                  spawn_key=(int(setting_index), int(batch_index)))


def sample_distribution(dist: OutcomeDistribution, shots: int, seed: int,
                        setting_index: int = 0, workers: int = None) -> CountsTable:
    """
    从精确分布中独立同分布地抽取 shots 次结果

    shots 被切成固定大小的批次，第 b 批使用 (seed, setting_index, b) 派生的子随机流，
    因此结果与并行度无关。
    """
    if shots < 1:
        raise InvalidArgumentError("shots 必须 >= 1")
    outcomes = _all_outcomes(len(dist.measures))
    probs = np.array([dist.probabilities.get(o, 0.0) for o in outcomes])
    probs = probs / probs.sum()

    batch = max(1, int(config.SAMPLING_BATCH_SIZE))
    sizes = [batch] * (shots // batch) + ([shots % batch] if shots % batch else [])

    def draw(index_size):
        index, size = index_size
        rng = np.random.default_rng(_seed_sequence(seed, setting_index, index))
        return rng.multinomial(size, probs)

    workers = config.SAMPLING_WORKERS if workers is None else workers
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(draw, enumerate(sizes)))
    else:
        parts = [draw(item) for item in enumerate(sizes)]
    totals = np.sum(parts, axis=0)

    counts = {o: int(n) for o, n in zip(outcomes, totals) if n > 0}
    return CountsTable(measures=dist.measures, counts=counts, shots=int(shots))


def sample(t: MeasurementTimeline, shots: int, seed: int, setting_index: int = 0) -> CountsTable:
    """可复现的有限次采样：相同 (t, shots, seed) 得到相同计数"""
    return sample_distribution(exact_distribution(t), shots, seed, setting_index)


def resample(c: CountsTable, rng: np.random.Generator) -> CountsTable:
    """按经验频率做多项式 bootstrap 重采样"""
    outcomes = sorted(c.counts, reverse=True)
    freq = np.array([c.counts[o] for o in outcomes], dtype=float) / c.shots
    draws = rng.multinomial(c.shots, freq)
    counts = {o: int(n) for o, n in zip(outcomes, draws) if n > 0}
    return CountsTable(measures=c.measures, counts=counts, shots=c.shots)


def _resolve_indices(measures: Tuple[Measure, ...], which) -> List[int]:
    indices = []
    for w in which:
        if isinstance(w, (int, np.integer)):
            if w < 0 or w >= len(measures):
                raise InvalidArgumentError(f"测量事件下标 {w} 越界")
            indices.append(int(w))
        else:
            matches = [i for i, m in enumerate(measures)
                       if w in (m, f"{m.carrier}@{m.time_tag}", m.label)]
            if len(matches) != 1:
                raise InvalidArgumentError(f"无法定位测量事件 {w!r}")
            indices.append(matches[0])
    if not indices:
        raise InvalidArgumentError("至少需要选择一个测量事件")
    return indices


def estimate_correlator(c: Union[CountsTable, OutcomeDistribution], which) -> Tuple[float, float]:
    """
    所选 ±1 结果乘积的均值与标准误差

    对 OutcomeDistribution 返回精确期望，标准误差为 0。
    """
    indices = _resolve_indices(c.measures, which)
    if isinstance(c, OutcomeDistribution):
        value = sum(p * np.prod([o[i] for i in indices]) for o, p in c.probabilities.items())
        return float(value), 0.0

    if c.shots <= 0 or not c.counts:
        raise InvalidArgumentError("计数表为空")
    n = c.shots
    total = sum(cnt * np.prod([o[i] for i in indices]) for o, cnt in c.counts.items())
    mean = total / n
    # 乘积只取 ±1，样本方差有闭式
    if n > 1:
        variance = max(0.0, (1.0 - mean * mean) * n / (n - 1))
    else:
        variance = 0.0
    return float(mean), float(np.sqrt(variance / n))
