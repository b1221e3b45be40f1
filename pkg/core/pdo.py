#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
赝密度算符（PDO）核心模块

PDO 是定义在时空事件槽位上的厄米、迹为一算符，不要求半正定。
事件标签形如 'Q2@t1'：载体 + 时间标签。
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Tuple

import numpy as np

import config
from utils.constants import AXIS_LABELS, OTC_EVENTS, PAULI_MATRICES, TWO_TIME_EVENTS
from .errors import InvalidArgumentError
from .linalg import (EigenDecomposition, as_matrix, hermitian_defect,
                     hermitian_eig, is_unitary, matrix_to_json, partial_trace,
                     tensor)
from .pauli import CorrelationTable, PauliString, assemble


class Provenance(str, Enum):
    CANONICAL = 'canonical'
    RECONSTRUCTED = 'reconstructed'
    MARGINAL = 'marginal'


@dataclass(frozen=True)
class PseudoDensityOperator:
    """事件标签 + 2^n 维矩阵 + 来源"""
    events: Tuple[str, ...]
    matrix: np.ndarray = field(repr=False)
    provenance: Provenance = Provenance.CANONICAL

    def __post_init__(self):
        m = as_matrix(self.matrix)
        events = tuple(self.events)
        if m.shape != (2 ** len(events), 2 ** len(events)):
            raise InvalidArgumentError(f"{len(events)} 个事件需要 {2 ** len(events)} 维矩阵，实际 {m.shape}")
        if len(set(events)) != len(events):
            raise InvalidArgumentError(f"事件标签重复: {events}")
        if hermitian_defect(m) > config.HERMITIAN_TOL:
            raise InvalidArgumentError("PDO 必须是厄米矩阵")
        if abs(np.trace(m) - 1.0) > config.TRACE_TOL:
            raise InvalidArgumentError(f"PDO 的迹必须为 1，实际 {np.trace(m):.6g}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, 'events', events)
        object.__setattr__(self, 'matrix', m)
        object.__setattr__(self, 'provenance', Provenance(self.provenance))

    @property
    def n_events(self) -> int:
        return len(self.events)

    def index_of(self, event: str) -> int:
        """按完整标签或载体名（'Q2'）查找事件槽位"""
        if event in self.events:
            return self.events.index(event)
        matches = [i for i, e in enumerate(self.events) if e.split('@')[0] == event]
        if len(matches) != 1:
            raise InvalidArgumentError(f"事件 {event!r} 不在 {self.events} 中")
        return matches[0]

    def spectrum(self) -> EigenDecomposition:
        return hermitian_eig(self.matrix)

    def to_json(self) -> Dict:
        return {
            'events': list(self.events),
            'matrix': matrix_to_json(self.matrix),
            'provenance': self.provenance.value,
        }


@dataclass(frozen=True)
class PhysicalityReport:
    min_eigenvalue: float
    negative_subspace_dim: int
    is_physical: bool
    eigenvalues: Tuple[float, ...] = ()

    def to_json(self) -> Dict:
        return {
            'min_eigenvalue': self.min_eigenvalue,
            'negative_subspace_dim': self.negative_subspace_dim,
            'is_physical': self.is_physical,
            'eigenvalues': list(self.eigenvalues),
        }


# ----------------------------------------------------------------------------
# 参考态
# ----------------------------------------------------------------------------

def singlet_state() -> np.ndarray:
    """|ψ-> = (|HV> - |VH>)/√2，H=|0>，V=|1>"""
    return np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)


def singlet() -> np.ndarray:
    psi = singlet_state()
    return np.outer(psi, psi.conj())


def werner(v: float) -> np.ndarray:
    """v·singlet + (1-v)·I/4"""
    if not 0.0 <= v <= 1.0:
        raise InvalidArgumentError(f"可见度必须在 [0, 1] 内，实际 {v}")
    return v * singlet() + (1.0 - v) * np.eye(4, dtype=complex) / 4.0


def _sigma_sum_table(n_slots: int, i: int, j: int, sign: float,
                     table: CorrelationTable):
    """向表中写入 sign·Σ_ij 的三个两体项"""
    for a in AXIS_LABELS:
        s = PauliString.local(n_slots, {i: a, j: a})
        table.set(s, table.get(s) + sign)


# ----------------------------------------------------------------------------
# 构造
# ----------------------------------------------------------------------------

def two_time_pdo(rho=None, u=None) -> PseudoDensityOperator:
    """
    单比特在 t1、t2 两次 Pauli 测量的双时刻 PDO

    Args:
        rho: t1 时刻的单比特密度矩阵（默认 I/2）
        u: 两次测量之间的幺正演化（默认 I）
    """
    rho = np.eye(2, dtype=complex) / 2 if rho is None else as_matrix(rho)
    u = PAULI_MATRICES['I'] if u is None else as_matrix(u)
    if rho.shape != (2, 2):
        raise InvalidArgumentError("rho 必须是 2x2 矩阵")
    if not is_unitary(u):
        raise InvalidArgumentError("u 必须是幺正矩阵")

    table = CorrelationTable(n_slots=2)
    table.set('II', 1.0)
    evolved = u @ rho @ u.conj().T
    for a in AXIS_LABELS:
        sa = PAULI_MATRICES[a]
        table.set(PauliString.local(2, {0: a}), float(np.real(np.trace(rho @ sa))))
        table.set(PauliString.local(2, {1: a}), float(np.real(np.trace(evolved @ sa))))
    for a in AXIS_LABELS:
        for b in AXIS_LABELS:
            sa = PAULI_MATRICES[a]
            sb = u.conj().T @ PAULI_MATRICES[b] @ u
            value = 0.5 * np.trace(rho @ (sa @ sb + sb @ sa))
            table.set(PauliString.local(2, {0: a, 1: b}), float(np.real(value)))
    return PseudoDensityOperator(TWO_TIME_EVENTS, assemble(table), Provenance.CANONICAL)


def two_time_mixed() -> PseudoDensityOperator:
    """¼(I + XX + YY + ZZ)：最大混态单比特的双时刻 PDO"""
    table = CorrelationTable(n_slots=2)
    table.set('II', 1.0)
    _sigma_sum_table(2, 0, 1, +1.0, table)
    return PseudoDensityOperator(TWO_TIME_EVENTS, assemble(table), Provenance.CANONICAL)


def otc_table() -> CorrelationTable:
    """(I - Σ12 + Σ23 - Σ13) 的系数表"""
    table = CorrelationTable(n_slots=3)
    table.set('III', 1.0)
    _sigma_sum_table(3, 0, 1, -1.0, table)
    _sigma_sum_table(3, 1, 2, +1.0, table)
    _sigma_sum_table(3, 0, 2, -1.0, table)
    return table


def otc_pdo(u=None) -> PseudoDensityOperator:
    """
    开类时曲线区域的三事件 PDO R123

    u 为单比特进入 OTC 时经历的幺正变换，作用于槽位 3：
    (I⊗I⊗u)·R123·(I⊗I⊗u)†
    """
    u = PAULI_MATRICES['I'] if u is None else as_matrix(u)
    if u.shape != (2, 2) or not is_unitary(u):
        raise InvalidArgumentError("OTC 幺正变换必须是 2x2 幺正矩阵")
    r = assemble(otc_table())
    g = tensor(np.eye(2), np.eye(2), u)
    return PseudoDensityOperator(OTC_EVENTS, g @ r @ g.conj().T, Provenance.CANONICAL)


def marginal(r: PseudoDensityOperator, keep: Iterable[str]) -> PseudoDensityOperator:
    """对未保留事件求偏迹，保留事件按原顺序排列"""
    keep = list(keep)
    if not keep:
        raise InvalidArgumentError("marginal 至少需要保留一个事件")
    slots = sorted({r.index_of(e) for e in keep})
    reduced = partial_trace(r.matrix, [2] * r.n_events, slots)
    events = tuple(r.events[i] for i in slots)
    return PseudoDensityOperator(events, reduced, Provenance.MARGINAL)


def pair_marginals(r: PseudoDensityOperator) -> Dict[Tuple[str, str], PseudoDensityOperator]:
    """所有两事件边缘 PDO"""
    result = {}
    for i in range(r.n_events):
        for j in range(i + 1, r.n_events):
            pair = (r.events[i], r.events[j])
            result[pair] = marginal(r, pair)
    return result


def physicality(r: PseudoDensityOperator) -> PhysicalityReport:
    """基于谱的物理性诊断"""
    values = r.spectrum().eigenvalues
    tol = config.PHYSICALITY_TOL
    min_value = float(values[0])
    return PhysicalityReport(
        min_eigenvalue=min_value,
        negative_subspace_dim=int(np.sum(values < -tol)),
        is_physical=min_value >= -tol,
        eigenvalues=tuple(float(x) for x in values),
    )


def projector_expectation(r: PseudoDensityOperator, psi) -> float:
    """Tr(|ψ><ψ| R)；对 PDO 可以为负"""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != r.matrix.shape[0]:
        raise InvalidArgumentError("态矢量维度与 PDO 不匹配")
    psi = psi / np.linalg.norm(psi)
    return float(np.real(psi.conj() @ r.matrix @ psi))


def to_plot_matrices(r: PseudoDensityOperator) -> Dict[str, List[List[float]]]:
    """实部/虚部矩阵对，用于三维柱状图"""
    return {
        'events': list(r.events),
        'real': np.real(r.matrix).tolist(),
        'imag': np.imag(r.matrix).tolist(),
    }
