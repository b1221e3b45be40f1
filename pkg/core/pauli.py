#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Pauli 串基底：多事件算符的展开与重组

约定：相关表存放原始期望值 <s> = Tr(m·P_s)，1/2^n 前置因子放在 assemble 中，
这样表中数值可以和测量得到的相关函数直接对照。
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

import config
from utils.constants import PAULI_LABELS, PAULI_MATRICES, AXIS_LABELS
from .errors import InvalidArgumentError
from .linalg import as_matrix, hermitian_defect, tensor


@dataclass(frozen=True, order=True)
class PauliString:
    """每个事件槽位一个 {I, X, Y, Z} 标签"""
    labels: Tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(c).upper() for c in self.labels)
        if not labels:
            raise InvalidArgumentError("Pauli 串不能为空")
        bad = [c for c in labels if c not in PAULI_LABELS]
        if bad:
            raise InvalidArgumentError(f"非法 Pauli 标签: {bad}")
        object.__setattr__(self, 'labels', labels)

    @classmethod
    def parse(cls, text: str) -> 'PauliString':
        return cls(tuple(text.strip()))

    @classmethod
    def identity(cls, n_slots: int) -> 'PauliString':
        return cls(('I',) * n_slots)

    @classmethod
    def local(cls, n_slots: int, placements: Dict[int, str]) -> 'PauliString':
        """在给定槽位放置 Pauli 标签，其余为 I"""
        labels = ['I'] * n_slots
        for slot, label in placements.items():
            if slot < 0 or slot >= n_slots:
                raise InvalidArgumentError(f"槽位 {slot} 越界（共 {n_slots} 个）")
            labels[slot] = label
        return cls(tuple(labels))

    @property
    def n_slots(self) -> int:
        return len(self.labels)

    @property
    def weight(self) -> int:
        """非 I 标签个数（几体关联）"""
        return sum(1 for c in self.labels if c != 'I')

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.labels) if c != 'I')

    def __str__(self) -> str:
        return ''.join(self.labels)


class Coefficient(NamedTuple):
    value: float
    stderr: Optional[float] = None


@dataclass
class CorrelationTable:
    """Pauli 串 -> (期望值, 标准误差)；缺失的串视为 0"""
    n_slots: int
    entries: Dict[PauliString, Coefficient] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_slots < 1:
            raise InvalidArgumentError("n_slots 必须为正整数")
        for s in self.entries:
            self._check(s)

    def _check(self, s: PauliString):
        if s.n_slots != self.n_slots:
            raise InvalidArgumentError(f"Pauli 串 {s} 长度与 n_slots={self.n_slots} 不符")

    def set(self, s, value: float, stderr: Optional[float] = None):
        s = s if isinstance(s, PauliString) else PauliString.parse(s)
        self._check(s)
        if stderr is not None and stderr < 0:
            raise InvalidArgumentError(f"{s} 的标准误差为负")
        self.entries[s] = Coefficient(float(value), None if stderr is None else float(stderr))

    def get(self, s, default: float = 0.0) -> float:
        s = s if isinstance(s, PauliString) else PauliString.parse(s)
        entry = self.entries.get(s)
        return default if entry is None else entry.value

    def stderr(self, s) -> Optional[float]:
        s = s if isinstance(s, PauliString) else PauliString.parse(s)
        entry = self.entries.get(s)
        return None if entry is None else entry.stderr

    def __contains__(self, s) -> bool:
        s = s if isinstance(s, PauliString) else PauliString.parse(s)
        return s in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def items(self) -> Iterator[Tuple[PauliString, Coefficient]]:
        return iter(sorted(self.entries.items()))

    def nonzero(self, tol: float = 1e-12) -> Dict[str, float]:
        return {str(s): c.value for s, c in self.items() if abs(c.value) > tol}

    def to_csv_rows(self) -> List[List]:
        """CSV 行：string,value,stderr"""
        rows = []
        for s, c in self.items():
            rows.append([str(s), repr(c.value), '' if c.stderr is None else repr(c.stderr)])
        return rows


def all_strings(n_slots: int) -> List[PauliString]:
    return [PauliString(labels) for labels in itertools.product(PAULI_LABELS, repeat=n_slots)]


def pauli_matrix(s) -> np.ndarray:
    """各槽位单比特 Pauli 矩阵的张量积"""
    s = s if isinstance(s, PauliString) else PauliString.parse(s)
    return tensor(*(PAULI_MATRICES[c] for c in s.labels))


def _n_qubits(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 1 or 2 ** n != dim:
        raise InvalidArgumentError(f"维度 {dim} 不是 2 的正整数次幂")
    return n


def expand(m, drop_zeros: bool = True, tol: float = 1e-12) -> CorrelationTable:
    """
    把厄米矩阵展开为实 Pauli 系数 <s> = Tr(m·P_s)

    Args:
        m: 2^n 维厄米矩阵
        drop_zeros: 省略 |<s>| <= tol 的串（全 I 串总是保留）
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise InvalidArgumentError(f"需要方阵，实际形状 {m.shape}")
    n = _n_qubits(m.shape[0])
    if hermitian_defect(m) > config.HERMITIAN_TOL:
        raise InvalidArgumentError("expand 需要厄米矩阵")

    table = CorrelationTable(n_slots=n)
    identity = PauliString.identity(n)
    for s in all_strings(n):
        c = np.trace(m @ pauli_matrix(s))
        value = float(np.real(c))
        if drop_zeros and abs(value) <= tol and s != identity:
            continue
        table.set(s, value)
    return table


def assemble(t: CorrelationTable) -> np.ndarray:
    """(1/2^n) Σ_s <s>·P_s；缺失串按 0 处理"""
    identity = PauliString.identity(t.n_slots)
    if identity not in t.entries:
        raise InvalidArgumentError("相关表缺少全 I 项")
    if abs(t.get(identity) - 1.0) > config.TRACE_TOL:
        raise InvalidArgumentError(f"全 I 项必须为 1，实际 {t.get(identity)}")
    dim = 2 ** t.n_slots
    m = np.zeros((dim, dim), dtype=complex)
    for s, c in t.items():
        if c.value != 0.0:
            m += c.value * pauli_matrix(s)
    return m / dim


def correlation_3x3(t: CorrelationTable, slot_a: int, slot_b: int) -> np.ndarray:
    """T[a][b] = <σa(slot_a) σb(slot_b)>，其余槽位为 I"""
    n = t.n_slots
    if n < 2:
        raise InvalidArgumentError("correlation_3x3 至少需要 2 个槽位")
    for slot in (slot_a, slot_b):
        if slot < 0 or slot >= n:
            raise InvalidArgumentError(f"槽位 {slot} 越界（共 {n} 个）")
    if slot_a == slot_b:
        raise InvalidArgumentError("两个槽位必须不同")
    T = np.zeros((3, 3))
    for i, a in enumerate(AXIS_LABELS):
        for j, b in enumerate(AXIS_LABELS):
            T[i, j] = t.get(PauliString.local(n, {slot_a: a, slot_b: b}))
    return T


def bloch_rotation(u) -> np.ndarray:
    """单比特幺正 u 对应的 SO(3) 旋转：u (n·σ) u† = (R n)·σ"""
    u = as_matrix(u)
    if u.shape != (2, 2):
        raise InvalidArgumentError("bloch_rotation 需要 2x2 矩阵")
    R = np.zeros((3, 3))
    for i, a in enumerate(AXIS_LABELS):
        for j, b in enumerate(AXIS_LABELS):
            R[i, j] = 0.5 * np.real(np.trace(PAULI_MATRICES[a] @ u @ PAULI_MATRICES[b] @ u.conj().T))
    return R
