#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
稠密复矩阵内核：张量积、偏迹、厄米 Jacobi 对角化、纯态保真度

矩阵统一用二维 complex ndarray 表示；槽位下标从 0 开始。
"""

from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterable, Sequence

import numpy as np

import config
from .errors import InvalidArgumentError, NotADensityOperatorError, NumericalError


@dataclass(frozen=True)
class EigenDecomposition:
    """升序特征值与按列存放的正交归一特征向量"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return v @ np.diag(self.eigenvalues) @ v.conj().T

    def vector(self, index: int) -> np.ndarray:
        return self.eigenvectors[:, index]


def as_matrix(m) -> np.ndarray:
    """转换为二维复数组并检查有限性"""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidArgumentError(f"需要二维矩阵，实际形状 {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("矩阵包含非有限元素")
    return arr


def tensor(*factors) -> np.ndarray:
    """Kronecker 积，第一个因子的下标在最外层"""
    if not factors:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (as_matrix(f) for f in factors))


def hermitian_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m, tol: float = None) -> bool:
    tol = config.HERMITIAN_TOL if tol is None else tol
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and hermitian_defect(m) <= tol


def is_unitary(u, tol: float = None) -> bool:
    tol = config.UNITARY_TOL if tol is None else tol
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= tol


def partial_trace(m, slot_dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """
    对未保留的槽位求偏迹

    Args:
        m: 方阵，维度等于 slot_dims 之积
        slot_dims: 各槽位维度
        keep: 保留的槽位下标（从 0 开始），结果按原顺序排列

    Returns:
        约化矩阵
    """
    m = as_matrix(m)
    dims = [int(d) for d in slot_dims]
    keep = sorted(set(keep))
    n = len(dims)
    if m.shape[0] != m.shape[1]:
        raise InvalidArgumentError(f"偏迹需要方阵，实际形状 {m.shape}")
    if int(np.prod(dims)) != m.shape[0]:
        raise InvalidArgumentError(f"槽位维度 {dims} 与矩阵维度 {m.shape[0]} 不匹配")
    if any(k < 0 or k >= n for k in keep):
        raise InvalidArgumentError(f"保留槽位 {keep} 越界（共 {n} 个槽位）")

    traced = [i for i in range(n) if i not in keep]
    t = m.reshape(dims + dims)
    # 从后往前收缩，避免轴号移动
    for i in sorted(traced, reverse=True):
        current = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + current)
    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(kept_dim, kept_dim)


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int):
    """消去 a[p, q]：先用相位把它变成实数，再做实 Jacobi 旋转"""
    apq = a[p, q]
    mag = abs(apq)
    n = a.shape[0]

    u = np.eye(n, dtype=complex)
    phase = apq / mag
    u[q, q] = np.conj(phase)

    theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    r = np.eye(n, dtype=complex)
    r[p, p] = c
    r[q, q] = c
    r[p, q] = s
    r[q, p] = -s

    g = u @ r
    a = g.conj().T @ a @ g
    a = 0.5 * (a + a.conj().T)
    return a, v @ g


def _off_diagonal_max(a: np.ndarray) -> float:
    if a.shape[0] == 1:
        return 0.0
    return float(np.max(np.abs(a - np.diag(np.diag(a)))))


def hermitian_eig(m, tol: float = None) -> EigenDecomposition:
    """
    循环 Jacobi 对角化厄米矩阵

    Returns:
        EigenDecomposition，特征值升序
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1] or hermitian_defect(m) > config.HERMITIAN_TOL:
        raise InvalidArgumentError("hermitian_eig 需要厄米矩阵")
    tol = config.JACOBI_TOL if tol is None else tol

    a = 0.5 * (m + m.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)

    for _ in range(config.JACOBI_MAX_SWEEPS):
        if _off_diagonal_max(a) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > np.finfo(float).tiny:
                    a, v = _jacobi_rotate(a, v, p, q)
    else:
        if _off_diagonal_max(a) >= tol:
            raise NumericalError(f"Jacobi 在 {config.JACOBI_MAX_SWEEPS} 轮扫描后未收敛")

    values = np.real(np.diag(a))
    order = np.argsort(values, kind='stable')
    vectors = v[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    return EigenDecomposition(eigenvalues=values[order], eigenvectors=vectors)


def fidelity_pure(rho, psi) -> float:
    """
    纯态目标保真度 <psi|rho|psi>

    rho 必须是迹为一的半正定矩阵；PDO 的非正边缘态不能传入。
    """
    rho = as_matrix(rho)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != rho.shape[0]:
        raise InvalidArgumentError(f"态矢量维度 {psi.shape[0]} 与矩阵维度 {rho.shape[0]} 不匹配")
    if abs(np.linalg.norm(psi) - 1.0) > config.DENSITY_TOL:
        raise InvalidArgumentError("目标态矢量未归一化")
    if abs(np.trace(rho) - 1.0) > config.DENSITY_TOL:
        raise NotADensityOperatorError(f"迹不为一: {np.trace(rho):.6g}")
    spectrum = hermitian_eig(rho).eigenvalues
    if spectrum[0] < -config.DENSITY_TOL:
        raise NotADensityOperatorError(f"存在负特征值 {spectrum[0]:.6g}，不是密度算符")
    value = float(np.real(psi.conj() @ rho @ psi))
    return min(1.0, max(0.0, value))


def matrix_to_json(m) -> Dict:
    """序列化为 {dims, re, im}"""
    m = as_matrix(m)
    return {
        'dims': [int(m.shape[0]), int(m.shape[1])],
        're': np.real(m).tolist(),
        'im': np.imag(m).tolist(),
    }


def matrix_from_json(data: Dict) -> np.ndarray:
    try:
        m = np.array(data['re'], dtype=float) + 1j * np.array(data['im'], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidArgumentError(f"矩阵 JSON 格式错误: {e}") from e
    if list(m.shape) != list(data.get('dims', m.shape)):
        raise InvalidArgumentError(f"dims {data.get('dims')} 与数据形状 {m.shape} 不一致")
    return as_matrix(m)
