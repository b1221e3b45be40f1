#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
常量定义：单比特 Pauli 矩阵、测量轴、命名幺正变换、事件标签
"""

import numpy as np

# 单比特 Pauli 矩阵
PAULI_MATRICES = {
    'I': np.array([[1, 0], [0, 1]], dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}

PAULI_LABELS = ('I', 'X', 'Y', 'Z')
AXIS_LABELS = ('X', 'Y', 'Z')

# Pauli 轴对应的 Bloch 单位向量
AXIS_VECTORS = {
    'X': np.array([1.0, 0.0, 0.0]),
    'Y': np.array([0.0, 1.0, 0.0]),
    'Z': np.array([0.0, 0.0, 1.0]),
}

_S = 1.0 / np.sqrt(2.0)

# 命名幺正变换（实验描述中 source.otc_unitary 可用的名字）
NAMED_UNITARIES = {
    'I': PAULI_MATRICES['I'],
    'identity': PAULI_MATRICES['I'],
    'X': PAULI_MATRICES['X'],
    'Y': PAULI_MATRICES['Y'],
    'Z': PAULI_MATRICES['Z'],
    'H': np.array([[_S, _S], [_S, -_S]], dtype=complex),
    'S': np.array([[1, 0], [0, 1j]], dtype=complex),
    'T': np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
}

# 三个时空事件：Q1=光子B@t1，Q2=光子A@t1，Q3=光子A@t2
EVENT_Q1 = 'Q1@t1'
EVENT_Q2 = 'Q2@t1'
EVENT_Q3 = 'Q3@t2'
OTC_EVENTS = (EVENT_Q1, EVENT_Q2, EVENT_Q3)

# 双时刻单比特
EVENT_T1 = 'Q@t1'
EVENT_T2 = 'Q@t2'
TWO_TIME_EVENTS = (EVENT_T1, EVENT_T2)

# 物理载体与时间标签
CARRIER_A = 'A'
CARRIER_B = 'B'
TIME_T1 = 't1'
TIME_T2 = 't2'
