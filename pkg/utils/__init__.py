"""工具模块"""
from .colors import Colors
from .constants import PAULI_MATRICES, AXIS_VECTORS, NAMED_UNITARIES

__all__ = ['Colors', 'PAULI_MATRICES', 'AXIS_VECTORS', 'NAMED_UNITARIES']
