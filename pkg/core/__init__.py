"""核心模块"""
from .errors import (IncompleteQuorumError, InvalidArgumentError, NotADensityOperatorError,
                     NumericalError, PdoLabError, SpecError)
from .pdo import PseudoDensityOperator, otc_pdo, physicality
from .spec import ExperimentSpec, parse_spec, serialize_spec
from .experiment import ExperimentRunner, RunReport
from .report import ReportGenerator

__all__ = [
    'PdoLabError',
    'InvalidArgumentError',
    'NotADensityOperatorError',
    'IncompleteQuorumError',
    'SpecError',
    'NumericalError',
    'PseudoDensityOperator',
    'otc_pdo',
    'physicality',
    'ExperimentSpec',
    'parse_spec',
    'serialize_spec',
    'ExperimentRunner',
    'RunReport',
    'ReportGenerator',
]
