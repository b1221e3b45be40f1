#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
实验描述（JSON）解析与规范化

示例：
    {
      "source": {"visibility": 0.952, "otc_unitary": "I"},
      "shots_per_setting": 100000,
      "seed": 42,
      "mode": "sampled",
      "outputs": ["report_json", "coefficients_csv", "counts_csv"]
    }
"""

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

import config
from utils.constants import NAMED_UNITARIES
from .errors import SpecError
from .linalg import is_unitary

MODES = ('exact', 'sampled')
OUTPUT_KINDS = ('report_json', 'coefficients_csv', 'counts_csv')
SEED_MIN, SEED_MAX = -2 ** 63, 2 ** 64 - 1

MatrixEntries = Tuple[Tuple[complex, complex], Tuple[complex, complex]]


@dataclass(frozen=True)
class ExperimentSpec:
    seed: int
    visibility: float = 1.0
    otc_unitary: Union[str, MatrixEntries] = 'I'
    shots_per_setting: int = 100000
    mode: str = 'sampled'
    outputs: Tuple[str, ...] = OUTPUT_KINDS

    def unitary_matrix(self) -> np.ndarray:
        if isinstance(self.otc_unitary, str):
            return NAMED_UNITARIES[self.otc_unitary].copy()
        return np.array(self.otc_unitary, dtype=complex)

    def with_overrides(self, **changes) -> 'ExperimentSpec':
        """命令行参数覆盖文件中的字段；None 表示不覆盖"""
        changes = {k: v for k, v in changes.items() if v is not None}
        updated = dataclasses.replace(self, **changes)
        _validate(updated)
        return updated

    def to_json(self) -> Dict:
        if isinstance(self.otc_unitary, str):
            unitary = self.otc_unitary
        else:
            m = self.unitary_matrix()
            unitary = {'re': np.real(m).tolist(), 'im': np.imag(m).tolist()}
        return {
            'source': {'visibility': self.visibility, 'otc_unitary': unitary},
            'shots_per_setting': self.shots_per_setting,
            'seed': self.seed,
            'mode': self.mode,
            'outputs': list(self.outputs),
        }


def serialize_spec(spec: ExperimentSpec) -> str:
    """规范化 JSON 文本（键排序），parse_spec 可以无损读回"""
    return json.dumps(spec.to_json(), indent=2, sort_keys=True)


def spec_hash(spec: ExperimentSpec) -> str:
    return hashlib.sha256(serialize_spec(spec).encode('utf-8')).hexdigest()


def _default_seed(env: Mapping[str, str]) -> int:
    raw = env.get(config.SEED_ENV_VAR)
    if raw is None or raw == '':
        return config.CALIBRATION_SEED
    try:
        return int(raw)
    except ValueError as e:
        raise SpecError(f"环境变量 {config.SEED_ENV_VAR}={raw!r} 不是整数", field=config.SEED_ENV_VAR) from e


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _parse_unitary(raw, path: str) -> Union[str, MatrixEntries]:
    if isinstance(raw, str):
        if raw not in NAMED_UNITARIES:
            raise SpecError(f"未知的幺正变换名 {raw!r}，可选 {sorted(NAMED_UNITARIES)}", field=path)
        return raw
    try:
        if isinstance(raw, dict):
            m = np.array(raw['re'], dtype=float) + 1j * np.array(raw.get('im', np.zeros((2, 2))), dtype=float)
        else:
            m = np.array(raw, dtype=float).astype(complex)
    except (KeyError, TypeError, ValueError) as e:
        raise SpecError(f"幺正矩阵格式错误: {e}", field=path) from e
    if m.shape != (2, 2):
        raise SpecError(f"幺正矩阵必须是 2x2，实际 {m.shape}", field=path)
    if not is_unitary(m):
        raise SpecError("矩阵不是幺正的", field=path)
    return tuple(tuple(complex(x) for x in row) for row in m)


def _validate(spec: ExperimentSpec):
    if not _is_number(spec.visibility) or not 0.0 <= spec.visibility <= 1.0:
        raise SpecError(f"可见度必须在 [0, 1] 内，实际 {spec.visibility!r}", field='source.visibility')
    if spec.mode not in MODES:
        raise SpecError(f"mode 必须是 {MODES} 之一，实际 {spec.mode!r}", field='mode')
    if not _is_int(spec.shots_per_setting) or (spec.mode == 'sampled' and spec.shots_per_setting < 1):
        raise SpecError(f"shots_per_setting 必须是正整数，实际 {spec.shots_per_setting!r}",
                        field='shots_per_setting')
    if not _is_int(spec.seed) or not SEED_MIN <= spec.seed <= SEED_MAX:
        raise SpecError(f"seed 必须是 64 位整数，实际 {spec.seed!r}", field='seed')
    for i, kind in enumerate(spec.outputs):
        if kind not in OUTPUT_KINDS:
            raise SpecError(f"未知输出类型 {kind!r}", field=f'outputs[{i}]')


def parse_spec(text: str, env: Optional[Mapping[str, str]] = None) -> ExperimentSpec:
    """
    解析并校验实验描述，缺省字段取默认值

    Raises:
        SpecError: 语法错误（带 1 起始的行/列）或语义错误（带字段路径）
    """
    env = os.environ if env is None else env
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"JSON 语法错误: {e.msg}", line=e.lineno, column=e.colno) from e
    if not isinstance(doc, dict):
        raise SpecError("实验描述必须是 JSON 对象", line=1, column=1)

    known = {'source', 'shots_per_setting', 'seed', 'mode', 'outputs'}
    for key in doc:
        if key not in known:
            raise SpecError(f"未知字段 {key!r}", field=key)

    source = doc.get('source', {})
    if not isinstance(source, dict):
        raise SpecError("source 必须是对象", field='source')
    for key in source:
        if key not in ('visibility', 'otc_unitary'):
            raise SpecError(f"未知字段 {key!r}", field=f'source.{key}')

    outputs = doc.get('outputs', list(OUTPUT_KINDS))
    if not isinstance(outputs, list):
        raise SpecError("outputs 必须是列表", field='outputs')

    spec = ExperimentSpec(
        seed=doc['seed'] if 'seed' in doc else _default_seed(env),
        visibility=source.get('visibility', config.DEFAULT_VISIBILITY),
        otc_unitary=_parse_unitary(source.get('otc_unitary', 'I'), 'source.otc_unitary'),
        shots_per_setting=doc.get('shots_per_setting', config.DEFAULT_SHOTS),
        mode=doc.get('mode', config.DEFAULT_MODE),
        outputs=tuple(outputs),
    )
    _validate(spec)
    if _is_int(spec.visibility):
        spec = dataclasses.replace(spec, visibility=float(spec.visibility))
    return spec
