#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试 CHSH 评估、最优设置与单配性检验
"""

import numpy as np
import pytest

from core.bell import (CLASSICAL_BOUND, PAIR_12, PAIR_13, PAIR_23, SPATIAL_SETTINGS,
                       TEMPORAL_SETTINGS, TSIRELSON_BOUND, ChshResult, ChshSettings,
                       chsh_from_counts, chsh_from_table, chsh_optimal, chsh_value,
                       classical_bound_oracle, default_settings, deterministic_strategies,
                       monogamy_check, pair_name, quartet_measures, strategy_chsh)
from core.errors import InvalidArgumentError
from core.pauli import bloch_rotation, correlation_3x3, expand
from core.pdo import otc_pdo, werner
from core.simulator import exact_distribution, sample_distribution
from core.tomography import build_timeline
from utils.constants import NAMED_UNITARIES


def quartet(pair, settings=None, v=1.0, u=None, shots=None, seed=0):
    tables = []
    for index, measures in enumerate(quartet_measures(pair, settings)):
        dist = exact_distribution(build_timeline(measures, werner(v), u))
        tables.append(dist if shots is None else sample_distribution(dist, shots, seed, setting_index=index))
    return tables


def random_directions(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def fibonacci_sphere(n):
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    phi = np.pi * (1.0 + np.sqrt(5.0)) * k
    r = np.sqrt(1.0 - z ** 2)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def grid_chsh(T, normals):
    """b、b' 所在平面的法向量 n 网格搜索：S(n) = 2√(tr TᵀT - nᵀTᵀTn)"""
    m = T.T @ T
    q = np.trace(m) - np.einsum('ki,ij,kj->k', normals, m, normals)
    best = normals[int(np.argmax(q))]
    # 平面内任取正交基 c、d，显式构造达到 S(n) 的设置
    c = np.cross(best, [1.0, 0.0, 0.0] if abs(best[0]) < 0.9 else [0.0, 1.0, 0.0])
    c /= np.linalg.norm(c)
    d = np.cross(best, c)
    tc, td = T @ c, T @ d
    phi = np.arctan2(np.linalg.norm(td), np.linalg.norm(tc))
    side1 = (tc / np.linalg.norm(tc), td / np.linalg.norm(td))
    side2 = (np.cos(phi) * c + np.sin(phi) * d, np.cos(phi) * c - np.sin(phi) * d)
    return ChshSettings(side1, side2)


class TestChshValue:

    def test_spatial_settings_on_singlet(self):
        assert chsh_value(-np.eye(3), SPATIAL_SETTINGS) == pytest.approx(TSIRELSON_BOUND)

    def test_temporal_settings_on_identity(self):
        assert chsh_value(np.eye(3), TEMPORAL_SETTINGS) == pytest.approx(TSIRELSON_BOUND)

    def test_default_settings(self):
        assert default_settings(PAIR_23) is TEMPORAL_SETTINGS
        assert default_settings(PAIR_13) is SPATIAL_SETTINGS
        with pytest.raises(InvalidArgumentError):
            default_settings(('Q1@t1', 'Q1@t1'))

    def test_settings_validation(self):
        with pytest.raises(InvalidArgumentError):
            ChshSettings(([1, 0, 0], [0, 0, 2]), ([1, 0, 0], [0, 1, 0]))


class TestChshOptimal:

    @pytest.mark.parametrize("v", [1.0, 0.952, 0.5])
    def test_werner(self, v):
        value, _ = chsh_optimal(-v * np.eye(3))
        assert value == pytest.approx(2 * np.sqrt(2) * v)

    def test_rank_one(self):
        assert chsh_optimal(np.diag([1.0, 0.0, 0.0]))[0] == pytest.approx(CLASSICAL_BOUND)

    def test_zero(self):
        assert chsh_optimal(np.zeros((3, 3)))[0] == 0.0

    def test_settings_attain_value(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            T = rng.uniform(-1, 1, size=(3, 3))
            value, settings = chsh_optimal(T)
            assert chsh_value(T, settings) == pytest.approx(value)
            # 任意设置都不超过最优值
            for _ in range(1000):
                a = random_directions(rng, 2)
                b = random_directions(rng, 2)
                assert chsh_value(T, ChshSettings(tuple(a), tuple(b))) <= value + 1e-12

    def test_agrees_with_grid_search(self):
        rng = np.random.default_rng(31)
        normals = fibonacci_sphere(200000)
        for _ in range(50):
            T = rng.uniform(-1, 1, size=(3, 3))
            value, _ = chsh_optimal(T)
            searched = chsh_value(T, grid_chsh(T, normals))
            assert searched <= value + 1e-9
            assert searched > value - 1e-3

    def test_separable_stays_classical(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            terms = int(rng.integers(1, 5))
            weights = rng.dirichlet(np.ones(terms))
            a = random_directions(rng, terms) * rng.uniform(0, 1, size=(terms, 1))
            b = random_directions(rng, terms) * rng.uniform(0, 1, size=(terms, 1))
            T = sum(w * np.outer(x, y) for w, x, y in zip(weights, a, b))
            assert chsh_optimal(T)[0] <= CLASSICAL_BOUND + 1e-9

    def test_rotation_invariant(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            T = rng.uniform(-1, 1, size=(3, 3))
            r1, r2 = random_rotation(rng), random_rotation(rng)
            assert chsh_optimal(r1.T @ T @ r2)[0] == pytest.approx(chsh_optimal(T)[0], abs=1e-10)

    def test_from_table(self):
        t = expand(otc_pdo().matrix)
        assert chsh_from_table(t, 0, 1) == pytest.approx(TSIRELSON_BOUND)
        assert chsh_from_table(t, 1, 2, TEMPORAL_SETTINGS) == pytest.approx(TSIRELSON_BOUND)
        assert chsh_from_table(t, 0, 2, TEMPORAL_SETTINGS) == pytest.approx(-TSIRELSON_BOUND)

    def test_shape(self):
        with pytest.raises(InvalidArgumentError):
            chsh_optimal(np.eye(2))


class TestChshFromCounts:

    def test_exact_spatial(self):
        result = chsh_from_counts(quartet(PAIR_12), default_settings(PAIR_12), PAIR_12)
        assert result.value == pytest.approx(TSIRELSON_BOUND)
        assert result.stderr == 0.0
        assert result.source == 'exact'

    def test_exact_temporal_ignores_visibility(self):
        result = chsh_from_counts(quartet(PAIR_23, v=0.5), default_settings(PAIR_23), PAIR_23)
        assert result.value == pytest.approx(TSIRELSON_BOUND)

    def test_rotated_temporal_settings(self):
        u = NAMED_UNITARIES['H']
        settings = TEMPORAL_SETTINGS.rotated(np.eye(3), bloch_rotation(u))
        result = chsh_from_counts(quartet(PAIR_23, settings, u=u), settings, PAIR_23)
        assert result.value == pytest.approx(TSIRELSON_BOUND)

    def test_settings_inferred_from_counts(self):
        assert chsh_from_counts(quartet(PAIR_12)).value == pytest.approx(TSIRELSON_BOUND)

    def test_sampled(self):
        result = chsh_from_counts(quartet(PAIR_12, v=0.952, shots=100000, seed=8))
        assert result.source == 'counts'
        assert result.stderr > 0
        assert abs(result.value - 2 * np.sqrt(2) * 0.952) < 4 * result.stderr

    def test_seed_scan_stays_within_band(self):
        exact = 2 * np.sqrt(2) * 0.952
        values = []
        for seed in range(10):
            r = chsh_from_counts(quartet(PAIR_12, v=0.952, shots=20000, seed=seed))
            assert abs(r.value - exact) < 4 * r.stderr
            values.append(r.value)
        assert len(set(values)) > 1

    def test_needs_four_settings(self):
        with pytest.raises(InvalidArgumentError):
            chsh_from_counts(quartet(PAIR_12)[:3])

    def test_mismatched_quartet(self):
        tables = quartet(PAIR_12)
        tables[1], tables[2] = tables[2], tables[1]
        with pytest.raises(InvalidArgumentError):
            chsh_from_counts(tables, default_settings(PAIR_12))


class TestMonogamy:

    def test_exact_sums(self):
        results = {p: ChshResult(TSIRELSON_BOUND, 0.0, 'optimal', 'exact', p)
                   for p in (PAIR_12, PAIR_23, PAIR_13)}
        report = monogamy_check(results)
        assert set(report.pair_sums) == {('C12', 'C23'), ('C12', 'C13'), ('C23', 'C13')}
        for total, err in report.pair_sums.values():
            assert total == pytest.approx(4 * np.sqrt(2))
            assert err == 0.0
        assert all(s is None for s in report.sigmas.values())
        assert all(report.violated().values())

    def test_sigma(self):
        results = {
            PAIR_12: ChshResult(2.69, 0.02, 'x', 'counts', PAIR_12),
            PAIR_23: ChshResult(2.84, 0.02, 'x', 'counts', PAIR_23),
        }
        report = monogamy_check(results)
        total, err = report.pair_sums[('C12', 'C23')]
        assert total == pytest.approx(5.53)
        assert report.sigmas[('C12', 'C23')] == pytest.approx(1.53 / err)
        assert report.to_json()['sums'][0]['violated']

    def test_needs_shared_event(self):
        with pytest.raises(InvalidArgumentError):
            monogamy_check({PAIR_12: ChshResult(2.0, 0.0, 'x', 'exact', PAIR_12)})

    def test_result_validation(self):
        with pytest.raises(InvalidArgumentError):
            ChshResult(2.0, -1.0, 'x', 'exact')
        with pytest.raises(InvalidArgumentError):
            ChshResult(2.0, 0.0, 'x', 'guess')

    def test_result_respects_tsirelson(self):
        ChshResult(TSIRELSON_BOUND, 0.0, 'x', 'exact')
        ChshResult(-2.9, 0.02, 'x', 'counts')
        with pytest.raises(InvalidArgumentError):
            ChshResult(2.9, 0.0, 'x', 'exact')
        with pytest.raises(InvalidArgumentError):
            ChshResult(-3.0, 0.02, 'x', 'counts')

    def test_pure_three_qubit_states(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            psi = rng.normal(size=8) + 1j * rng.normal(size=8)
            psi /= np.linalg.norm(psi)
            table = expand(np.outer(psi, psi.conj()))
            c = {pair: chsh_optimal(correlation_3x3(table, *pair))[0]
                 for pair in ((0, 1), (1, 2), (0, 2))}
            assert c[(0, 1)] + c[(0, 2)] <= 4 + 1e-9
            assert c[(0, 1)] + c[(1, 2)] <= 4 + 1e-9
            assert c[(1, 2)] + c[(0, 2)] <= 4 + 1e-9


class TestClassicalBound:

    def test_oracle(self):
        assert len(deterministic_strategies()) == 16
        assert classical_bound_oracle() == CLASSICAL_BOUND

    def test_mixtures_respect_bound(self):
        rng = np.random.default_rng(21)
        values = np.array([strategy_chsh(s) for s in deterministic_strategies()])
        for _ in range(10):
            weights = rng.dirichlet(np.ones(len(values)))
            assert weights @ values <= CLASSICAL_BOUND + 1e-12


def test_pair_name():
    assert pair_name(PAIR_12) == 'C12'
    assert pair_name(PAIR_13) == 'C13'
