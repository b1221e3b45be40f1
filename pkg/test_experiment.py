#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
端到端测试：实验运行器、报告文件、命令行退出码
"""

import csv
import json
import os

import numpy as np
import pytest

import cli
import config
from core.bell import PAIR_12, PAIR_13, PAIR_23
from core.errors import IncompleteQuorumError, NumericalError, SpecError
from core.experiment import ExperimentRunner
from core.report import ReportGenerator, body_hash
from core.spec import ExperimentSpec

SQRT2 = np.sqrt(2.0)


@pytest.fixture(scope='module')
def exact_run():
    spec = ExperimentSpec(seed=0, visibility=1.0, mode='exact')
    return ExperimentRunner(spec, verbose=False).run()


@pytest.fixture(scope='module')
def calibration_run():
    spec = ExperimentSpec(seed=42, visibility=0.952, shots_per_setting=100000)
    mp = pytest.MonkeyPatch()
    mp.setattr(config, 'BOOTSTRAP_RESAMPLES', 30)
    try:
        yield ExperimentRunner(spec, verbose=False).run()
    finally:
        mp.undo()


def read_csv(path):
    with open(path, newline='', encoding='utf-8') as f:
        return list(csv.reader(f))


class TestExactRun:

    def test_monogamy_sums(self, exact_run):
        for total, err in exact_run.monogamy.pair_sums.values():
            assert total == pytest.approx(4 * SQRT2)
            assert err == 0.0
        assert all(exact_run.monogamy.violated().values())

    def test_reconstructed_spectrum(self, exact_run):
        check = exact_run.physicality['R123_reconstructed']
        assert check.min_eigenvalue == pytest.approx(-0.25)
        assert exact_run.physicality['R123_canonical'].min_eigenvalue == pytest.approx(-0.25)
        assert exact_run.physicality['R12_two_time_canonical'].min_eigenvalue == pytest.approx(-0.5)

    def test_no_stderr(self, exact_run):
        assert all(r.stderr == 0.0 for r in exact_run.chsh.values())
        assert all(not c.stderr for _, c in exact_run.reconstruction.table.items())

    def test_chsh_sources(self, exact_run):
        assert exact_run.chsh[PAIR_12].source == 'exact'
        assert exact_run.chsh[PAIR_23].source == 'exact'
        assert exact_run.chsh[PAIR_13].source == 'reconstructed_marginal'

    def test_disturbance(self, exact_run):
        assert exact_run.disturbance.as_pair() == (pytest.approx(-1.0), pytest.approx(0.0, abs=1e-12))

    def test_otc_unitary(self):
        spec = ExperimentSpec(seed=0, otc_unitary='H', mode='exact')
        run = ExperimentRunner(spec, verbose=False).run()
        assert run.reconstruction.max_coefficient_error < 1e-10
        for pair in (PAIR_12, PAIR_23, PAIR_13):
            assert run.chsh[pair].value == pytest.approx(2 * SQRT2)

    def test_stage_selection(self):
        spec = ExperimentSpec(seed=0, mode='exact')
        run = ExperimentRunner(spec, stages=('tomography',), verbose=False).run()
        assert run.reconstruction is not None
        assert not run.chsh and run.monogamy is None and run.disturbance is None
        with pytest.raises(ValueError):
            ExperimentRunner(spec, stages=('plots',))


class TestCalibrationRun:

    def test_fidelity_and_c12(self, calibration_run):
        rec = calibration_run.reconstruction
        assert abs(rec.fidelities['F12'] - 0.964) < 0.005
        assert abs(rec.fidelities['F13'] - 0.963) < 0.005
        assert abs(calibration_run.chsh[PAIR_12].value - 2 * SQRT2 * 0.952) < 0.03

    def test_temporal_chsh_is_ideal(self, calibration_run):
        assert abs(calibration_run.chsh[PAIR_23].value - 2 * SQRT2) < 0.03

    def test_monogamy_sums(self, calibration_run):
        sums = calibration_run.monogamy.pair_sums
        assert sums[('C12', 'C23')][0] == pytest.approx(5.52, abs=0.05)
        assert sums[('C23', 'C13')][0] == pytest.approx(5.52, abs=0.05)
        assert sums[('C12', 'C13')][0] == pytest.approx(5.385, abs=0.05)
        for key, sigma in calibration_run.monogamy.sigmas.items():
            assert sigma > 50, key

    def test_c13_bootstrap_error(self, calibration_run):
        c13 = calibration_run.chsh[PAIR_13]
        assert 0 < c13.stderr < 0.05

    def test_provenance(self, calibration_run):
        p = calibration_run.provenance
        assert p['seed'] == 42
        assert p['tool_version'] == config.TOOL_VERSION
        assert len(p['spec_hash']) == 64


class TestReport:

    def small_spec(self, seed=5):
        return ExperimentSpec(seed=seed, visibility=0.952, shots_per_setting=2000)

    def run(self, spec, monkeypatch):
        monkeypatch.setattr(config, 'BOOTSTRAP_RESAMPLES', 10)
        return ExperimentRunner(spec, verbose=False).run()

    def test_body_is_deterministic(self, tmp_path, monkeypatch):
        a = ReportGenerator(str(tmp_path / 'a'), verbose=False).generate(self.run(self.small_spec(), monkeypatch))
        b = ReportGenerator(str(tmp_path / 'b'), verbose=False).generate(self.run(self.small_spec(), monkeypatch))
        assert a['body_sha256'] == b['body_sha256']
        assert a['body'] == b['body']
        with open(tmp_path / 'a' / config.REPORT_FILENAME, encoding='utf-8') as f:
            on_disk = json.load(f)
        assert body_hash(on_disk['body']) == a['body_sha256']
        assert 'generated_at' in on_disk

    def test_seed_changes_counts(self, tmp_path, monkeypatch):
        a = self.run(self.small_spec(5), monkeypatch)
        b = self.run(self.small_spec(6), monkeypatch)
        label = a.plan.labels()[0]
        assert a.counts[label].counts != b.counts[label].counts

    def test_files(self, tmp_path, monkeypatch):
        run = self.run(self.small_spec(), monkeypatch)
        ReportGenerator(str(tmp_path), run.spec.outputs, verbose=False).generate(run, generated_at='fixed')

        coefficients = read_csv(tmp_path / config.COEFFICIENTS_FILENAME)
        assert coefficients[0] == ['string', 'value', 'stderr']
        assert len(coefficients) == 1 + 64

        counts = read_csv(tmp_path / config.COUNTS_FILENAME)
        assert counts[0] == ['setting', 'outcome_tuple', 'count']
        settings = {row[0] for row in counts[1:]}
        assert len(settings) == 36 + 8
        assert sum(int(row[2]) for row in counts[1:]) == (36 + 8) * 2000

        summary = {row[0]: row for row in read_csv(tmp_path / config.SUMMARY_FILENAME)[1:]}
        assert summary['C12'][3] == '2.69'
        assert summary['C12+C23'][4] == '0.03'
        assert summary['min_eigenvalue_R123'][3] == ''

    def test_report_body_contents(self, exact_run, tmp_path):
        report = ReportGenerator(str(tmp_path), ('report_json',), verbose=False).generate(exact_run)
        body = report['body']
        assert set(body['chsh']) == {'C12', 'C23', 'C13'}
        assert body['reconstruction']['completion_policy'] == 'zero_fill'
        assert set(body['reconstruction']['plot']['theory']) == {'R123', 'R12', 'R13', 'R23'}
        assert not os.path.exists(tmp_path / config.COUNTS_FILENAME)

    def test_exact_counts_are_probabilities(self, exact_run, tmp_path):
        ReportGenerator(str(tmp_path), ('counts_csv',), verbose=False).generate(exact_run)
        rows = read_csv(tmp_path / config.COUNTS_FILENAME)
        assert rows[0][2] == 'probability'


class TestCli:

    def write_spec(self, tmp_path, doc):
        path = tmp_path / 'spec.json'
        path.write_text(json.dumps(doc), encoding='utf-8')
        return str(path)

    def test_run_exact(self, tmp_path):
        spec = self.write_spec(tmp_path, {'seed': 1})
        out = tmp_path / 'out'
        code = cli.main(['run', spec, '--exact', '--visibility', '0.952', '--out', str(out), '--quiet'])
        assert code == cli.EXIT_OK
        with open(out / config.REPORT_FILENAME, encoding='utf-8') as f:
            body = json.load(f)['body']
        assert body['spec']['mode'] == 'exact'
        assert body['spec']['source']['visibility'] == 0.952
        assert body['reconstruction']['fidelities']['F12'] == pytest.approx(0.964)

    def test_sampled_flag_overrides_exact_file(self, tmp_path, monkeypatch):
        monkeypatch.setattr(config, 'BOOTSTRAP_RESAMPLES', 5)
        spec = self.write_spec(tmp_path, {'seed': 1, 'mode': 'exact'})
        out = tmp_path / 'out'
        code = cli.main(['tomo', spec, '--sampled', '--shots', '500', '--out', str(out), '--quiet'])
        assert code == cli.EXIT_OK
        with open(out / config.REPORT_FILENAME, encoding='utf-8') as f:
            body = json.load(f)['body']
        assert body['spec']['mode'] == 'sampled'
        assert body['spec']['shots_per_setting'] == 500

    def test_exact_and_sampled_conflict(self, tmp_path):
        spec = self.write_spec(tmp_path, {'seed': 1})
        assert cli.main(['run', spec, '--exact', '--sampled']) == cli.EXIT_SPEC

    def test_shots_ignored_in_exact_mode_warns(self, tmp_path, capsys):
        spec = self.write_spec(tmp_path, {'seed': 1, 'mode': 'exact'})
        code = cli.main(['tomo', spec, '--shots', '500', '--out', str(tmp_path / 'o'), '--quiet'])
        assert code == cli.EXIT_OK
        assert '--sampled' in capsys.readouterr().out

    def test_tomo_subcommand(self, tmp_path):
        spec = self.write_spec(tmp_path, {'seed': 1, 'mode': 'exact'})
        assert cli.main(['tomo', spec, '--out', str(tmp_path / 'o'), '--quiet']) == cli.EXIT_OK
        with open(tmp_path / 'o' / config.REPORT_FILENAME, encoding='utf-8') as f:
            assert 'chsh' not in json.load(f)['body']

    def test_spec_error(self, tmp_path):
        spec = self.write_spec(tmp_path, {'source': {'visibility': 1.7}})
        assert cli.main(['run', spec, '--quiet']) == cli.EXIT_SPEC

    def test_missing_file(self, tmp_path):
        assert cli.main(['run', str(tmp_path / 'nope.json')]) == cli.EXIT_SPEC

    def test_bad_flag(self):
        assert cli.main(['run', '--shots', 'many']) == cli.EXIT_SPEC

    def test_numerical_failure(self, tmp_path, monkeypatch):
        monkeypatch.setattr(config, 'JACOBI_MAX_SWEEPS', 0)
        spec = self.write_spec(tmp_path, {'seed': 1, 'mode': 'exact'})
        assert cli.main(['run', spec, '--out', str(tmp_path / 'o'), '--quiet']) == cli.EXIT_INTERNAL

    def test_runner_attaches_stage(self, monkeypatch):
        monkeypatch.setattr(config, 'JACOBI_MAX_SWEEPS', 0)
        with pytest.raises(NumericalError) as info:
            ExperimentRunner(ExperimentSpec(seed=0, mode='exact'), verbose=False).run()
        assert info.value.stage == 'PDO 层析重建'

    def test_demo_disturbance(self, capsys):
        assert cli.main(['demo-disturbance', '--visibility', '0.5']) == cli.EXIT_OK
        assert '-0.5000' in capsys.readouterr().out

    def test_exit_code_mapping(self):
        assert cli.exit_code_for(SpecError('x')) == 2
        assert cli.exit_code_for(IncompleteQuorumError(['B@t1:Z A@t1:Z'])) == 3
        assert cli.exit_code_for(NumericalError('x')) == 4
