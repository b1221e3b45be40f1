#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
报告生成模块

report.json 分为 body（确定性内容，键排序后求 SHA-256）与 generated_at 时间戳两部分，
同一 (spec, seed) 两次运行的 body 逐字节相同。
"""

import csv
import hashlib
import json
import os
from datetime import datetime
from typing import Dict, List, Optional

import config
from utils.colors import Colors
from .bell import pair_name
from .experiment import RunReport
from .pdo import pair_marginals, to_plot_matrices


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, ensure_ascii=False, separators=(',', ':'))


def body_hash(body: Dict) -> str:
    return hashlib.sha256(canonical_json(body).encode('utf-8')).hexdigest()


def _plot_entries(pdo) -> Dict[str, Dict]:
    """R123 及全部两事件边缘态的柱状图数据"""
    entries = {'R123': to_plot_matrices(pdo)}
    for pair, m in pair_marginals(pdo).items():
        key = 'R' + ''.join(e.split('@')[0].lstrip('Q') for e in pair)
        entries[key] = to_plot_matrices(m)
    return entries


class ReportGenerator:
    """报告生成器"""

    def __init__(self, output_dir: str, outputs=None, verbose: bool = True):
        self.output_dir = output_dir
        self.outputs = tuple(outputs) if outputs is not None else ('report_json', 'coefficients_csv', 'counts_csv')
        self.verbose = verbose

    # ------------------------------------------------------------------
    # 报告内容
    # ------------------------------------------------------------------

    def build_body(self, run: RunReport) -> Dict:
        """与时间无关的报告主体"""
        body = {
            'provenance': dict(run.provenance),
            'spec': run.spec.to_json(),
            'quorum': {e.name: e.labels() for e in run.plan.ensembles},
            'physicality': {k: v.to_json() for k, v in sorted(run.physicality.items())},
        }

        rec = run.reconstruction
        if rec is not None:
            body['reconstruction'] = {
                'coefficients': {str(s): {'value': c.value, 'stderr': c.stderr} for s, c in rec.table.items()},
                'max_coefficient_error': rec.max_coefficient_error,
                'fidelities': dict(rec.fidelities),
                'completion_policy': rec.completion_policy,
                'zero_filled': list(rec.zero_filled),
                'threepoint': {k: {'value': v, 'stderr': e} for k, (v, e) in rec.threepoint_estimates().items()},
                'notes': list(rec.notes),
                'pdo': rec.pdo.to_json(),
                'plot': {
                    'reconstructed': _plot_entries(rec.pdo),
                    'theory': _plot_entries(rec.theory),
                },
            }

        if run.chsh:
            body['chsh'] = {pair_name(pair): r.to_json() for pair, r in run.chsh.items()}
        if run.monogamy is not None:
            body['monogamy'] = run.monogamy.to_json()
        if run.disturbance is not None:
            body['disturbance'] = run.disturbance.to_json()
        return body

    def summary_rows(self, run: RunReport) -> List[List]:
        """summary.csv：模拟值与参考实验值对照"""
        quantities = []
        for pair, r in run.chsh.items():
            quantities.append((pair_name(pair), r.value, r.stderr))
        if run.monogamy is not None:
            for (p, q), (total, err) in run.monogamy.pair_sums.items():
                quantities.append((f"{p}+{q}", total, err))
        rec = run.reconstruction
        if rec is not None:
            for name, value in rec.fidelities.items():
                quantities.append((name, value, None))
            quantities.append(('min_eigenvalue_R123', rec.physicality['R123'].min_eigenvalue, None))

        rows = []
        for name, value, err in quantities:
            ref, ref_err = config.EXPERIMENT_REFERENCE.get(name, (None, None))
            rows.append([name, repr(float(value)), _cell(err), _cell(ref), _cell(ref_err)])
        return rows

    # ------------------------------------------------------------------
    # 写文件
    # ------------------------------------------------------------------

    def generate(self, run: RunReport, generated_at: Optional[str] = None) -> Dict:
        """打印终端报告并写出全部请求的文件，返回 report.json 的内容"""
        os.makedirs(self.output_dir, exist_ok=True)
        body = self.build_body(run)
        report = {
            'body': body,
            'body_sha256': body_hash(body),
            'generated_at': generated_at or datetime.now().isoformat(),
        }

        if self.verbose:
            self._print_terminal_report(run)

        written = []
        if 'report_json' in self.outputs:
            path = os.path.join(self.output_dir, config.REPORT_FILENAME)
            with open(path, 'w', encoding='utf-8') as f:
                json.dump(report, f, indent=2, sort_keys=True, ensure_ascii=False)
                f.write('\n')
            written.append(path)

        if 'coefficients_csv' in self.outputs and run.reconstruction is not None:
            path = os.path.join(self.output_dir, config.COEFFICIENTS_FILENAME)
            self._write_csv(path, ['string', 'value', 'stderr'], run.reconstruction.table.to_csv_rows())
            written.append(path)

        if 'counts_csv' in self.outputs:
            path = os.path.join(self.output_dir, config.COUNTS_FILENAME)
            exact = run.spec.mode == 'exact'
            rows = []
            for label in run.plan.labels():
                rows.extend(run.counts[label].to_csv_rows())
            for tables in run.chsh_counts.values():
                for t in tables:
                    rows.extend(t.to_csv_rows())
            self._write_csv(path, ['setting', 'outcome_tuple', 'probability' if exact else 'count'], rows)
            written.append(path)

        path = os.path.join(self.output_dir, config.SUMMARY_FILENAME)
        self._write_csv(path, ['quantity', 'value', 'stderr', 'reference', 'reference_uncertainty'],
                        self.summary_rows(run))
        written.append(path)

        if self.verbose:
            print(f"\n{Colors.BLUE}💾 报告已保存:{Colors.ENDC}")
            for p in written:
                print(f"   {p}")
        return report

    @staticmethod
    def _write_csv(path: str, header: List[str], rows: List[List]):
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)

    def _print_terminal_report(self, run: RunReport):
        print(f"\n{Colors.BOLD}结果概要:{Colors.ENDC}")
        print("=" * 80)
        print(f"  {'量':<22}{'模拟值':>12}{'标准误差':>12}{'参考值':>12}")
        print("-" * 80)
        for name, value, err, ref, ref_err in self.summary_rows(run):
            err_text = f"{float(err):.4f}" if err else '-'
            if not ref:
                ref_text = '-'
            else:
                ref_text = f"{float(ref):g}±{float(ref_err):g}" if ref_err else f"{float(ref):g}"
            print(f"  {name:<22}{float(value):>12.4f}{err_text:>12}{ref_text:>12}")

        rec = run.reconstruction
        if rec is not None:
            check = rec.physicality['R123']
            print(f"\n  {Colors.CYAN}R123 负特征子空间维数: {check.negative_subspace_dim}{Colors.ENDC}")
            if rec.zero_filled:
                print(f"  补零的三体系数: {len(rec.zero_filled)} 个（{rec.completion_policy}）")

        if run.monogamy is not None:
            broken = [f"{p}+{q}" for (p, q), v in run.monogamy.violated().items() if v]
            if broken:
                print(f"\n  {Colors.RED}🔥 违反单配性界 4: {', '.join(broken)}{Colors.ENDC}")
            else:
                print(f"\n  {Colors.GREEN}✅ 未观察到单配性违反{Colors.ENDC}")
        print("=" * 80)


def _cell(x) -> str:
    if x is None:
        return ''
    return repr(float(x))
