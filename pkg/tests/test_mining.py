import random

import numpy as np
import pytest

from logsift.core import Severity
from logsift.mining import (
    CategoryRules,
    EventView,
    JobRecord,
    NoTimestamps,
    OverlappingAllocations,
    build_category_domain_matrix,
    categorize,
    category_cdf,
    expand_nodelist,
    fingerprint,
    join_jobs,
    read_jobs_csv,
    severity_distribution,
    temporal_histogram,
    validate_jobs,
    ward_cluster,
)


def _ev(template_id="t1", severity=Severity.INFO, ts=None, host=None, line_no=1):
    return EventView(
        line_no=line_no,
        template_id=template_id,
        variables={},
        severity=severity,
        timestamp=ts,
        host=host,
    )


class TestFingerprint:
    def test_single_template(self):
        rows = fingerprint([_ev(ts=1.0), _ev(ts=3.0), _ev(ts=2.0)])
        assert len(rows) == 1
        row = rows[0]
        assert row.count == 3
        assert row.first_seen == 1.0
        assert row.last_seen == 3.0

    def test_partition(self):
        events = [_ev("a"), _ev("b"), _ev("a")]
        rows = fingerprint(events)
        assert len(rows) == 2
        assert sum(r.count for r in rows) == 3
        assert rows[0].template_id == "a"  # sorted by count desc

    def test_distinct_hosts(self):
        events = [_ev(host="n1"), _ev(host="n2"), _ev(host="n1"), _ev()]
        assert fingerprint(events)[0].distinct_hosts == 2

    def test_most_severe_wins(self):
        events = [
            _ev(severity=Severity.INFO),
            _ev(severity=Severity.KERNEL_PANIC_CRASH),
            _ev(severity=Severity.ERROR),
        ]
        assert fingerprint(events)[0].severity == Severity.KERNEL_PANIC_CRASH

    def test_unknown_is_least_severe(self):
        events = [_ev(severity=Severity.UNKNOWN), _ev(severity=Severity.INFO)]
        assert fingerprint(events)[0].severity == Severity.INFO

    def test_pattern_lookup(self):
        rows = fingerprint([_ev("abc")], patterns={"abc": "conn from <ip>"})
        assert rows[0].pattern == "conn from <ip>"

    def test_bounded_by_generating_templates(self):
        from logsift.corpus import CorpusGenerator, CorpusSpec
        from logsift.matching import compile_templates, match_record

        gen = CorpusGenerator(CorpusSpec(k_templates=50, n_lines=5_000, seed=2))
        cset = compile_templates(gen.templates)
        events = (match_record(cset, r) for r, _ in gen.lines())
        rows = fingerprint(e for e in events if e is not None)
        assert len(rows) <= 50
        assert sum(r.count for r in rows) == 5_000


class TestSeverityDistribution:
    def test_fifty_fifty(self):
        events = [_ev(severity=Severity.INFO)] * 2 + [_ev(severity=Severity.ERROR)] * 2
        rows = severity_distribution(events)
        assert all(pct == 50.0 for _, _, pct in rows)

    def test_single_category(self):
        rows = severity_distribution([_ev(severity=Severity.WARNING)])
        assert rows == [(Severity.WARNING, 1, 100.0)]

    def test_reference_proportions_within_half_point(self):
        # 10^5 synthetic messages weighted to the published severity mix
        from logsift.core import classify_severity

        exemplars = {
            "INFO": "session opened for user ops",
            "ERROR": "request failed with code 7",
            "DISK_ERROR": "sd 0:0:0:0 I/O error on sector 8",
            "WARNING": "warn: queue depth degraded",
            "HARDWARE_ERROR": "corrected ecc event on dimm 2",
            "CRITICAL_FATAL": "fatal bus fault on gpu 1",
            "KERNEL_PANIC_CRASH": "kernel panic - not syncing",
        }
        weights = {
            "INFO": 40.7,
            "ERROR": 29.7,
            "DISK_ERROR": 20.3,
            "WARNING": 6.2,
            "HARDWARE_ERROR": 2.4,
            "CRITICAL_FATAL": 0.07,
            "KERNEL_PANIC_CRASH": 0.0003,
        }
        rng = random.Random(1001)
        names = list(weights)
        cum = []
        total = 0.0
        for name in names:
            total += weights[name]
            cum.append(total)
        events = []
        for i in range(100_000):
            r = rng.random() * total
            idx = next(j for j, c in enumerate(cum) if r <= c)
            sev = classify_severity(exemplars[names[idx]])
            assert sev.value == names[idx]
            events.append(_ev(severity=sev, line_no=i + 1))
        rows = {sev.value: pct for sev, _, pct in severity_distribution(events)}
        for name in ("INFO", "ERROR", "DISK_ERROR", "WARNING", "HARDWARE_ERROR"):
            assert abs(rows[name] - weights[name]) <= 0.5


class TestTemporal:
    def test_same_window(self):
        series = temporal_histogram([_ev(ts=0.0), _ev(ts=299.0)])
        assert len(series.window_starts) == 1
        assert series.totals() == (2,)

    def test_next_window(self):
        series = temporal_histogram([_ev(ts=299.0), _ev(ts=300.0)])
        assert series.window_starts == (0.0, 300.0)
        assert series.totals() == (1, 1)

    def test_uniform_rate(self):
        events = [_ev(ts=float(t)) for t in range(3600)]
        series = temporal_histogram(events)
        assert len(series.window_starts) == 12
        assert series.totals() == (300,) * 12

    def test_gap_windows_zero_filled(self):
        series = temporal_histogram([_ev(ts=0.0), _ev(ts=1000.0)])
        assert series.window_starts == (0.0, 300.0, 600.0, 900.0)
        assert series.totals() == (1, 0, 0, 1)

    def test_no_timestamps(self):
        with pytest.raises(NoTimestamps):
            temporal_histogram([_ev(), _ev()])

    def test_category_key_defaults_to_severity(self):
        events = [_ev(ts=1.0, severity=Severity.ERROR), _ev(ts=2.0)]
        series = temporal_histogram(events)
        assert set(series.categories) == {"ERROR", "INFO"}

    def test_conservation(self):
        rng = random.Random(3)
        events = [_ev(ts=rng.uniform(0, 5000)) for _ in range(500)]
        series = temporal_histogram(events)
        assert sum(series.totals()) == 500


class TestCdf:
    def test_constant_rate_linear(self):
        events = [_ev(ts=float(t)) for t in range(1200)]
        series = temporal_histogram(events)
        cdf = category_cdf(series)["INFO"]
        assert cdf == (0.25, 0.5, 0.75, 1.0)

    def test_step_function(self):
        events = [_ev(ts=10.0)] * 5 + [_ev(ts=910.0, severity=Severity.ERROR)]
        series = temporal_histogram(events)
        cdf = category_cdf(series)["INFO"]
        assert cdf[0] == 1.0
        assert cdf[-1] == 1.0

    def test_monotone_ends_at_one(self):
        rng = random.Random(8)
        events = [_ev(ts=rng.uniform(0, 50_000)) for _ in range(700)]
        cdf = category_cdf(temporal_histogram(events))["INFO"]
        assert all(a <= b for a, b in zip(cdf, cdf[1:]))
        assert cdf[-1] == 1.0

    def test_front_loaded_category(self):
        # 90% of events in the first two of 28 "days" (scaled to windows)
        day = 300.0 * 288  # 288 five-minute windows per day
        events = [_ev(ts=(i % 2) * day + 10.0) for i in range(900)]
        events += [_ev(ts=(2 + i % 26) * day + 10.0) for i in range(100)]
        series = temporal_histogram(events)
        cdf = category_cdf(series)["INFO"]
        idx_two_days = next(
            i for i, t in enumerate(series.window_starts) if t >= 2 * day
        )
        assert cdf[idx_two_days - 1] == pytest.approx(0.9, abs=0.01)


class TestNodelist:
    def test_range(self):
        assert expand_nodelist("nid[0001-0004]") == [
            "nid0001",
            "nid0002",
            "nid0003",
            "nid0004",
        ]

    def test_list_and_range(self):
        assert expand_nodelist("n[1-2,5]") == ["n1", "n2", "n5"]

    def test_bare_names(self):
        assert expand_nodelist("login1,login2") == ["login1", "login2"]

    def test_padding_preserved(self):
        assert expand_nodelist("x[08-11]") == ["x08", "x09", "x10", "x11"]


class TestJobs:
    def test_join_inside_interval(self):
        jobs = [JobRecord("j1", "physics", frozenset({"n1"}), 100.0, 200.0)]
        joined = join_jobs([_ev(ts=150.0, host="n1")], jobs)
        assert joined[0].job_id == "j1"
        assert joined[0].account == "physics"

    def test_event_between_jobs_unmatched(self):
        jobs = [
            JobRecord("j1", "a", frozenset({"n1"}), 0.0, 100.0),
            JobRecord("j2", "b", frozenset({"n1"}), 200.0, 300.0),
        ]
        joined = join_jobs([_ev(ts=150.0, host="n1")], jobs)
        assert not joined[0].matched

    def test_half_open_interval(self):
        jobs = [JobRecord("j1", "a", frozenset({"n1"}), 100.0, 200.0)]
        at_start = join_jobs([_ev(ts=100.0, host="n1")], jobs)
        at_end = join_jobs([_ev(ts=200.0, host="n1")], jobs)
        assert at_start[0].matched
        assert not at_end[0].matched

    def test_overlap_rejected(self):
        jobs = [
            JobRecord("j1", "a", frozenset({"n1", "n2"}), 0.0, 100.0),
            JobRecord("j2", "b", frozenset({"n2"}), 50.0, 150.0),
        ]
        with pytest.raises(OverlappingAllocations) as err:
            join_jobs([_ev(ts=10.0, host="n1")], jobs)
        assert ("j1", "j2", "n2") in err.value.offenders

    def test_unmatched_not_dropped(self):
        jobs = [JobRecord("j1", "a", frozenset({"n1"}), 0.0, 10.0)]
        events = [_ev(ts=5.0, host="zz"), _ev(ts=5.0), _ev(host="n1")]
        joined = join_jobs(events, jobs)
        assert len(joined) == 3
        assert all(not j.matched for j in joined)

    def test_random_schedules_unique_join(self):
        rng = random.Random(77)
        for _ in range(25):
            nodes = [f"n{i}" for i in range(rng.randint(1, 6))]
            jobs = []
            jid = 0
            for node in nodes:
                t = 0.0
                for _ in range(rng.randint(1, 8)):
                    start = t + rng.uniform(0.0, 5.0)
                    end = start + rng.uniform(1.0, 20.0)
                    jobs.append(
                        JobRecord(f"j{jid}", f"acct{jid % 3}", frozenset({node}), start, end)
                    )
                    jid += 1
                    t = end
            validate_jobs(jobs)
            events = []
            expected = []
            for job in jobs:
                node = next(iter(job.nodes))
                t = rng.uniform(job.start, job.end - 1e-9)
                events.append(_ev(ts=t, host=node))
                expected.append(job.job_id)
            joined = join_jobs(events, jobs)
            assert [j.job_id for j in joined] == expected

    def test_read_jobs_csv(self, tmp_path):
        path = tmp_path / "jobs.csv"
        path.write_text(
            "job_id,account,start_epoch,end_epoch,node_list\n"
            'j1,chem,100,200,"nid[0001-0002]"\n'
            "j2,bio,300,400,nid0001\n",
            encoding="utf-8",
        )
        jobs = read_jobs_csv(path)
        assert len(jobs) == 2
        assert jobs[0].nodes == frozenset({"nid0001", "nid0002"})
        assert jobs[1].account == "bio"


class TestCategorize:
    def test_oom_is_bb(self):
        assert categorize("killed process <pid> out of memory") == "BB"
        assert categorize("oom-killer invoked") == "BB"

    def test_cxi_timeout_is_aa(self):
        assert categorize("cxi retry timeout on nic <id>") == "AA"

    def test_unknown_is_zz(self):
        assert categorize("completely unrelated text") == "ZZ"

    def test_conjunction_rule(self):
        assert categorize("service sshd fail to start") == "AD"

    def test_all_table_ids_present(self):
        from logsift.mining import default_category_rules

        ids = set(default_category_rules().ids)
        expected = {
            "AA", "AB", "AC", "AD", "AE", "AF", "AH", "AI", "AJ", "AK",
            "AL", "AM", "AO", "AP", "AQ", "AR", "AS", "AT", "AU", "AV",
            "AW", "AX", "AY", "AZ", "BA", "BB",
        }
        assert ids == expected

    def test_custom_rules(self, tmp_path):
        path = tmp_path / "cats.tsv"
        path.write_text("QQ\tQuantum: Flux\tflux&capacitor\n", encoding="utf-8")
        rules = CategoryRules.load(path)
        assert rules.categorize("flux in the capacitor bank") == "QQ"
        assert rules.categorize("flux only") == "ZZ"
        assert rules.name_of("QQ") == "Quantum: Flux"


class TestCategoryDomainMatrix:
    def _joined(self):
        jobs = [
            JobRecord("j1", "physics", frozenset({"n1"}), 0.0, 1000.0),
            JobRecord("j2", "biology", frozenset({"n2"}), 0.0, 1000.0),
        ]
        patterns = {
            "t_oom": "process killed out of memory",
            "t_net": "cxi timeout on port <p>",
        }
        events = [
            _ev("t_oom", ts=10.0, host="n1"),
            _ev("t_oom", ts=20.0, host="n1"),
            _ev("t_net", ts=30.0, host="n2"),
            _ev("t_oom", ts=40.0, host="n2"),
        ]
        return join_jobs(events, jobs), patterns

    def test_counts(self):
        joined, patterns = self._joined()
        matrix = build_category_domain_matrix(joined, patterns)
        assert matrix.rows == ("AA", "BB")
        assert matrix.cols == ("biology", "physics")
        bb = matrix.rows.index("BB")
        physics = matrix.cols.index("physics")
        assert matrix.cells[bb, physics] == 2
        assert matrix.cells.sum() == 4

    def test_ward_cluster_conserves_cells(self):
        joined, patterns = self._joined()
        matrix = build_category_domain_matrix(joined, patterns)
        clustered = ward_cluster(matrix)
        assert sorted(clustered.row_order) == list(range(len(matrix.rows)))
        assert sorted(clustered.col_order) == list(range(len(matrix.cols)))
        assert clustered.reordered_cells().sum() == matrix.cells.sum()

    def test_ward_cluster_groups_similar_rows(self):
        rows = ("r1", "r2", "r3", "r4")
        cols = ("c1", "c2", "c3")
        cells = np.array(
            [
                [100, 0, 0],
                [0, 80, 90],
                [110, 0, 0],
                [0, 70, 95],
            ]
        )
        from logsift.mining import CategoryDomainMatrix

        clustered = ward_cluster(CategoryDomainMatrix(rows, cols, cells))
        order = list(clustered.row_order)
        pos = {r: i for i, r in enumerate(order)}
        assert abs(pos[0] - pos[2]) == 1  # the two "c1-heavy" rows
        assert abs(pos[1] - pos[3]) == 1
