"""Oracle labeling and the property checkers."""

from __future__ import annotations

import random

import pytest

from lpcc import (
    CheckFailure,
    Graph,
    LabelArray,
    assert_same_partition,
    check_connectivity_preserved,
    check_fib_profile,
    check_step_bounds,
    duplication_stress,
    gap_sequence,
    generate_seq_path,
    generate_shuffled_path,
    oracle_components,
    run,
)
from conftest import traced_path_graph, seeded_corpus


class TestOracleComponents:
    def test_traced_path(self):
        assert oracle_components(traced_path_graph()).to_dict() == {1: 1, 2: 1, 3: 1, 4: 1}

    def test_multiple_components_and_isolated(self):
        g = Graph.from_edges([(1, 2), (4, 5), (5, 6)], extra_vertices=[9])
        assert oracle_components(g).to_dict() == {
            1: 1, 2: 1, 4: 4, 5: 4, 6: 4, 9: 9,
        }

    def test_invariant_under_edge_and_vertex_order(self):
        pairs = generate_shuffled_path(60, 2).edge_pairs()
        base = oracle_components(Graph.from_edges(pairs))
        for seed in (1, 2, 3):
            shuffled = list(pairs)
            random.Random(seed).shuffle(shuffled)
            flipped = [(v, u) if seed % 2 else (u, v) for u, v in shuffled]
            assert oracle_components(Graph.from_edges(flipped)) == base


class TestAssertSamePartition:
    def test_pass(self):
        assert_same_partition(
            LabelArray.from_dict({1: 1, 2: 1}), LabelArray.from_dict({1: 1, 2: 1})
        )

    def test_universe_mismatch(self):
        with pytest.raises(ValueError):
            assert_same_partition(
                LabelArray.from_dict({1: 1}), LabelArray.from_dict({1: 1, 2: 2})
            )

    def test_diff_lists_vertices(self):
        a = LabelArray.from_dict({1: 1, 2: 2, 3: 3})
        b = LabelArray.from_dict({1: 1, 2: 1, 3: 3})
        with pytest.raises(CheckFailure) as err:
            assert_same_partition(a, b)
        assert "vertex 2" in str(err.value)

    def test_diff_is_capped_at_100(self):
        a = LabelArray.from_dict({v: v for v in range(300)})
        b = LabelArray.from_dict({v: 0 for v in range(300)})
        with pytest.raises(CheckFailure) as err:
            assert_same_partition(a, b)
        message = str(err.value)
        assert message.count("vertex") == 100
        assert "more" in message


class TestGapSequence:
    def test_prefix(self):
        assert gap_sequence(8) == [2, 3, 5, 8, 13, 21, 34, 55]

    def test_recurrence(self):
        gaps = gap_sequence(20)
        for k in range(2, 20):
            assert gaps[k] == gaps[k - 1] + gaps[k - 2]

    def test_validation(self):
        with pytest.raises(ValueError):
            gap_sequence(-1)


class TestFibProfile:
    def test_one_step_on_path_100(self):
        r = run(generate_seq_path(100), record_labels=True)
        check_fib_profile(100, 1, r.history.labels[1])
        # gap after one step is 2: every vertex from 3 up holds v - 2
        assert r.history.labels[1][50] == 48
        assert r.history.labels[1][3] == 1

    def test_three_steps_on_path_100(self):
        r = run(generate_seq_path(100), record_labels=True)
        check_fib_profile(100, 3, r.history.labels[3])
        assert r.history.labels[3][50] == 45

    def test_converged_small_path(self):
        r = run(generate_seq_path(4), record_labels=True)
        final = r.history.labels[-1]
        assert set(final.values.tolist()) == {1}

    def test_rejects_wrong_labels(self):
        r = run(generate_seq_path(100), record_labels=True)
        labels = r.history.labels[1].copy()
        labels.values[49] = 7
        with pytest.raises(CheckFailure) as err:
            check_fib_profile(100, 1, labels)
        assert "vertex 50" in str(err.value)

    def test_rejects_bad_universe_or_k(self):
        r = run(generate_seq_path(10), record_labels=True)
        with pytest.raises(ValueError):
            check_fib_profile(12, 1, r.history.labels[1])
        with pytest.raises(ValueError):
            check_fib_profile(10, 0, r.history.labels[0])


class TestStepBounds:
    def test_seq_path_table_value_passes(self):
        assert check_step_bounds("seq_path", 2**20, 31) == 32.0

    def test_four_path_pass_and_fail(self):
        check_step_bounds("four_path", 4, 3)
        with pytest.raises(CheckFailure):
            check_step_bounds("four_path", 4, 5)

    def test_star_pair(self):
        check_step_bounds("star_pair", 12, 3)
        with pytest.raises(CheckFailure):
            check_step_bounds("star_pair", 12, 4)

    def test_arbitrary_path_bound(self):
        assert check_step_bounds("path", 256, 14) == 27.0

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            check_step_bounds("torus", 9, 1)


class TestConnectivityPreserved:
    def test_holds_on_runs(self):
        for _, g in seeded_corpus(8):
            if g.num_vertices > 64:
                continue
            r = run(g, record_history=True)
            check_connectivity_preserved(r.history, g)

    def test_detects_corruption(self):
        g = traced_path_graph()
        r = run(g, record_history=True)
        # cut vertex 2 loose in one snapshot
        r.history.edges[2] = [
            (u, v) for u, v in r.history.edge_pairs(2) if 2 not in (u, v)
        ]
        r.history.labels[2].values[1] = 2
        with pytest.raises(CheckFailure):
            check_connectivity_preserved(r.history, g)

    def test_requires_history(self):
        from lpcc import RunHistory

        with pytest.raises(ValueError):
            check_connectivity_preserved(RunHistory(), traced_path_graph())


class TestDuplicationStress:
    def test_report_validates_on_64(self):
        rep = duplication_stress(64)
        rep.validate()
        assert rep.m == 63
        assert max(rep.with_dedup_sizes) <= 126
        assert rep.label2_holders[:9] == [3, 4, 5, 7, 10, 15, 23, 36, 57]

    def test_growth_is_strict_early(self):
        rep = duplication_stress(32)
        sizes = rep.without_dedup_sizes
        assert sizes[1] > sizes[0] and sizes[2] > sizes[1] and sizes[3] > sizes[2]

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            duplication_stress(8)

    def test_validate_catches_tampering(self):
        rep = duplication_stress(64)
        rep.with_dedup_sizes[0] = 10_000
        with pytest.raises(CheckFailure):
            rep.validate()
