import pytest
from hypothesis import given
from hypothesis import strategies as st

from logsift.core import parse_template
from logsift.matching import compile_templates
from logsift.perturb import (
    ALL_KINDS,
    Inapplicable,
    Perturbation,
    PerturbationKind,
    evaluate,
    matcher_extractor,
    perturb,
    robustness_csv,
)

MSG = "out of memory: killed process 1234 on node0003"


def _p(kind, seed=0):
    return Perturbation(kind=kind, seed=seed)


class TestDeterminism:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_same_seed_same_output(self, kind):
        rich = "out of memory: killed process (1234) on node0003"
        first = perturb(rich, _p(kind, seed=5))
        assert perturb(rich, _p(kind, seed=5)) == first

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_every_kind_applicable_to_rich_message(self, kind):
        rich = "out of memory: killed process (1234) on node0003"
        outputs = {perturb(rich, _p(kind, seed=seed)) for seed in range(12)}
        assert len(outputs) >= 1
        assert all(out != "" for out in outputs)


class TestKindContracts:
    def test_typo_changes_exactly_one_char(self):
        for seed in range(20):
            out = perturb(MSG, _p(PerturbationKind.TYPO, seed))
            assert len(out) == len(MSG)
            diffs = [i for i, (a, b) in enumerate(zip(MSG, out)) if a != b]
            assert len(diffs) == 1
            assert MSG[diffs[0]].isalpha()

    def test_single_letter_typo_metric_footprint(self):
        # out -> ovt: one substituted letter, visible at the word level
        out = "out of memory: killed"
        typo = "ovt of memory: killed"
        from logsift.metrics import levenshtein, word_error_rate

        assert levenshtein(out, typo) == 1
        assert word_error_rate(out, typo) > 0

    def test_missing_words_removes_exactly_one_token(self):
        for seed in range(20):
            out = perturb(MSG, _p(PerturbationKind.MISSING_WORDS, seed))
            assert len(out.split()) == len(MSG.split()) - 1

    def test_extra_words_adds_exactly_one_token(self):
        for seed in range(20):
            out = perturb(MSG, _p(PerturbationKind.EXTRA_WORDS, seed))
            tokens = out.split()
            assert len(tokens) == len(MSG.split()) + 1
            added = tokens[0] if tokens[0] != "out" else tokens[-1]
            assert added in ("warning:", "note:", "debug:")

    def test_punctuation_substitutes_all_occurrences(self):
        msg = "tx nic (a) pid (b) done"
        out = perturb(msg, _p(PerturbationKind.PUNCTUATION, seed=1))
        assert "(" not in out and ")" not in out
        assert out.count("[") + out.count("{") == 2

    def test_punctuation_preserves_word_sequence(self):
        msg = "knet: tx nic (42) pid 7"
        for seed in range(10):
            out = perturb(msg, _p(PerturbationKind.PUNCTUATION, seed))
            assert out != msg
            from logsift.metrics import word_error_rate

            assert word_error_rate(msg, out) == 0.0

    def test_punctuation_inapplicable(self):
        with pytest.raises(Inapplicable):
            perturb("no delimiters here", _p(PerturbationKind.PUNCTUATION))

    def test_param_change_replaces_same_class(self):
        msg = "killed process 1234 at 10.0.0.1"
        changed = 0
        for seed in range(10):
            out = perturb(msg, _p(PerturbationKind.PARAM_CHANGE, seed))
            assert out != msg
            assert len(out.split()) == len(msg.split())
            changed += 1
        assert changed == 10

    def test_param_change_inapplicable(self):
        with pytest.raises(Inapplicable):
            perturb("all literal words only", _p(PerturbationKind.PARAM_CHANGE))

    def test_whitespace_ops(self):
        msg = "a b c"
        seen = set()
        for seed in range(30):
            out = perturb(msg, _p(PerturbationKind.WHITESPACE, seed))
            if len(out) < len(msg):
                seen.add("remove")
            elif "\t" in out:
                seen.add("tab")
            else:
                seen.add("double")
        assert seen == {"remove", "tab", "double"}

    def test_whitespace_inapplicable(self):
        with pytest.raises(Inapplicable):
            perturb("single", _p(PerturbationKind.WHITESPACE))

    def test_word_reorder_moves_token_to_front(self):
        msg = "one two three four"
        for seed in range(10):
            out = perturb(msg, _p(PerturbationKind.WORD_REORDER, seed))
            assert sorted(out.split()) == sorted(msg.split())
            assert out != msg
            assert out.split()[0] != "one"

    def test_word_reorder_inapplicable(self):
        with pytest.raises(Inapplicable):
            perturb("single", _p(PerturbationKind.WORD_REORDER))

    @given(st.integers(min_value=0, max_value=10_000))
    def test_typo_property(self, seed):
        out = perturb(MSG, _p(PerturbationKind.TYPO, seed))
        assert sum(a != b for a, b in zip(MSG, out)) == 1


class TestParams:
    def test_whitespace_op_pinned(self):
        p = Perturbation(PerturbationKind.WHITESPACE, seed=0, params={"op": "tab"})
        assert "\t" in perturb("a b c", p)

    def test_punctuation_target_pinned(self):
        p = Perturbation(
            PerturbationKind.PUNCTUATION, seed=0, params={"target": "[]"}
        )
        assert perturb("nic (42) pid", p) == "nic [42] pid"

    def test_extra_words_pinned(self):
        p = Perturbation(
            PerturbationKind.EXTRA_WORDS,
            seed=0,
            params={"words": ("warning:",), "position": "prefix"},
        )
        assert perturb("<m>-<f>:<l>: tx nic", p) == "warning: <m>-<f>:<l>: tx nic"

    def test_params_feed_determinism(self):
        a = Perturbation(PerturbationKind.WHITESPACE, seed=1, params={"op": "double"})
        assert perturb("x y z", a) == perturb("x y z", a)

    def test_bad_param_rejected(self):
        p = Perturbation(PerturbationKind.WHITESPACE, seed=0, params={"op": "zap"})
        with pytest.raises(ValueError):
            perturb("a b", p)


def _gold_and_messages():
    raws = [
        "out of memory: killed process <pid>",
        "nic (<id>) send failed",
        "link <n> of node <host> up",
    ]
    templates = [parse_template(r) for r in raws]
    messages = [
        "out of memory: killed process 101",
        "out of memory: killed process 4242",
        "nic (0xbeef) send failed",
        "link 3 of node n0001 up",
    ]
    return templates, messages


class TestEvaluate:
    def test_oracle_extractor_scores_perfect(self):
        templates, messages = _gold_and_messages()
        cset = compile_templates(templates)
        gold_of = {m: None for m in messages}
        from logsift.matching import best_match

        for m in messages:
            gold_of[m] = best_match(cset, m)[0].raw

        # extractor that always answers with the right gold pattern
        perturbed_to_gold = {}

        def oracle(perturbed):
            return perturbed_to_gold[perturbed]

        for kind in ALL_KINDS:
            p = Perturbation(kind=kind, seed=7)
            for m in messages:
                try:
                    perturbed_to_gold[perturb(m, p)] = gold_of[m]
                except Inapplicable:
                    pass
        rows = evaluate(templates, messages, extractor=oracle, seed=7)
        assert len(rows) == len(ALL_KINDS)
        for row in rows:
            if row.sample_count:
                assert row.accuracy_pct == 100.0
                assert row.avg_similarity == 1.0
                assert row.levenshtein_norm == 0.0
                assert row.wer_pct == 0.0

    def test_identity_extractor_on_literal_patterns_punctuation(self):
        # ten hand-built literal messages: each is its own gold pattern, so
        # the identity extractor is "perfect extraction of the noisy text";
        # punctuation noise then breaks exact match but not the word metric
        messages = [f"unit ({chr(97 + i)}) status (ok) code" for i in range(10)]
        templates = [parse_template(m) for m in messages]
        rows = evaluate(
            templates,
            messages,
            kinds=[PerturbationKind.PUNCTUATION],
            extractor=lambda s: s,
            seed=3,
        )
        (row,) = rows
        assert row.sample_count == 10
        assert row.accuracy_pct < 100.0
        assert row.wer_pct == 0.0
        assert row.avg_similarity > 0.8

    def test_extractor_errors_count_as_failures(self):
        templates, messages = _gold_and_messages()

        def broken(_):
            raise RuntimeError("boom")

        rows = evaluate(
            templates, messages, kinds=[PerturbationKind.TYPO], extractor=broken
        )
        (row,) = rows
        assert row.accuracy_pct == 0.0
        assert row.sample_count == len(messages)
        assert row.wer_pct == 100.0  # scored against empty output

    def test_inapplicable_excluded_from_denominator(self):
        templates = [parse_template("plain words only here")]
        messages = ["plain words only here"]
        rows = evaluate(
            templates, messages, kinds=[PerturbationKind.PARAM_CHANGE],
            extractor=lambda s: s,
        )
        (row,) = rows
        assert row.sample_count == 0
        assert row.skipped_count == 1

    def test_row_shape_7_kinds(self):
        templates, messages = _gold_and_messages()
        cset = compile_templates(templates)
        rows = evaluate(
            templates, messages, extractor=matcher_extractor(cset), seed=11
        )
        assert len(rows) == 7
        assert [r.kind for r in rows] == list(ALL_KINDS)

    def test_unmatched_message_rejected(self):
        templates, _ = _gold_and_messages()
        with pytest.raises(ValueError):
            evaluate(templates, ["never seen before"], extractor=lambda s: s)

    def test_message_level_metrics_flag(self):
        templates, messages = _gold_and_messages()
        rows = evaluate(
            templates,
            messages,
            kinds=[PerturbationKind.TYPO],
            extractor=lambda s: "",
            metric_level="message",
        )
        (row,) = rows
        # message vs perturbed-message: one character typo, very similar
        assert row.avg_similarity > 0.9
        assert row.accuracy_pct == 0.0

    def test_csv_shape(self):
        templates, messages = _gold_and_messages()
        cset = compile_templates(templates)
        rows = evaluate(templates, messages, extractor=matcher_extractor(cset))
        text = robustness_csv(rows)
        lines = text.strip().splitlines()
        assert lines[0] == "Type,Acc.,Avg. Sim.,Lev.,WER,Samples,Skipped"
        assert len(lines) == 8
