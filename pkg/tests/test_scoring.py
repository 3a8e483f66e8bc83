from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from evil.errors import ContractError
from evil.parsing import split_prediction
from evil.scoring import accuracy, score_sample

SOFT_SCORES = {Fraction(0), Fraction(1, 3), Fraction(2, 3), Fraction(1)}


class TestScoreSample:
    def test_vqax_consensus_caps_at_one(self, vqax_samples):
        pred = split_prediction("q001", "shower because of the glass door")
        assert score_sample(pred, vqax_samples[0]) == 1

    def test_vqax_single_annotator_third(self, vqax_samples):
        pred = split_prediction("q002", "yes")
        assert score_sample(pred, vqax_samples[1]) == Fraction(1, 3)

    def test_vqax_two_annotators(self, vqax_samples):
        pred = split_prediction("q001", "bathroom")
        assert score_sample(pred, vqax_samples[0]) == Fraction(2, 3)

    def test_vqax_no_match(self, vqax_samples):
        pred = split_prediction("q001", "garage because reasons")
        assert score_sample(pred, vqax_samples[0]) == 0

    def test_esnlive_mapped_word(self, esnlive_samples):
        neutral = esnlive_samples[2]
        assert score_sample(split_prediction("e003", "maybe because unclear"), neutral) == 1
        assert score_sample(split_prediction("e003", "yes"), neutral) == 0

    def test_esnlive_raw_label_is_not_an_answer(self, esnlive_samples):
        pred = split_prediction("e001", "entailment because it is")
        assert score_sample(pred, esnlive_samples[0]) == 0

    def test_vcr_choice_token(self, vcr_samples):
        sample = vcr_samples[0]  # gold answer0
        assert score_sample(split_prediction("c001", "answer0 because he points"), sample) == 1
        assert score_sample(split_prediction("c001", "answer1"), sample) == 0

    def test_vcr_unparseable_scores_zero(self, vcr_samples):
        assert score_sample(split_prediction("c001", "he wants attention"), vcr_samples[0]) == 0

    def test_id_mismatch_is_contract_error(self, vqax_samples):
        with pytest.raises(ContractError):
            score_sample(split_prediction("other", "yes"), vqax_samples[0])

    def test_vqax_scores_confined_to_soft_set(self, vqax_samples):
        answers = ["shower", "bathroom", "yes", "no", "giraffe", "nonsense", ""]
        for sample in vqax_samples:
            for text in answers:
                pred = split_prediction(sample.id, text)
                assert score_sample(pred, sample) in SOFT_SCORES


class TestAccuracy:
    def test_mean_times_hundred(self):
        assert accuracy([1, 1, 0, 0]) == 50.0

    def test_soft_mean_one_decimal(self):
        assert accuracy([Fraction(1, 3), 1]) == 66.7

    def test_empty_is_contract_error(self):
        with pytest.raises(ContractError):
            accuracy([])

    @given(st.lists(st.sampled_from([0, Fraction(1, 3), Fraction(2, 3), 1]), min_size=1))
    def test_bounds_and_permutation_invariance(self, scores):
        value = accuracy(scores)
        assert 0.0 <= value <= 100.0
        assert accuracy(list(reversed(scores))) == value
