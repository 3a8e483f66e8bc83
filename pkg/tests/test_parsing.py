import pytest
from hypothesis import given, strategies as st

from evil.parsing import (
    normalize_answer,
    prediction_from_dict,
    prediction_to_dict,
    split_prediction,
    vcr_answer_index,
)

WORDS = st.sampled_from(
    "yes no maybe shower giraffe answer2 the a sky blue dark cloud person1".split()
)


class TestSplitPrediction:
    def test_answer_and_explanation(self):
        parsed = split_prediction("s0", "shower because there is a clear glass door")
        assert parsed.answer == "shower"
        assert parsed.explanation == "there is a clear glass door"

    def test_missing_separator(self):
        parsed = split_prediction("s0", "yes")
        assert (parsed.answer, parsed.explanation) == ("yes", "")

    def test_first_occurrence_wins(self):
        parsed = split_prediction("s0", "no because the sky is dark because of clouds")
        assert parsed.answer == "no"
        assert parsed.explanation == "the sky is dark because of clouds"

    def test_leading_separator_yields_empty_answer(self):
        parsed = split_prediction("s0", "because the sky is dark")
        assert parsed.answer == ""
        assert parsed.explanation == "the sky is dark"
        assert parsed.malformed

    def test_embedded_because_not_a_separator(self):
        parsed = split_prediction("s0", "becausexyz is here")
        assert parsed.answer == "becausexyz is here"
        assert not parsed.malformed

    @given(st.text())
    def test_total_on_arbitrary_text(self, raw):
        parsed = split_prediction("s0", raw)
        assert parsed.raw == raw

    @given(st.lists(WORDS, min_size=1, max_size=4), st.lists(WORDS, min_size=1, max_size=10))
    def test_round_trip(self, answer_words, explanation_words):
        answer = " ".join(w for w in answer_words if w != "because") or "yes"
        explanation = " ".join(explanation_words)
        parsed = split_prediction("s0", f"{answer} because {explanation}")
        assert parsed.answer == normalize_answer(answer)
        assert parsed.explanation == explanation


class TestNormalizeAnswer:
    @pytest.mark.parametrize(
        "raw,expected",
        [("  Yes. ", "yes"), ("answer2", "answer2"), ("Maybe", "maybe"), ("no?!,", "no"),
         ("two  words ", "two words"), ("", "")],
    )
    def test_examples(self, raw, expected):
        assert normalize_answer(raw) == expected


class TestVcrAnswerIndex:
    @pytest.mark.parametrize("text,expected", [("answer0", 0), ("answer3", 3)])
    def test_exact_tokens(self, text, expected):
        assert vcr_answer_index(text) == expected

    @pytest.mark.parametrize("text", ["answer 2", "answer4", "answers1", "ANSWER1", ""])
    def test_strictness(self, text):
        assert vcr_answer_index(text) is None

    @given(st.text())
    def test_present_implies_in_range(self, text):
        index = vcr_answer_index(text)
        assert index is None or 0 <= index <= 3


def test_prediction_dict_round_trip():
    parsed = split_prediction("s9", "answer1 because person1 waved")
    assert prediction_from_dict(prediction_to_dict(parsed)) == parsed
