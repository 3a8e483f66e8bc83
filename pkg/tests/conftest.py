import pytest

from evil.parsing import split_prediction
from evil.samples import DatasetId, Split, write_samples

import corpus_fixtures


@pytest.fixture
def vqax_samples():
    return corpus_fixtures.mini_vqax()


@pytest.fixture
def esnlive_samples():
    return corpus_fixtures.mini_esnlive()


@pytest.fixture
def vcr_samples():
    return corpus_fixtures.mini_vcr()


@pytest.fixture
def all_samples():
    return corpus_fixtures.mini_all()


@pytest.fixture
def corpus_root(tmp_path):
    """Canonical on-disk layout holding the mini datasets' test split."""
    root = tmp_path / "corpus"
    for dataset, samples in (
        (DatasetId.VQAX, corpus_fixtures.mini_vqax()),
        (DatasetId.ESNLIVE, corpus_fixtures.mini_esnlive()),
        (DatasetId.VCR, corpus_fixtures.mini_vcr()),
    ):
        write_samples(samples, root / dataset.value / f"{Split.TEST.value}.jsonl")
    return root


@pytest.fixture
def mixed_fixture():
    """(samples, parsed predictions) with task scores 1, 1/3, 1, 0, 1, 0."""
    samples, generations = corpus_fixtures.mixed_eval_fixture()
    parsed = [split_prediction(sid, raw) for sid, raw in generations]
    return samples, parsed
