import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modallens.dataset import Dataset, Instance, Token
from modallens.errors import ArgumentError, DegenerateError
from modallens.metrics import (bin_distribution, compute_metrics, pearson,
                               round_sentiment)

from conftest import tiny_schema


def _flat_dataset(pairs):
    s = tiny_schema()
    instances = []
    for k, (label, pred) in enumerate(pairs):
        tokens = (Token("w", 0.0, 0.1, pos="NOUN"),)
        feats = {m: np.zeros((1, s.dims(m))) for m in s.modalities}
        instances.append(Instance(f"i{k}", tokens, feats, label, pred))
    return Dataset(schema=s, instances=instances)


def test_round_half_away_from_zero():
    vals = round_sentiment([1.4, 1.5, -1.5, -1.4, 0.5, -0.5, 2.49])
    np.testing.assert_array_equal(vals, [1, 2, -2, -1, 1, -1, 2])


def test_round_clamps_to_scale():
    np.testing.assert_array_equal(round_sentiment([2.8, 3.0, -2.9]), [3, 3, -3])


def test_identity_dataset_metrics():
    ds = _flat_dataset([(-2.0, -2.0), (0.5, 0.5), (1.5, 1.5), (3.0, 3.0)])
    r = compute_metrics(ds)
    assert r.mae == 0.0
    assert r.acc7 == 1.0
    assert r.acc2 == 1.0
    assert r.f1 == 1.0
    assert r.corr == pytest.approx(1.0)


def test_rounding_example_counts_as_match():
    # 1.4 rounds to 1, matching a true label of 1.
    ds = _flat_dataset([(1.0, 1.4)])
    assert compute_metrics(ds).acc7 == 1.0


def test_pearson_on_scaled_labels():
    y = np.array([-1.0, 0.0, 1.0, 2.0])
    assert pearson(y, 0.5 * y + 0.3) == pytest.approx(1.0)


def test_pearson_degenerate():
    with pytest.raises(DegenerateError):
        pearson([1.0, 1.0, 1.0], [0.0, 1.0, 2.0])
    with pytest.raises(DegenerateError):
        pearson([1.0], [1.0])


def test_constant_predictions_mark_corr_undefined():
    ds = _flat_dataset([(-1.0, 0.5), (1.0, 0.5)])
    assert compute_metrics(ds).corr is None


def test_f1_defined_when_no_positives():
    ds = _flat_dataset([(-1.0, -0.5), (0.0, -0.1)])
    assert compute_metrics(ds).f1 == 1.0


def test_zero_counts_as_negative_class():
    ds = _flat_dataset([(0.0, 0.5)])
    r = compute_metrics(ds)
    assert r.acc2 == 0.0


def test_metrics_need_instances():
    with pytest.raises(ArgumentError):
        compute_metrics(Dataset(schema=tiny_schema(), instances=[]))


def test_histogram_half_open_bins():
    h = bin_distribution([0.0, 0.5, 1.0, 1.5, 2.0], 2, (0.0, 2.0))
    # [0, 1) holds 0.0 and 0.5; [1, 2] holds 1.0, 1.5 and the closed top edge.
    assert h.counts == (2, 3)
    assert h.underflow == 0 and h.overflow == 0


def test_histogram_under_overflow():
    h = bin_distribution([-0.1, 0.5, 2.1], 4, (0.0, 2.0))
    assert h.underflow == 1
    assert h.overflow == 1
    assert sum(h.counts) == 1


def test_histogram_validation():
    with pytest.raises(ArgumentError):
        bin_distribution([1.0], 0, (0.0, 1.0))
    with pytest.raises(ArgumentError):
        bin_distribution([1.0], 3, (1.0, 1.0))


@given(st.lists(st.floats(min_value=-3, max_value=3), min_size=1, max_size=50))
def test_histogram_conserves_mass(values):
    h = bin_distribution(values, 14, (-3.0, 3.0))
    assert sum(h.counts) + h.underflow + h.overflow == len(values)


@given(st.floats(min_value=-10, max_value=10))
def test_round_sentiment_stays_on_scale(v):
    r = float(round_sentiment([v])[0])
    assert -3 <= r <= 3
    assert r == int(r)
