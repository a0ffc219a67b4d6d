import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modallens.errors import ArgumentError
from modallens.interactions import (LABELS, ImportanceTriple, Thresholds,
                                    _TripleArrays, evaluate_objective,
                                    group_summaries, label_dataset,
                                    label_interaction, low_influence_floor,
                                    optimize_thresholds)

from conftest import make_dataset, tiny_schema

HAND_TH = Thresholds(th_sig=0.05, th_dom=0.6, th_confl=0.2)


def triple(values, iid="t0"):
    return ImportanceTriple(instance_id=iid, values=tuple(float(v) for v in values))


def test_hand_traced_dominance():
    lab = label_interaction(triple((0.8, 0.1, 0.1)), HAND_TH)
    assert lab.label == "dominance"
    assert lab.dominant_modality == "language"


def test_hand_traced_conflict():
    lab = label_interaction(triple((0.5, -0.4, 0.1)), HAND_TH)
    assert lab.label == "conflict"


def test_hand_traced_complement():
    lab = label_interaction(triple((0.4, 0.4, 0.2)), HAND_TH)
    assert lab.label == "complement"


def test_hand_traced_others():
    lab = label_interaction(triple((0.02, 0.9, 0.08)), HAND_TH)
    assert lab.label == "others"


def test_zero_triple_is_others():
    assert label_interaction(triple((0.0, 0.0, 0.0)), HAND_TH).label == "others"


def test_low_influence_floor_routes_to_others():
    t = triple((0.4, 0.4, 0.2))
    assert label_interaction(t, HAND_TH, l1_floor=0.0).label == "complement"
    assert label_interaction(t, HAND_TH, l1_floor=2.0).label == "others"


def test_dominance_requires_sign_agreement():
    # Vision carries the largest share but pulls against the net direction.
    lab = label_interaction(triple((0.25, 0.3, -0.45)), Thresholds(0.05, 0.4, 0.01))
    assert lab.label != "dominance"


def test_triple_share_accessors():
    t = triple((0.5, -0.3, 0.2))
    assert t.l1 == pytest.approx(1.0)
    assert t.net == pytest.approx(0.4)
    assert t.shares == pytest.approx((0.5, 0.3, 0.2))
    assert t.signed_shares == pytest.approx((0.5, -0.3, 0.2))
    assert triple((0, 0, 0)).shares is None


def test_thresholds_domain():
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ArgumentError):
            Thresholds(bad, 0.5, 0.5)


@settings(max_examples=300, deadline=None)
@given(
    st.tuples(*[st.floats(min_value=-5, max_value=5, allow_nan=False)] * 3),
    st.floats(min_value=0.01, max_value=0.99),
    st.floats(min_value=0.01, max_value=0.99),
    st.floats(min_value=0.01, max_value=0.99),
)
def test_labeling_is_total_and_unique(values, ts, td, tc):
    lab = label_interaction(triple(values), Thresholds(ts, td, tc))
    assert lab.label in LABELS
    if lab.label == "dominance":
        assert lab.dominant_modality in ("language", "audio", "vision")
    else:
        assert lab.dominant_modality is None


@settings(max_examples=200, deadline=None)
@given(
    st.tuples(*[st.floats(min_value=-5, max_value=5, allow_nan=False)] * 3),
    st.floats(min_value=0.1, max_value=100),
)
def test_labeling_scale_invariance(values, scale):
    th = HAND_TH
    a = label_interaction(triple(values), th)
    b = label_interaction(triple(tuple(v * scale for v in values)), th)
    assert a.label == b.label
    assert a.dominant_modality == b.dominant_modality


def test_vectorized_masks_match_scalar_labeling():
    rng = np.random.default_rng(12)
    triples = [triple(rng.normal(size=3), f"r{k}") for k in range(400)]
    floor = low_influence_floor(triples)
    arrays = _TripleArrays(triples, floor)
    for th in (HAND_TH, Thresholds(0.1, 0.45, 0.1), Thresholds(0.3, 0.8, 0.05)):
        masks = arrays.label_masks(th.th_sig, th.th_dom, th.th_confl)
        for k, t in enumerate(triples):
            expect = label_interaction(t, th, floor).label
            got = [g for g in LABELS if masks[g][k]]
            assert got == [expect]


def test_masks_partition_instances():
    rng = np.random.default_rng(13)
    triples = [triple(rng.normal(size=3), f"r{k}") for k in range(200)]
    arrays = _TripleArrays(triples, 0.0)
    masks = arrays.label_masks(0.05, 0.6, 0.2)
    stacked = np.stack([masks[g] for g in LABELS])
    assert (stacked.sum(axis=0) == 1).all()


def test_objective_empty_groups():
    triples = [triple((0.8, 0.1, 0.1), "a"), triple((0.75, 0.13, 0.12), "b")]
    arrays = _TripleArrays(triples, 0.0)
    masks = arrays.label_masks(0.05, 0.6, 0.2)
    j, means, others_term = evaluate_objective(masks, arrays.signed_shares, arrays.l1)
    assert means["conflict"] is None
    assert others_term == 0.0
    assert j == pytest.approx(0.0)


def test_optimizer_best_is_grid_maximum():
    rng = np.random.default_rng(14)
    triples = [triple(rng.normal(size=3), f"r{k}") for k in range(120)]
    result = optimize_thresholds(triples, grid_step=0.2)
    assert result.best.th_sig in (0.2, 0.4, 0.6, 0.8)
    objectives = [e["objective"] for e in result.trace]
    assert result.objective == pytest.approx(max(objectives))
    # First-maximum tie-break: no earlier trace entry reaches the optimum.
    first = next(i for i, e in enumerate(result.trace)
                 if e["objective"] == result.objective)
    assert result.trace[first]["thresholds"] == [result.best.th_sig,
                                                 result.best.th_dom,
                                                 result.best.th_confl]


def test_optimizer_validation():
    with pytest.raises(ArgumentError):
        optimize_thresholds([], grid_step=0.2)
    with pytest.raises(ArgumentError):
        optimize_thresholds([triple((1, 1, 1))], grid_step=1.5)


def test_label_dataset_uses_percentile_floor():
    quiet = [triple((0.001, 0.001, 0.001), f"q{k}") for k in range(2)]
    loud = [triple((0.4, 0.4, 0.2), f"l{k}") for k in range(38)]
    labels = label_dataset(quiet + loud, HAND_TH)
    assert labels["q0"].label == "others"
    assert labels["l0"].label == "complement"


def test_group_summaries_partition_and_order():
    rng = np.random.default_rng(15)
    ds = make_dataset(tiny_schema(), n=8)
    triples = {i.id: triple(rng.normal(size=3), i.id) for i in ds}
    labels = label_dataset(list(triples.values()), HAND_TH, l1_floor=0.0)
    summaries = group_summaries(labels, triples, ds)
    all_members = [iid for g in LABELS for iid in summaries[g].member_ids]
    assert sorted(all_members) == sorted(triples)
    for g in LABELS:
        s = summaries[g]
        assert len(s.error_series) == len(s.member_ids)
        if s.member_ids:
            # The chain starts from the highest-influence member.
            assert s.member_ids[0] == max(
                s.member_ids, key=lambda i: (triples[i].l1, i))
        assert s.modality_order == sorted(
            s.modality_totals, key=lambda m: (-s.modality_totals[m], m))
        assert s.prediction_histogram.bins == 14
