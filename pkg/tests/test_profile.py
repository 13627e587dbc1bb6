import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tangent_arctic.profile import (AlphaProfile, DefectSequence, FreezingKind, alpha_eval,
                                    detect_freezing, discretize, locate_discrete, rescale)


def test_sequence_validation():
    assert DefectSequence((1, 3)).full == (0, 1, 3)
    with pytest.raises(ValueError):
        DefectSequence((2, 2))
    with pytest.raises(ValueError):
        DefectSequence((0, 1))
    with pytest.raises(ValueError):
        DefectSequence(())


def test_profile_validation():
    with pytest.raises(ValueError):
        AlphaProfile.build([1.0], [0.5])  # density above one
    with pytest.raises(ValueError):
        AlphaProfile.build([0.5, 0.5], [2, 2], [-0.5])  # decreasing
    p = AlphaProfile.build([1, 1], [2, 3], [0.25])
    assert AlphaProfile.from_dict(p.to_dict()) == p


def test_alpha_eval_at_jump(gap_profile):
    assert alpha_eval(gap_profile, 0.5) == (1.0, 2.0, 2.0)
    assert alpha_eval(gap_profile, 0.0)[0] == 0.0
    assert math.isnan(alpha_eval(gap_profile, 0.0)[1])
    assert alpha_eval(gap_profile, 1.0)[0] == pytest.approx(3.0)
    with pytest.raises(ValueError):
        alpha_eval(gap_profile, 1.5)
    assert gap_profile.jump_after(0) == pytest.approx(1.0)


def test_discretize_gap_small(gap_profile):
    assert discretize(gap_profile, 8).a == (2, 4, 6, 8, 18, 20, 22, 24)


def test_discretize_small_cases(gap_profile):
    p = AlphaProfile.build([1.0], [1.0])
    assert discretize(p, 5).a == (1, 2, 3, 4, 5)
    assert discretize(gap_profile, 1).a == (3,)
    assert discretize(AlphaProfile.build([1.0], [1.2]), 1).a == (1,)
    with pytest.raises(ValueError):
        discretize(p, 0)


def test_rescale_small_cases():
    p = rescale(DefectSequence((1, 2)))
    assert [(s.u_lo, s.u_hi, s.alpha_lo, s.slope) for s in p.segments] == [(0.0, 1.0, 0.0, 1.0)]
    p = rescale(DefectSequence((1, 3)))
    assert [(s.alpha_lo, s.slope) for s in p.segments] == [(0.0, 1.0), (0.5, 2.0)]
    assert p.alpha_end == 1.5


def test_alpha_eval_inside_sawtooth(saw_profile):
    v, left, right = alpha_eval(saw_profile, 0.5)
    assert v == pytest.approx(5 / 6) and left == right == 1.0


def test_rescale_round_trip(gap_profile):
    n = 40
    back = rescale(discretize(gap_profile, n))
    u = np.linspace(0, 1, 401)
    assert np.max(np.abs(back(u) - gap_profile(u))) <= 1.0 / n + 1e-12
    flats = [iv for iv in detect_freezing(back) if iv.kind is FreezingKind.FLAT]
    assert len(flats) == 1 and abs(flats[0].extent - 1.0) <= 1.0 / n + 1e-12


def test_rescale_tightly_packed_is_one_segment():
    p = rescale(DefectSequence((1, 2, 3, 4)))
    assert len(p.segments) == 1 and p.segments[0].slope == 1.0


def test_detect_freezing(gap_profile, saw_profile):
    (iv,) = detect_freezing(gap_profile)
    assert iv.kind is FreezingKind.FLAT and iv.u1 == 0.5 and iv.extent == pytest.approx(1.0)
    (iv,) = detect_freezing(saw_profile)
    assert iv.kind is FreezingKind.SAWTOOTH
    assert iv.u1 == pytest.approx(1 / 3) and iv.extent == pytest.approx(1 / 3)
    assert detect_freezing(AlphaProfile.build([1.0], [2.0])) == []


def test_detect_freezing_rejects_unsupported():
    with pytest.raises(ValueError):
        detect_freezing(AlphaProfile.build([0.5, 0.5], [1, 2], [1.0]))  # gap next to slope 1
    with pytest.raises(ValueError):
        detect_freezing(AlphaProfile.build([1.0], [2.0], alpha0=0.5))  # gap at the origin


def test_locate_discrete(gap_profile, saw_profile):
    (iv,) = detect_freezing(gap_profile)
    loc = locate_discrete(discretize(gap_profile, 60), iv)
    assert (loc.q, loc.m) == (30, 62)
    (iv,) = detect_freezing(saw_profile)
    seq = discretize(saw_profile, 30)
    loc = locate_discrete(seq, iv)
    assert (loc.q, loc.m) == (10, 10)
    assert all(seq[i + 1] - seq[i] == 1 for i in range(loc.q, loc.q + loc.m))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=30))
def test_rescale_interpolates(gaps):
    a = tuple(np.cumsum(gaps).tolist())
    seq = DefectSequence(a)
    p = rescale(seq)
    n = seq.n
    # jumps sit just after a grid point, so every (i/n, a_i/n) is on the profile
    assert np.allclose(p(np.arange(n + 1) / n) * n, seq.full)
    assert p.alpha_end * n == pytest.approx(a[-1])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 40), min_size=1, max_size=40))
def test_discretize_inverts_rescale(gaps):
    seq = DefectSequence(tuple(np.cumsum(gaps).tolist()))
    assert discretize(rescale(seq), seq.n) == seq


@pytest.mark.parametrize("n", [10, 37, 64, 150])
def test_rescale_discretize_sup_norm(gap_profile, saw_profile, n):
    u = np.linspace(0, 1, 2001)
    for p in (gap_profile, saw_profile, AlphaProfile.build([1, 2], [3, 1.5], [0.4])):
        back = rescale(discretize(p, n))
        # compare away from the jump location, where a 1/n shift is unavoidable
        far = np.ones_like(u, bool)
        for s in p.segments[1:]:
            far &= np.abs(u - s.u_lo) > 1.0 / n
        assert np.max(np.abs(back(u) - p(u))[far]) <= 2.0 / n + 1e-12


def test_intervals_disjoint():
    p = AlphaProfile.build([1, 1, 1, 1, 1], [2, 1, 3, 2, 1], [0, 0, 0.5, 0])
    ivs = detect_freezing(p)
    kinds = [iv.kind for iv in ivs]
    assert kinds.count(FreezingKind.SAWTOOTH) == 2 and kinds.count(FreezingKind.FLAT) == 1
    spans = sorted((iv.u1, iv.u1 + (iv.extent if iv.kind is FreezingKind.SAWTOOTH else 0.0))
                   for iv in ivs)
    assert all(a[1] <= b[0] + 1e-12 for a, b in zip(spans, spans[1:]))
