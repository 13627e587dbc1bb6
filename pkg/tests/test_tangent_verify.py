import csv
import io
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import gammaln

from tangent_arctic.arctic import find_t1, portion_range, spaced, z_of_t
from tangent_arctic.combinatorics import PortionKind, h_flat, h_sawtooth, y_count
from tangent_arctic.profile import AlphaProfile, DefectSequence, discretize, locate_discrete
from tangent_arctic.tangent_verify import (action_S0, action_S1, convergence_table,
                                           default_interval, exact_weight, finite_size_argmax,
                                           log_integral, log_weights, predicted_xi_star)

F, U, R = PortionKind.F, PortionKind.U, PortionKind.R


def test_S0_examples():
    assert action_S0(F, 0.3, 1.0, 1.0) == 0.0
    assert action_S0(F, 0.5, 0.5, 1.0) == pytest.approx(math.log(2), rel=1e-14)
    assert action_S0(R, 0.2, 0.5, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert action_S0(U, 0.5, 0.5, 1.0) == pytest.approx(math.log(2), rel=1e-14)
    with pytest.raises(ValueError):
        action_S0(R, 0.1, 0.2, 0.5)
    with pytest.raises(ValueError):
        action_S0(F, 0.1, 1.2, 1.0)


def test_S0_stirling():
    # log C(n - 1, n/2) / n against log 2; 2% is reached from n = 400 on
    n = 400
    v = (gammaln(n) - gammaln(n // 2) - gammaln(n // 2 + 1)) / n
    assert abs(v / math.log(2) - 1) < 0.02
    ly = math.log(y_count(F, n // 2, n // 2, n)) / n
    assert ly == pytest.approx(v, rel=1e-12)


def test_S1_identity(gap_profile, saw_profile):
    iv = default_interval(gap_profile, F)
    assert action_S1(gap_profile, F, iv.extent, iv) == pytest.approx(0.0, abs=1e-14)
    iv = default_interval(saw_profile, R)
    assert action_S1(saw_profile, R, iv.extent, iv) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValueError):
        action_S1(saw_profile, R, iv.extent * 2, iv)
    with pytest.raises(ValueError):
        action_S1(saw_profile, F, 0.1, iv)


def test_log_integral_quadrature(gap_profile):
    from scipy.integrate import quad
    c = 1.37
    ref = sum(quad(lambda u: math.log(abs(gap_profile(u) - c)), a, b, limit=200)[0]
              for a, b in ((0, 0.5), (0.5, 1)))
    assert log_integral(gap_profile, c) == pytest.approx(ref, rel=1e-9)


def test_S1_flat_matches_finite_size(gap_profile):
    iv = default_interval(gap_profile, F)
    n = 400
    seq = discretize(gap_profile, n)
    loc = locate_discrete(seq, iv)
    ell = math.floor(n * 0.5)
    assert abs(h_flat(seq, loc.q, ell).log_value / n - action_S1(gap_profile, F, 0.5, iv)) < 0.02


def test_S1_sawtooth_matches_finite_size(saw_profile):
    iv = default_interval(saw_profile, R)
    n = 300
    seq = discretize(saw_profile, n)
    loc = locate_discrete(seq, iv)
    xi = iv.extent / 2
    ell = math.floor(n * xi)
    got = h_sawtooth(seq, loc.q, loc.m, ell).log_value / n
    assert abs(got - action_S1(saw_profile, R, xi, iv)) < 0.03


@pytest.mark.parametrize("a,q,m,kind", [
    ((1, 2, 7, 8), 2, 5, F), ((1, 2, 7, 8), 2, 5, U), ((2, 3, 4, 9, 10), 1, 2, R),
    ((1, 2, 3, 6, 8), 0, 3, R), ((3, 9, 11, 12), 1, 6, F), ((1, 5, 6, 7, 8, 11), 2, 3, R),
])
def test_float_argmax_matches_exact(a, q, m, kind):
    seq = DefectSequence(a)
    for r in range(1, 9):
        ells, lw = log_weights(seq, q, m, r, kind)
        exact = [exact_weight(seq, q, m, r, kind, int(e)) for e in ells]
        for e, w, lx in zip(ells, exact, lw):
            if w == 0:
                assert lx == -np.inf
            else:
                assert lx == pytest.approx(math.log(w), rel=1e-12, abs=1e-12)
        top = max(exact)
        winners = [int(e) for e, w in zip(ells, exact) if w == top]
        res = finite_size_argmax(seq, q, m, r, kind)
        assert res.ell_star == winners[0]
        assert res.tie == (len(winners) > 1)


def test_tie_is_flagged():
    # a=(4,), r=2: weights 1, 3/2, 3/2, 1 over ell = 1..4
    res = finite_size_argmax(DefectSequence((4,)), 0, 4, 2, F)
    assert res.tie and res.tied_ells == (2, 3) and res.ell_star == 2
    res = finite_size_argmax(DefectSequence((4,)), 0, 4, 1, F)
    assert not res.tie


def test_large_r_enters_at_left(gap_profile):
    seq = discretize(gap_profile, 20)
    iv = default_interval(gap_profile, F)
    loc = locate_discrete(seq, iv)
    res = finite_size_argmax(seq, loc.q, loc.m, 50 * loc.m, F, gap_profile, iv)
    assert res.ell_star == 1


def test_gap_argmax_and_mirror(gap_profile):
    n = 60
    iv = default_interval(gap_profile, F)
    seq = discretize(gap_profile, n)
    loc = locate_discrete(seq, iv)
    f = finite_size_argmax(seq, loc.q, loc.m, 15, F, gap_profile, iv)
    u = finite_size_argmax(seq, loc.q, loc.m, 15, U, gap_profile, iv)
    assert abs(f.ell_star / n - f.xi_star_pred) <= 0.05
    assert abs(u.ell_star / n - u.xi_star_pred) <= 0.05
    assert f.xi_star_pred + u.xi_star_pred == pytest.approx(iv.extent, abs=1e-10)
    assert f.z == 0.25 and 0 <= f.ell_star <= loc.m


def test_predicted_examples(gap_profile, saw_profile):
    iv = default_interval(gap_profile, F)
    x = 0.6123724356957945
    assert predicted_xi_star(gap_profile, iv, F, 0.8 * (1 - x) / x) == pytest.approx(0.2, abs=1e-10)
    t1 = find_t1(gap_profile, iv)
    assert predicted_xi_star(gap_profile, iv, F, 1e-9) == pytest.approx(t1 - 1.0, abs=1e-6)
    iv = default_interval(saw_profile, R)
    assert predicted_xi_star(saw_profile, iv, R, 1 / 3) == pytest.approx(1 / 6, abs=1e-10)
    with pytest.raises(ValueError):
        predicted_xi_star(saw_profile, iv, R, 0.0)


@pytest.mark.parametrize("kind", [F, U])
def test_predicted_inverts_z_flat(gap_profile, kind):
    iv = default_interval(gap_profile, kind)
    lo, hi = portion_range(gap_profile, iv, kind)
    for t in spaced(lo, hi, 25, margin=1e-3):
        z = z_of_t(gap_profile, t, kind, iv)
        if z < 1e-6:
            continue
        assert predicted_xi_star(gap_profile, iv, kind, z) + iv.alpha_u1 == pytest.approx(t, abs=1e-8)


def test_predicted_inverts_z_saw(saw_profile):
    iv = default_interval(saw_profile, R)
    lo, hi = portion_range(saw_profile, iv, R)
    for t in spaced(lo, hi, 25, margin=1e-3):
        z = z_of_t(saw_profile, t, R, iv)
        assert predicted_xi_star(saw_profile, iv, R, z) + iv.alpha_u1 == pytest.approx(t, abs=1e-8)


def test_convergence_errors(gap_profile):
    uniform = AlphaProfile.build([1.0], [2.0])
    with pytest.raises(ValueError):
        convergence_table(uniform, default_interval(uniform, F), F, 0.25, [10, 20])
    iv = default_interval(gap_profile, F)
    with pytest.raises(ValueError):
        convergence_table(gap_profile, iv, F, 0.25, [20, 10])


def test_convergence_csv(saw_profile):
    iv = default_interval(saw_profile, R)
    table = convergence_table(saw_profile, iv, R, 1 / 3, [30, 60])
    text = table.to_csv()
    rows = [r for r in csv.reader(io.StringIO(text)) if not r[0].startswith("#")]
    assert rows[0] == ["n", "ell_star_over_n", "xi_star", "deviation"]
    assert [int(r[0]) for r in rows[1:]] == [30, 60]
    assert text.rstrip().splitlines()[-1].startswith("# fit")
    assert np.all(table.deviations() <= 0.03)


def test_exact_weight_is_rational():
    seq = DefectSequence((1, 4))
    w = exact_weight(seq, 1, 3, 2, F, 2)
    assert isinstance(w, Fraction) and w == y_count(F, 2, 2, 3) * Fraction(1, 2)
